#pragma once

#include <string>
#include <vector>

#include "rtk/equations.hpp"
#include "rtk/tensor.hpp"

namespace rtk {

// dX/dt = A * X + B * U, Y = C * X + D * U.
struct MltiSystem {
  PairedTensor A;  // I x I
  PairedTensor B;  // I x L
  PairedTensor C;  // M x I
  PairedTensor D;  // M x L

  void validate() const;
};

// G(s) = D + C * (s I - A)^{-1} * B.
PairedTensor transfer_function(const MltiSystem& sys, Complex s);
double sigma_max(const PairedTensor& a);

bool is_stable(const MltiSystem& sys);
// Hautus test on the unfolding.
bool is_stabilizable(const PairedTensor& a, const PairedTensor& b);
bool is_detectable(const PairedTensor& c, const PairedTensor& a);

// Hamiltonian tensor M_gamma; needs gamma > sigma_max(D).
PairedTensor m_gamma(const MltiSystem& sys, double gamma);

// Imaginary-axis eigenvalues of M_gamma, as frequencies w with eigenvalue i w.
// imag_tol < 0 selects 1e-8 * ||M_gamma||_2.
std::vector<double> imaginary_axis_frequencies(const MltiSystem& sys, double gamma, double imag_tol = -1.0);

struct HinfResult {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  int iterations = 0;
};

HinfResult hinf_norm(const MltiSystem& sys, double rel_tol = 1e-4);

// sup of sigma_max(G(i w)) over the given frequencies, and their negatives for complex data.
double frequency_sweep(const MltiSystem& sys, const std::vector<double>& omegas);
std::vector<double> log_frequency_grid(const MltiSystem& sys, int points);

// ARTE form of the bounded-real Riccati equation at gamma.
ArteProblem bounded_real_riccati(const MltiSystem& sys, double gamma);

struct BrlVerdict {
  double gamma = 0.0;
  double hinf = 0.0;
  bool norm_below_gamma = false;          // condition (i)
  bool hamiltonian_axis_free = false;     // condition (ii)
  bool riccati_solution = false;          // condition (iii)
  double riccati_min_eigenvalue = 0.0;
  double riccati_residual = 0.0;
  std::string riccati_note;

  bool consistent() const {
    return norm_below_gamma == hamiltonian_axis_free && hamiltonian_axis_free == riccati_solution;
  }
};

BrlVerdict bounded_real_check(const MltiSystem& sys, double gamma, double rel_tol = 1e-4);

struct LqrResult {
  PairedTensor gain;  // -B^H * E
  ArteReport report;
};

LqrResult lqr_gain(const MltiSystem& sys);

}  // namespace rtk
