#pragma once

#include <array>
#include <string>
#include <vector>

#include "rtk/control.hpp"
#include "rtk/equations.hpp"
#include "rtk/structured.hpp"

namespace rtk::example1 {

// Rank-one system tensors A1 o A2, B1 o B2, C1 o C2, stored as GCPD with one term.
GcpdTensor gcpd_A();
GcpdTensor gcpd_B();
GcpdTensor gcpd_C();

MltiSystem system();
ArteProblem problem();
// (A - B B^H E, B, C, D): stable when E is the stabilizing solution.
MltiSystem closed_loop_system(const PairedTensor& e);
PairedTensor initial_guess();

// Slice E(:, :, k, l) for 1-based k, l; this is block (k, l) of the unfolding.
CMatrix slice(const PairedTensor& e, int k, int l);
PairedTensor from_slices(const CMatrix& s11, const CMatrix& s21, const CMatrix& s12, const CMatrix& s22);

// Reference values, rounded as printed.
PairedTensor reference_solution();
std::vector<Complex> reference_closed_loop();
inline constexpr double kReferenceResidual = 6.9709e-7;
inline constexpr double kReferenceMinEigenvalue = 0.0063;
inline constexpr double kReferenceKappa1 = 55.0299;
inline constexpr double kReferenceKappa2 = 75.4538;
inline constexpr double kReferenceKappa3 = 123.7297;

struct TableRow {
  double delta;
  double relative_error;  // one random draw; only an upper-bound property is checkable
  double k1d1, k2d2, k3d3;
};
const std::array<TableRow, 3>& reference_table();

// Newton settings of the reference run.
NewtonOptions reference_newton_options();

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Everything checkable on the fixture alone. `seed` drives the perturbation draws.
std::vector<Check> run_checks(std::uint64_t seed);

}  // namespace rtk::example1
