#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rtk/equations.hpp"
#include "rtk/tensor.hpp"

namespace rtk {

// Counter-based generator: output k of stream (seed, a, b) is a fixed function of all four.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream_a = 0, std::uint64_t stream_b = 0);

  std::uint64_t next_u64();
  double uniform();  // in (0, 1]
  double normal();   // Box-Muller

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct PerturbConfig {
  double alpha = 1.4142135623730951;
  double beta = 1.4142135623730951;
  bool real_delta_A = true;
  std::vector<double> delta_scales;
  std::vector<Index> delta_g_entry{0, 0, 0, 0};  // interleaved, 0-based
  std::vector<Index> delta_k_entry{2, 2, 1, 1};

  void validate() const;
};

// Z = I (x) (A - G*E)^H + (A - G*E)^T (x) I.
PairedTensor z_tensor(const ArteProblem& problem, const PairedTensor& e);

// First-order response: solves (A - G E)^H dE + dE (A - G E) = -dA^H E - E dA + E dG E - dK.
PairedTensor linear_response(const ArteProblem& problem, const PairedTensor& e, const PairedTensor& da,
                             const PairedTensor& dg, const PairedTensor& dk);

double first_order_bound(const ArteProblem& problem, const PairedTensor& e, const PairedTensor& da,
                         const PairedTensor& dg, const PairedTensor& dk, bool real_delta_A);

struct ConditionNumbers {
  double kappa1_upper = 0.0;
  double kappa2_upper = 0.0;
  double kappa3_upper = 0.0;
  double eta_c = 0.0;
};

ConditionNumbers condition_numbers(const ArteProblem& problem, const PairedTensor& e, const PerturbConfig& config);

struct RelativeSizes {
  double delta1 = 0.0;  // Frobenius norm of the three relative errors
  double delta2 = 0.0;  // their maximum
  double delta3 = 0.0;  // stacked-norm ratio
};

RelativeSizes relative_sizes(const ArteProblem& problem, const PairedTensor& da, const PairedTensor& dg,
                             const PairedTensor& dk);

struct PerturbSample {
  double delta = 0.0;
  int trial = 0;
  bool ok = false;
  std::string message;
  double de_norm = 0.0;
  double relative_error = 0.0;  // ||dE||_F / ||E||_F
  RelativeSizes sizes;
  double ratio1 = 0.0, ratio2 = 0.0, ratio3 = 0.0;  // ||dE||_F / (Delta_i ||E||_F)
  double first_order_bound = 0.0;
};

struct PerturbReport {
  PairedTensor Z;
  ConditionNumbers kappa;
  std::uint64_t seed = 0;
  int failures = 0;
  std::vector<PerturbSample> samples;
};

// Draws the perturbation triple for one (delta, trial) pair.
void draw_perturbation(const ArteProblem& problem, const PerturbConfig& config, double delta, CounterRng& rng,
                       PairedTensor& da, PairedTensor& dg, PairedTensor& dk);

PerturbReport random_perturbation_suite(const ArteProblem& problem, const PairedTensor& e,
                                        const PerturbConfig& config, int trials, std::uint64_t seed);

void write_perturbation_csv(const PerturbReport& report, std::ostream& os);

}  // namespace rtk
