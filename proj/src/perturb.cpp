#include "rtk/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "rtk/spectral.hpp"
#include "rtk/structured.hpp"

namespace rtk {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream_a, std::uint64_t stream_b)
    : key_(splitmix(splitmix(splitmix(seed) ^ stream_a) ^ stream_b)) {}

std::uint64_t CounterRng::next_u64() { return splitmix(key_ ^ splitmix(counter_++)); }

double CounterRng::uniform() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double t = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

void PerturbConfig::validate() const {
  if (!(alpha > 0.0 && beta > 0.0) || std::abs(1.0 / (alpha * alpha) + 1.0 / (beta * beta) - 1.0) > 1e-12) {
    fail(ErrorCode::kValidationError, "alpha and beta must satisfy 1/alpha^2 + 1/beta^2 = 1");
  }
}

PairedTensor z_tensor(const ArteProblem& problem, const PairedTensor& e) {
  const PairedTensor ac = problem.A - problem.G * e;
  if (!is_stable(ac)) fail(ErrorCode::kUnstableClosedLoop, "A - G*E is not stable");
  const PairedTensor eye = PairedTensor::Identity(problem.dims());
  return kron(eye, conj_transpose(ac)) + kron(transpose(ac), eye);
}

PairedTensor linear_response(const ArteProblem& problem, const PairedTensor& e, const PairedTensor& da,
                             const PairedTensor& dg, const PairedTensor& dk) {
  const PairedTensor ac = problem.A - problem.G * e;
  const PairedTensor rhs = -(conj_transpose(da) * e) - e * da + e * dg * e - dk;
  return lyapunov_solve(ac, -rhs, LyapunovMethod::kDirect);
}

namespace {

// Z^{-1} times each coefficient tensor of the linearized equation.
struct Coefficients {
  PairedTensor z_inv;
  PairedTensor et_i;   // Z^{-1} (E^T (x) I), acts on vec(dA^H)
  PairedTensor i_e;    // Z^{-1} (I (x) E), acts on vec(dA)
  PairedTensor et_e;   // Z^{-1} (E^T (x) E), acts on vec(dG)
  PairedTensor real_a; // Z^{-1} (I (x) E + (E^T (x) I) P), acts on vec(dA) for real dA
};

Coefficients coefficients(const ArteProblem& problem, const PairedTensor& e) {
  Coefficients c;
  c.z_inv = inverse(z_tensor(problem, e));
  const PairedTensor eye = PairedTensor::Identity(problem.dims());
  const PairedTensor et = transpose(e);
  const PairedTensor et_i = kron(et, eye);
  const PairedTensor i_e = kron(eye, e);
  c.et_i = c.z_inv * et_i;
  c.i_e = c.z_inv * i_e;
  c.et_e = c.z_inv * kron(et, e);
  c.real_a = c.z_inv * (i_e + et_i * transpose_permutation_tensor(problem.dims()));
  return c;
}

}  // namespace

double first_order_bound(const ArteProblem& problem, const PairedTensor& e, const PairedTensor& da,
                         const PairedTensor& dg, const PairedTensor& dk, bool real_delta_A) {
  const Coefficients c = coefficients(problem, e);
  const double a_term = real_delta_A ? spectral_norm(c.real_a) : spectral_norm(c.i_e) + spectral_norm(c.et_i);
  return a_term * frobenius_norm(da) + spectral_norm(c.et_e) * frobenius_norm(dg) +
         spectral_norm(c.z_inv) * frobenius_norm(dk);
}

ConditionNumbers condition_numbers(const ArteProblem& problem, const PairedTensor& e, const PerturbConfig& config) {
  config.validate();
  const Coefficients c = coefficients(problem, e);
  const double na = frobenius_norm(problem.A), ng = frobenius_norm(problem.G), nk = frobenius_norm(problem.K);
  const double ne = frobenius_norm(e);
  if (ne == 0.0) fail(ErrorCode::kValidationError, "condition numbers are undefined for E = O");

  std::vector<PairedTensor> s1, s2;
  if (config.real_delta_A) {
    s1 = {Complex(na) * c.real_a, Complex(ng) * c.et_e, Complex(nk) * c.z_inv};
    s2 = {c.real_a, c.et_e, c.z_inv};
  } else {
    s1 = {Complex(config.alpha * na) * c.et_i, Complex(config.beta * na) * c.i_e, Complex(ng) * c.et_e,
          Complex(nk) * c.z_inv};
    s2 = {Complex(config.alpha) * c.et_i, Complex(config.beta) * c.i_e, c.et_e, c.z_inv};
  }
  ConditionNumbers out;
  out.kappa1_upper = spectral_norm(hconcat(s1, 0)) / ne;
  out.kappa3_upper = spectral_norm(hconcat(s2, 0)) * std::sqrt(na * na + ng * ng + nk * nk) / ne;
  const double a_term = config.real_delta_A ? spectral_norm(c.real_a) : spectral_norm(c.i_e) + spectral_norm(c.et_i);
  out.eta_c = a_term * na + spectral_norm(c.et_e) * ng + spectral_norm(c.z_inv) * nk;
  out.kappa2_upper = std::min(std::sqrt(3.0) * out.kappa1_upper, out.eta_c / ne);
  return out;
}

RelativeSizes relative_sizes(const ArteProblem& problem, const PairedTensor& da, const PairedTensor& dg,
                             const PairedTensor& dk) {
  const double na = frobenius_norm(problem.A), ng = frobenius_norm(problem.G), nk = frobenius_norm(problem.K);
  const double ra = frobenius_norm(da) / na, rg = frobenius_norm(dg) / ng, rk = frobenius_norm(dk) / nk;
  RelativeSizes s;
  s.delta1 = std::sqrt(ra * ra + rg * rg + rk * rk);
  s.delta2 = std::max({ra, rg, rk});
  const double num = std::pow(frobenius_norm(da), 2) + std::pow(frobenius_norm(dg), 2) + std::pow(frobenius_norm(dk), 2);
  s.delta3 = std::sqrt(num / (na * na + ng * ng + nk * nk));
  return s;
}

void draw_perturbation(const ArteProblem& problem, const PerturbConfig& config, double delta, CounterRng& rng,
                       PairedTensor& da, PairedTensor& dg, PairedTensor& dk) {
  const Shape& shape = problem.A.shape();
  da = PairedTensor(shape);
  for (Index c = 0; c < da.unfolding().cols(); ++c) {
    for (Index r = 0; r < da.unfolding().rows(); ++r) {
      const double re = rng.normal();
      const double im = config.real_delta_A ? 0.0 : rng.normal();
      da.unfolding()(r, c) = Complex(re, im);
    }
  }
  const double nd = frobenius_norm(da);
  da *= Complex(nd > 0.0 ? delta * frobenius_norm(problem.A) / nd : 0.0);
  dg = PairedTensor(shape);
  dg.at(config.delta_g_entry) = delta;
  dk = PairedTensor(shape);
  dk.at(config.delta_k_entry) = delta;
}

PerturbReport random_perturbation_suite(const ArteProblem& problem, const PairedTensor& e,
                                        const PerturbConfig& config, int trials, std::uint64_t seed) {
  config.validate();
  PerturbReport report;
  report.seed = seed;
  report.Z = z_tensor(problem, e);
  report.kappa = condition_numbers(problem, e, config);
  const double ne = frobenius_norm(e);
  NewtonOptions newton;
  newton.eps = 1e-12;
  newton.inner = LyapunovMethod::kDirect;

  for (std::size_t d = 0; d < config.delta_scales.size(); ++d) {
    const double delta = config.delta_scales[d];
    for (int t = 0; t < trials; ++t) {
      CounterRng rng(seed, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(d));
      PerturbSample s;
      s.delta = delta;
      s.trial = t;
      PairedTensor da, dg, dk;
      draw_perturbation(problem, config, delta, rng, da, dg, dk);
      if (delta == 0.0) {
        s.ok = true;
        report.samples.push_back(s);
        continue;
      }
      try {
        ArteProblem perturbed{problem.A + da, problem.G + dg, problem.K + dk};
        const ArteReport r = newton_arte(perturbed, e, newton);
        const PairedTensor de = r.E - e;
        s.de_norm = frobenius_norm(de);
        s.relative_error = s.de_norm / ne;
        s.sizes = relative_sizes(problem, da, dg, dk);
        s.ratio1 = s.relative_error / s.sizes.delta1;
        s.ratio2 = s.relative_error / s.sizes.delta2;
        s.ratio3 = s.relative_error / s.sizes.delta3;
        s.first_order_bound = first_order_bound(problem, e, da, dg, dk, config.real_delta_A);
        s.ok = true;
      } catch (const Error& err) {
        s.message = err.what();
        ++report.failures;
      }
      report.samples.push_back(s);
    }
  }
  return report;
}

void write_perturbation_csv(const PerturbReport& report, std::ostream& os) {
  os << "delta,trial,dE_norm,delta1,delta2,delta3,ratio1,ratio2,ratio3\n";
  os << std::setprecision(10);
  for (const auto& s : report.samples) {
    if (!s.ok) continue;
    os << s.delta << ',' << s.trial << ',' << s.de_norm << ',' << s.sizes.delta1 << ',' << s.sizes.delta2 << ','
       << s.sizes.delta3 << ',' << s.ratio1 << ',' << s.ratio2 << ',' << s.ratio3 << '\n';
  }
}

}  // namespace rtk
