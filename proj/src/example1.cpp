#include "rtk/example1.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "rtk/perturb.hpp"
#include "rtk/spectral.hpp"

namespace rtk::example1 {

namespace {

CMatrix mat(Index rows, Index cols, std::initializer_list<double> values) {
  CMatrix m(rows, cols);
  auto it = values.begin();
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) m(r, c) = *it++;
  }
  return m;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

GcpdTensor gcpd_A() {
  return GcpdTensor({{mat(3, 3, {0, 1, 0, 0, 0, 1, 0.2, 0.5, 0.8}), mat(2, 2, {0, 1, 0.5, 0})}});
}
GcpdTensor gcpd_B() { return GcpdTensor({{mat(3, 1, {0, 0, 1}), mat(2, 1, {0, 1})}}); }
GcpdTensor gcpd_C() { return GcpdTensor({{mat(1, 3, {1, 0, 0}), mat(1, 2, {1, 0})}}); }

MltiSystem system() {
  const PairedTensor b = densify(gcpd_B()), c = densify(gcpd_C());
  return MltiSystem{densify(gcpd_A()), b, c, PairedTensor(Shape(c.row_dims(), b.col_dims()))};
}

MltiSystem closed_loop_system(const PairedTensor& e) {
  MltiSystem s = system();
  s.A = s.A - s.B * conj_transpose(s.B) * e;
  return s;
}

ArteProblem problem() {
  const MltiSystem s = system();
  return ArteProblem::from_factors(s.A, s.B, s.C);
}

CMatrix slice(const PairedTensor& e, int k, int l) {
  return e.unfolding().block(3 * (k - 1), 3 * (l - 1), 3, 3);
}

PairedTensor from_slices(const CMatrix& s11, const CMatrix& s21, const CMatrix& s12, const CMatrix& s22) {
  CMatrix m(6, 6);
  m << s11, s12, s21, s22;
  return PairedTensor(Shape::square({3, 2}), std::move(m));
}

PairedTensor initial_guess() {
  return from_slices(mat(3, 3, {10, 0, 0, 0, 4, 0, 0, 0, 13}), mat(3, 3, {0, 0, 0, 0, 0, 0, 1, 0, 5}),
                     mat(3, 3, {0, 0, 1, 0, 0, 0, 0, 0, 5}), mat(3, 3, {7, 0, 1, 0, 21, 5, 1, 5, 4}));
}

PairedTensor reference_solution() {
  return from_slices(mat(3, 3, {4.8082, -0.2001, 3.9671, -0.2001, 1.5958, -3.3882, 3.9671, -3.3882, 18.7381}),
                     mat(3, 3, {-0.5391, -0.0033, 1.5582, 10.0971, -4.2223, 25.4769, 1.1050, 0.0067, 5.4633}),
                     mat(3, 3, {-0.5391, 10.0971, 1.1050, -0.0033, -4.2223, 0.0067, 1.5582, 25.4769, 5.4633}),
                     mat(3, 3, {0.9711, 0.4996, 0.7895, 0.4996, 41.7634, 6.7580, 0.7895, 6.7580, 2.9588}));
}

std::vector<Complex> reference_closed_loop() {
  return {{-1.0165, 0.1846}, {-1.0165, -0.1846}, {-0.4144, 0.4918},
          {-0.4144, -0.4918}, {-0.0485, 0.3339}, {-0.0485, -0.3339}};
}

const std::array<TableRow, 3>& reference_table() {
  static const std::array<TableRow, 3> rows{{
      {1e-8, 4.0547e-8, 9.5314e-7, 7.5453e-7, 1.2373e-6},
      {2e-7, 2.2174e-6, 1.9062e-5, 1.5090e-5, 2.4747e-5},
      {3e-6, 3.4478e-5, 2.8594e-4, 2.2636e-4, 3.7121e-4},
  }};
  return rows;
}

NewtonOptions reference_newton_options() {
  NewtonOptions o;
  o.inner = LyapunovMethod::kBicgTensor;
  o.inner_tol = 1e-4;
  o.eps = 1e-6;
  return o;
}

std::vector<Check> run_checks(std::uint64_t seed) {
  std::vector<Check> out;
  const ArteProblem p = problem();

  const auto t0 = std::chrono::steady_clock::now();
  const ArteReport newton = newton_arte(p, initial_guess(), reference_newton_options());
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const PairedTensor& e = newton.E;

  {
    const double err = (e.unfolding() - reference_solution().unfolding()).cwiseAbs().maxCoeff();
    out.push_back({"solution slices", err <= 5e-3, fmt("max elementwise deviation %.3e (tol 5e-3)", err)});
    out.push_back({"final residual", newton.residual <= 1e-4,
                   fmt("%.4e after %.0f Newton steps (tol 1e-4)", newton.residual, newton.iterations)});
    const double ratio = newton.residual / kReferenceResidual;
    out.push_back({"residual scale", ratio >= 0.1 && ratio <= 10.0,
                   fmt("%.4e vs reference %.4e (ratio %.3f)", newton.residual, kReferenceResidual, ratio)});
    out.push_back({"runtime", seconds < 10.0, fmt("%.3f s (limit 10 s)", seconds)});
  }
  {
    const double d = multiset_distance(newton.closed_loop_eigenvalues, reference_closed_loop());
    out.push_back({"closed-loop spectrum", d <= 1e-3, fmt("max matched deviation %.3e (tol 1e-3)", d)});
  }
  {
    const double dense = is_positive_semidefinite(e).min_eigenvalue;
    bool ok = std::abs(dense - kReferenceMinEigenvalue) <= 1e-3;
    std::string detail = fmt("dense %.6f", dense);
    try {
      const EigenPair rq = rayleigh_quotient_extreme(e, Extreme::kSmallest);
      ok = ok && std::abs(rq.eigenvalue - kReferenceMinEigenvalue) <= 1e-3;
      detail += fmt(", Rayleigh quotient %.6f (reference %.4f, tol 1e-3)", rq.eigenvalue, kReferenceMinEigenvalue);
    } catch (const Error& err) {
      ok = false;
      detail += std::string(", Rayleigh quotient failed: ") + err.what();
    }
    out.push_back({"smallest eigenvalue", ok, detail});
  }

  PerturbConfig config;
  const ConditionNumbers kappa = condition_numbers(p, e, config);
  {
    const double r1 = rel(kappa.kappa1_upper, kReferenceKappa1), r2 = rel(kappa.kappa2_upper, kReferenceKappa2),
                 r3 = rel(kappa.kappa3_upper, kReferenceKappa3);
    out.push_back({"condition bounds", r1 <= 0.01 && r2 <= 0.01 && r3 <= 0.01,
                   fmt("kappa1 %.4f, kappa2 %.4f, ", kappa.kappa1_upper, kappa.kappa2_upper) +
                       fmt("kappa3 %.4f; max relative deviation %.2e (tol 1e-2)", kappa.kappa3_upper,
                           std::max({r1, r2, r3}))});
  }
  {
    double worst = 0.0;
    for (const TableRow& row : reference_table()) {
      worst = std::max({worst, rel(kappa.kappa1_upper * std::sqrt(3.0) * row.delta, row.k1d1),
                        rel(kappa.kappa2_upper * row.delta, row.k2d2), rel(kappa.kappa3_upper * row.delta, row.k3d3)});
    }
    out.push_back({"table bound columns", worst <= 0.01, fmt("max relative deviation %.2e (tol 1e-2)", worst)});

    config.delta_scales.clear();
    for (const TableRow& row : reference_table()) config.delta_scales.push_back(row.delta);
    bool ok = true;
    double worst_ratio = 0.0;
    for (std::uint64_t s = seed; s < seed + 3; ++s) {
      const PerturbReport r = random_perturbation_suite(p, e, config, 1, s);
      ok = ok && r.failures == 0;
      for (const PerturbSample& smp : r.samples) {
        const double bound = std::min({kappa.kappa1_upper * smp.sizes.delta1, kappa.kappa2_upper * smp.sizes.delta2,
                                       kappa.kappa3_upper * smp.sizes.delta3});
        worst_ratio = std::max(worst_ratio, smp.relative_error / bound);
        ok = ok && smp.ok && smp.relative_error < bound;
      }
    }
    out.push_back({"observed errors below bounds", ok,
                   fmt("largest error/bound ratio %.3f over 3 seeds", worst_ratio)});
  }
  {
    NewtonOptions tight;
    tight.eps = 1e-12;
    const ArteReport n = newton_arte(p, initial_guess(), tight);
    const ArteReport s = arte_schur_solve(p);
    const double d = frobenius_norm(n.E - s.E) / frobenius_norm(s.E);
    out.push_back({"Newton and Schur agree", d <= 1e-5, fmt("relative difference %.3e (tol 1e-5)", d)});
  }
  {
    // A itself is unstable, so the norm is taken on the optimal closed loop.
    const MltiSystem cl = closed_loop_system(e);
    std::vector<double> grid;
    for (int k = 0; k < 10000; ++k) grid.push_back(std::pow(10.0, -4.0 + 8.0 * k / 9999.0));
    grid.insert(grid.begin(), 0.0);
    const double sweep = frequency_sweep(cl, grid);
    const HinfResult h = hinf_norm(cl);
    const double r = rel(h.value, sweep);
    const BrlVerdict above = bounded_real_check(cl, 2.0 * sweep);
    const BrlVerdict below = bounded_real_check(cl, 0.5 * sweep);
    const bool ok = r <= 1e-3 && above.consistent() && above.norm_below_gamma && below.consistent();
    out.push_back({"H-infinity norm", ok,
                   fmt("bisection %.6f, sweep %.6f, relative gap %.2e; ", h.value, sweep, r) +
                       "bounded-real verdicts " + (above.consistent() && below.consistent() ? "agree" : "disagree")});
  }
  return out;
}

}  // namespace rtk::example1
