#include "rtk/control.hpp"

#include <algorithm>
#include <cmath>

#include "rtk/spectral.hpp"

namespace rtk {

void MltiSystem::validate() const {
  if (!A.is_square()) fail(ErrorCode::kShapeMismatch, "system tensor A must be square, got " + A.shape().to_string());
  if (B.row_dims() != A.row_dims()) fail(ErrorCode::kShapeMismatch, "B rows must match A, got " + B.shape().to_string());
  if (C.col_dims() != A.row_dims()) fail(ErrorCode::kShapeMismatch, "C columns must match A, got " + C.shape().to_string());
  if (D.row_dims() != C.row_dims() || D.col_dims() != B.col_dims()) {
    fail(ErrorCode::kShapeMismatch, "D must be " + Shape(C.row_dims(), B.col_dims()).to_string() + ", got " +
                                        D.shape().to_string());
  }
}

double sigma_max(const PairedTensor& a) { return spectral_norm(a); }

PairedTensor transfer_function(const MltiSystem& sys, Complex s) {
  sys.validate();
  const CMatrix& a = sys.A.unfolding();
  const CMatrix resolvent = s * CMatrix::Identity(a.rows(), a.cols()) - a;
  Eigen::PartialPivLU<CMatrix> lu(resolvent);
  const double pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(pivot > 1e-12 * std::max(1.0, resolvent.norm()))) {
    fail(ErrorCode::kSingularResolvent, "s is a U-eigenvalue of A");
  }
  CMatrix g = sys.D.unfolding() + sys.C.unfolding() * lu.solve(sys.B.unfolding());
  return PairedTensor(sys.D.shape(), std::move(g));
}

bool is_stable(const MltiSystem& sys) { return is_stable(sys.A); }

bool is_stabilizable(const PairedTensor& a, const PairedTensor& b) {
  if (!a.is_square() || b.row_dims() != a.row_dims()) fail(ErrorCode::kShapeMismatch, "Hautus test: shapes do not conform");
  const Index n = a.unfolding().rows();
  for (const Complex& lambda : u_eigenvalues(a)) {
    if (lambda.real() < 0.0) continue;
    CMatrix h(n, n + b.unfolding().cols());
    h << lambda * CMatrix::Identity(n, n) - a.unfolding(), b.unfolding();
    Eigen::JacobiSVD<CMatrix> svd(h);
    const auto& sv = svd.singularValues();
    const double thr = 1e-10 * sv(0);
    Index rank = 0;
    for (Index k = 0; k < sv.size(); ++k) rank += sv(k) > thr ? 1 : 0;
    if (rank < n) return false;
  }
  return true;
}

bool is_detectable(const PairedTensor& c, const PairedTensor& a) {
  return is_stabilizable(conj_transpose(a), conj_transpose(c));
}

namespace {

struct GammaBlocks {
  PairedTensor a_bar;
  PairedTensor brb;    // B R^{-1} B^H
  PairedTensor c_term; // C^H (I + D R^{-1} D^H) C
};

GammaBlocks gamma_blocks(const MltiSystem& sys, double gamma) {
  sys.validate();
  const double dmax = sigma_max(sys.D);
  if (!(gamma > dmax)) {
    fail(ErrorCode::kGammaTooSmall, "gamma " + std::to_string(gamma) + " must exceed sigma_max(D) = " + std::to_string(dmax));
  }
  const PairedTensor dh = conj_transpose(sys.D);
  const PairedTensor r = Complex(gamma * gamma) * PairedTensor::Identity(sys.D.col_dims()) - dh * sys.D;
  const PairedTensor r_inv = inverse(r);
  GammaBlocks g;
  g.a_bar = sys.A + sys.B * r_inv * dh * sys.C;
  g.brb = hermitian_part(sys.B * r_inv * conj_transpose(sys.B));
  const PairedTensor inner = PairedTensor::Identity(sys.D.row_dims()) + sys.D * r_inv * dh;
  g.c_term = hermitian_part(conj_transpose(sys.C) * inner * sys.C);
  return g;
}

bool axis_free(const PairedTensor& m, double imag_tol) {
  if (imag_tol < 0.0) imag_tol = 1e-8 * spectral_norm(m);
  for (const Complex& z : u_eigenvalues(m)) {
    if (std::abs(z.real()) <= imag_tol) return false;
  }
  return true;
}

}  // namespace

PairedTensor m_gamma(const MltiSystem& sys, double gamma) {
  const GammaBlocks g = gamma_blocks(sys, gamma);
  return hamiltonian_assemble({g.a_bar, g.brb, -g.c_term});
}

std::vector<double> imaginary_axis_frequencies(const MltiSystem& sys, double gamma, double imag_tol) {
  const PairedTensor m = m_gamma(sys, gamma);
  if (imag_tol < 0.0) imag_tol = 1e-8 * spectral_norm(m);
  std::vector<double> out;
  for (const Complex& z : u_eigenvalues(m)) {
    if (std::abs(z.real()) <= imag_tol) out.push_back(z.imag());
  }
  return out;
}

std::vector<double> log_frequency_grid(const MltiSystem& sys, int points) {
  double radius = 0.0;
  for (const Complex& z : u_eigenvalues(sys.A)) radius = std::max(radius, std::abs(z));
  radius = std::max(radius, 1e-6);
  const double lo = std::log10(radius) - 3.0, hi = std::log10(radius) + 3.0;
  std::vector<double> w{0.0};
  for (int k = 0; k < points; ++k) w.push_back(std::pow(10.0, lo + (hi - lo) * k / std::max(1, points - 1)));
  return w;
}

double frequency_sweep(const MltiSystem& sys, const std::vector<double>& omegas) {
  // Real data gives G(-iw) = conj(G(iw)); complex data needs both half axes.
  const auto is_real = [](const PairedTensor& t) { return t.unfolding().imag().isZero(0.0); };
  const bool both = !(is_real(sys.A) && is_real(sys.B) && is_real(sys.C) && is_real(sys.D));
  double best = 0.0;
  for (double w : omegas) {
    best = std::max(best, sigma_max(transfer_function(sys, Complex(0.0, w))));
    if (both && w != 0.0) best = std::max(best, sigma_max(transfer_function(sys, Complex(0.0, -w))));
  }
  return best;
}

HinfResult hinf_norm(const MltiSystem& sys, double rel_tol) {
  sys.validate();
  if (!is_stable(sys.A)) fail(ErrorCode::kUnstableSystem, "H-infinity norm needs a stable A");
  HinfResult out;
  const double dmax = sigma_max(sys.D);
  out.lower = dmax;
  if (sys.B.unfolding().isZero(0.0) || sys.C.unfolding().isZero(0.0)) {
    // G(s) = D at every frequency.
    out.upper = out.value = dmax;
    return out;
  }
  out.upper = std::max(2.0 * frequency_sweep(sys, log_frequency_grid(sys, 64)), 2.0 * dmax + 1e-12);
  for (int k = 0; k < 200 && !axis_free(m_gamma(sys, out.upper), -1.0); ++k) out.upper *= 2.0;
  while (out.upper - out.lower > rel_tol * out.upper) {
    const double mid = 0.5 * (out.lower + out.upper);
    if (axis_free(m_gamma(sys, mid), -1.0)) {
      out.upper = mid;
    } else {
      out.lower = mid;
    }
    ++out.iterations;
  }
  out.value = 0.5 * (out.lower + out.upper);
  return out;
}

ArteProblem bounded_real_riccati(const MltiSystem& sys, double gamma) {
  const GammaBlocks g = gamma_blocks(sys, gamma);
  return ArteProblem{g.a_bar, -g.brb, g.c_term};
}

BrlVerdict bounded_real_check(const MltiSystem& sys, double gamma, double rel_tol) {
  sys.validate();
  if (!is_stable(sys.A)) fail(ErrorCode::kUnstableSystem, "bounded real lemma needs a stable A");
  if (!is_stabilizable(sys.A, sys.B)) fail(ErrorCode::kNotStabilizable, "(A, B) is not stabilizable");
  if (!is_detectable(sys.C, sys.A)) fail(ErrorCode::kNotDetectable, "(C, A) is not detectable");

  BrlVerdict v;
  v.gamma = gamma;
  v.hinf = hinf_norm(sys, rel_tol).value;
  v.norm_below_gamma = v.hinf < gamma;
  if (!(gamma > sigma_max(sys.D))) {
    v.riccati_note = "gamma does not exceed sigma_max(D)";
    return v;
  }
  v.hamiltonian_axis_free = axis_free(m_gamma(sys, gamma), -1.0);
  try {
    const ArteProblem p = bounded_real_riccati(sys, gamma);
    const ArteReport r = arte_schur_solve(p);
    v.riccati_min_eigenvalue = r.psd_certificate;
    v.riccati_residual = r.residual;
    const double scale = std::max(1.0, frobenius_norm(r.E));
    const bool psd = r.psd_certificate >= -1e-8 * scale;
    const bool loop_ok = std::all_of(r.closed_loop_eigenvalues.begin(), r.closed_loop_eigenvalues.end(),
                                     [](const Complex& z) { return z.real() < 0.0; });
    v.riccati_solution = psd && loop_ok;
    if (!psd) v.riccati_note = "Riccati solution is not positive semidefinite";
    if (!loop_ok) v.riccati_note = "closed loop has eigenvalues off the open left half plane";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kImaginaryAxisEigenvalue && e.code() != ErrorCode::kSingularQ1) throw;
    v.riccati_note = e.what();
  }
  return v;
}

LqrResult lqr_gain(const MltiSystem& sys) {
  sys.validate();
  if (!is_stabilizable(sys.A, sys.B)) fail(ErrorCode::kNotStabilizable, "(A, B) is not stabilizable");
  if (!is_detectable(sys.C, sys.A)) fail(ErrorCode::kNotDetectable, "(C, A) is not detectable");
  const ArteProblem p = ArteProblem::from_factors(sys.A, sys.B, sys.C);
  LqrResult out;
  out.report = arte_schur_solve(p);
  out.gain = -(conj_transpose(sys.B) * out.report.E);
  return out;
}

}  // namespace rtk
