#include "rtk/equations.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

#include "rtk/spectral.hpp"
#include "rtk/structured.hpp"

namespace rtk {

std::string_view to_string(LyapunovMethod m) {
  switch (m) {
    case LyapunovMethod::kDirect: return "direct";
    case LyapunovMethod::kBicgTensor: return "bicg-tensor";
    case LyapunovMethod::kBicgVec: return "bicg-vec";
  }
  return "direct";
}

LyapunovMethod parse_lyapunov_method(std::string_view name) {
  if (name == "direct") return LyapunovMethod::kDirect;
  if (name == "bicg-tensor" || name == "bicg") return LyapunovMethod::kBicgTensor;
  if (name == "bicg-vec") return LyapunovMethod::kBicgVec;
  fail(ErrorCode::kValidationError, "unknown inner method '" + std::string(name) + "'");
}

namespace {

int default_max_iter(const SolveOptions& options, Index unknowns) {
  return options.max_iter > 0 ? options.max_iter : static_cast<int>(10 * unknowns);
}

double threshold(const SolveOptions& options, double rhs_norm) {
  return options.relative ? options.tol * rhs_norm : options.tol;
}

void require_square(const PairedTensor& a, const char* what) {
  if (!a.is_square()) fail(ErrorCode::kShapeMismatch, std::string(what) + ": " + a.shape().to_string() + " is not square");
}

}  // namespace

PairedTensor sylvester_solve(const PairedTensor& a, const PairedTensor& b, const PairedTensor& k,
                             SylvesterMethod method, const SolveOptions& options) {
  require_square(a, "sylvester_solve");
  require_square(b, "sylvester_solve");
  if (k.row_dims() != a.row_dims() || k.col_dims() != b.row_dims()) {
    fail(ErrorCode::kShapeMismatch, "sylvester_solve: K has shape " + k.shape().to_string());
  }
  if (method == SylvesterMethod::kDirect) {
    const auto la = u_eigenvalues(a);
    const auto lb = u_eigenvalues(b);
    const double scale = std::max(1.0, spectral_norm(a) + spectral_norm(b));
    for (const Complex& x : la) {
      for (const Complex& y : lb) {
        if (std::abs(x + y) <= 1e-10 * scale) {
          fail(ErrorCode::kNoUniqueSolution, "A and -B share the eigenvalue " + std::to_string(x.real()) + "+" +
                                                 std::to_string(x.imag()) + "i");
        }
      }
    }
    const PairedTensor z = kron(PairedTensor::Identity(b.row_dims()), a) + kron(transpose(b), PairedTensor::Identity(a.row_dims()));
    try {
      return unvec(solve(z, vec(k)), k.shape());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kSingularTensor) fail(ErrorCode::kNoUniqueSolution, e.what());
      throw;
    }
  }
  const PairedTensor ah = conj_transpose(a), bh = conj_transpose(b);
  auto op = [&](const PairedTensor& x) { return a * x + x * b; };
  auto op_h = [&](const PairedTensor& y) { return ah * y + y * bh; };
  PairedTensor x = PairedTensor::Zero(k.shape());
  const Index n = k.shape().rows() * k.shape().cols();
  bicg(op, op_h, k, x, threshold(options, frobenius_norm(k)), default_max_iter(options, n));
  return x;
}

PairedTensor lyapunov_solve(const PairedTensor& a, const PairedTensor& q, LyapunovMethod method,
                            const SolveOptions& options, BicgResult* stats) {
  require_square(a, "lyapunov_solve");
  if (q.shape() != a.shape()) fail(ErrorCode::kShapeMismatch, "lyapunov_solve: Q has shape " + q.shape().to_string());
  if (options.check_stability && !is_stable(a)) {
    fail(ErrorCode::kUnstableCoefficient, "coefficient tensor has a U-eigenvalue with nonnegative real part");
  }
  const PairedTensor ah = conj_transpose(a);
  const double thr = threshold(options, frobenius_norm(q));
  const Index n = a.shape().rows();
  BicgResult local;
  BicgResult& st = stats ? *stats : local;
  switch (method) {
    case LyapunovMethod::kDirect: {
      st = {};
      return sylvester_solve(ah, a, -q, SylvesterMethod::kDirect, options);
    }
    case LyapunovMethod::kBicgTensor: {
      auto op = [&](const PairedTensor& x) { return ah * x + x * a; };
      auto op_h = [&](const PairedTensor& y) { return a * y + y * ah; };
      PairedTensor x = PairedTensor::Zero(a.shape());
      st = bicg(op, op_h, PairedTensor(-q), x, thr, default_max_iter(options, n * n));
      return x;
    }
    case LyapunovMethod::kBicgVec: {
      const PairedTensor eye = PairedTensor::Identity(a.row_dims());
      const PairedTensor z = kron(eye, ah) + kron(transpose(a), eye);
      const PairedTensor zh = conj_transpose(z);
      auto op = [&](const PlainTensor& x) { return z * x; };
      auto op_h = [&](const PlainTensor& y) { return zh * y; };
      PlainTensor x = PlainTensor::Zero(z.col_dims());
      st = bicg(op, op_h, vec(-q), x, thr, default_max_iter(options, n * n));
      return unvec(x, a.shape());
    }
  }
  return PairedTensor();
}

PairedTensor tensor_exponential(const PairedTensor& a, double t) {
  require_square(a, "tensor_exponential");
  const CMatrix m = (Complex(t) * a.unfolding()).exp();
  return PairedTensor(a.shape(), m);
}

ArteProblem ArteProblem::from_factors(const PairedTensor& a, const PairedTensor& b, const PairedTensor& c) {
  ArteProblem p{a, b * conj_transpose(b), conj_transpose(c) * c};
  p.G = hermitian_part(p.G);
  p.K = hermitian_part(p.K);
  p.validate();
  return p;
}

void ArteProblem::validate(double tol) const {
  if (!A.is_square()) fail(ErrorCode::kShapeMismatch, "ARTE coefficient A must be square, got " + A.shape().to_string());
  if (G.shape() != A.shape() || K.shape() != A.shape()) {
    fail(ErrorCode::kShapeMismatch, "ARTE tensors A, G, K must share a shape");
  }
  if (!is_hermitian(G, tol)) fail(ErrorCode::kNotHermitian, "G is not Hermitian");
  if (!is_hermitian(K, tol)) fail(ErrorCode::kNotHermitian, "K is not Hermitian");
}

ArteResidual arte_residual(const ArteProblem& problem, const PairedTensor& e) {
  ArteResidual r;
  r.f = conj_transpose(problem.A) * e + e * problem.A - e * problem.G * e + problem.K;
  r.norm = frobenius_norm(r.f);
  return r;
}

PairedTensor frechet_derivative(const ArteProblem& problem, const PairedTensor& e, const PairedTensor& de) {
  const PairedTensor ac = problem.A - problem.G * e;
  return conj_transpose(ac) * de + de * ac;
}

void finalize_report(const ArteProblem& problem, ArteReport& report) {
  report.residual = arte_residual(problem, report.E).norm;
  report.closed_loop_eigenvalues = u_eigenvalues(problem.A - problem.G * report.E);
  DenseMatrix<Complex> h = (report.E.unfolding() + report.E.unfolding().adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h, Eigen::EigenvaluesOnly);
  report.psd_certificate = eig.eigenvalues()(0);
}

ArteReport newton_arte(const ArteProblem& problem, const PairedTensor& e0, const NewtonOptions& options) {
  problem.validate();
  if (e0.shape() != problem.A.shape()) fail(ErrorCode::kShapeMismatch, "E0 has shape " + e0.shape().to_string());
  if (!is_hermitian(e0, 1e-8)) fail(ErrorCode::kNotHermitian, "E0 must be Hermitian");

  ArteReport report;
  report.method = "newton";
  if (!is_stable(problem.A - problem.G * e0)) {
    report.warnings.push_back("A - G*E0 is not stable; convergence is not guaranteed");
  }
  PairedTensor e = hermitian_part(e0);
  report.initial_residual = arte_residual(problem, e).norm;
  SolveOptions inner;
  inner.tol = options.inner_tol;
  inner.relative = false;

  double res = report.initial_residual;
  for (int k = 0; k < options.max_iter && !(res < options.eps); ++k) {
    const PairedTensor ak = problem.A - problem.G * e;
    const PairedTensor kk = conj_transpose(e) * problem.G * e + problem.K;
    BicgResult st;
    try {
      e = hermitian_part(lyapunov_solve(ak, kk, options.inner, inner, &st));
    } catch (const Error& err) {
      fail(err.code(), "Newton iteration " + std::to_string(k + 1) + ": " + err.what());
    }
    res = arte_residual(problem, e).norm;
    report.residual_history.push_back(res);
    report.inner_iterations.push_back(st.iterations);
    report.iterations = k + 1;
  }
  if (!(res < options.eps)) {
    fail(ErrorCode::kMaxIterationsExceeded, "Newton stopped after " + std::to_string(report.iterations) +
                                                " iterations at residual " + std::to_string(res));
  }
  report.E = e;
  finalize_report(problem, report);
  return report;
}

ArteReport newton_arte(const ArteProblem& problem, const NewtonOptions& options) {
  PairedTensor e0;
  std::string note;
  try {
    e0 = arte_schur_solve(problem).E;
  } catch (const Error&) {
    const double beta = 10.0 * std::max(1.0, spectral_norm(problem.A));
    e0 = Complex(beta) * PairedTensor::Identity(problem.dims());
    note = "default start beta*I is not certified stabilizing";
  }
  ArteReport r = newton_arte(problem, e0, options);
  if (!note.empty()) r.warnings.push_back(note);
  return r;
}

ArteReport arte_schur_solve(const ArteProblem& problem) {
  problem.validate();
  const PairedTensor m = hamiltonian_assemble({problem.A, problem.G, problem.K});
  const SchurHamiltonian sh = schur_hamiltonian(m);
  Eigen::JacobiSVD<CMatrix> svd(sh.Q1.unfolding());
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-10 * std::max(1.0, sv(0))) {
    fail(ErrorCode::kSingularQ1, "Q1 is singular; stabilizability or detectability fails");
  }
  ArteReport report;
  report.method = "schur";
  report.E = hermitian_part(sh.Q2 * inverse(sh.Q1));
  finalize_report(problem, report);
  report.initial_residual = report.residual;
  report.residual_history.push_back(report.residual);
  return report;
}

}  // namespace rtk
