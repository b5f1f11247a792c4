#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rtk/tensor.hpp"

namespace rtk {

struct BicgResult {
  int iterations = 0;
  double residual = 0.0;
};

// Unpreconditioned BiCG for op(x) = b with shadow residual conj(r0). `op_h` is the
// adjoint of `op` under <u, v> = sum conj(u) v. Stops once ||b - op(x)||_F <= threshold.
template <typename V, typename Op, typename OpH>
BicgResult bicg(const Op& op, const OpH& op_h, const V& b, V& x, double threshold, int max_iter);

enum class SylvesterMethod { kDirect, kBicg };
enum class LyapunovMethod { kDirect, kBicgTensor, kBicgVec };

std::string_view to_string(LyapunovMethod m);
LyapunovMethod parse_lyapunov_method(std::string_view name);

struct SolveOptions {
  double tol = 1e-10;
  bool relative = true;  // threshold tol * ||rhs||_F, else tol itself
  int max_iter = 0;      // 0 selects 10 |I|^2
  bool check_stability = false;
};

// A * E + E * B = K.
PairedTensor sylvester_solve(const PairedTensor& a, const PairedTensor& b, const PairedTensor& k,
                             SylvesterMethod method = SylvesterMethod::kDirect, const SolveOptions& options = {});

// A^H * E + E * A + Q = O.
PairedTensor lyapunov_solve(const PairedTensor& a, const PairedTensor& q,
                            LyapunovMethod method = LyapunovMethod::kDirect, const SolveOptions& options = {},
                            BicgResult* stats = nullptr);

// exp(t A) by scaling and squaring on the unfolding.
PairedTensor tensor_exponential(const PairedTensor& a, double t = 1.0);

struct ArteProblem {
  PairedTensor A;
  PairedTensor G;
  PairedTensor K;

  static ArteProblem from_factors(const PairedTensor& a, const PairedTensor& b, const PairedTensor& c);
  void validate(double tol = 1e-10) const;
  const Dims& dims() const { return A.row_dims(); }
};

struct ArteResidual {
  PairedTensor f;
  double norm = 0.0;
};

// f(E) = A^H * E + E * A - E * G * E + K.
ArteResidual arte_residual(const ArteProblem& problem, const PairedTensor& e);

// L(dE) = (A - G*E)^H * dE + dE * (A - G*E).
PairedTensor frechet_derivative(const ArteProblem& problem, const PairedTensor& e, const PairedTensor& de);

struct ArteReport {
  PairedTensor E;
  std::string method;
  int iterations = 0;
  double initial_residual = 0.0;
  std::vector<double> residual_history;  // ||f(E_k)||_F after each iteration
  double residual = 0.0;
  std::vector<Complex> closed_loop_eigenvalues;
  double psd_certificate = 0.0;  // smallest eigenvalue of E
  std::vector<int> inner_iterations;
  std::vector<std::string> warnings;
};

struct NewtonOptions {
  LyapunovMethod inner = LyapunovMethod::kDirect;
  double eps = 1e-8;
  double inner_tol = 1e-4;  // absolute, on ||A_k^H X + X A_k + K_k||_F
  int max_iter = 50;
};

ArteReport newton_arte(const ArteProblem& problem, const PairedTensor& e0, const NewtonOptions& options = {});

// Starts from the Schur-Hamiltonian solution when it exists, else from a multiple of I.
ArteReport newton_arte(const ArteProblem& problem, const NewtonOptions& options = {});

ArteReport arte_schur_solve(const ArteProblem& problem);

// Fills residual, eigenvalue and PSD fields of a report from its E.
void finalize_report(const ArteProblem& problem, ArteReport& report);

// ---------------------------------------------------------------------------

inline PairedTensor conj_of(const PairedTensor& x) { return conj(x); }
inline PlainTensor conj_of(const PlainTensor& x) { return PlainTensor(x.dims(), x.data().conjugate()); }

template <typename V, typename Op, typename OpH>
BicgResult bicg(const Op& op, const OpH& op_h, const V& b, V& x, double threshold, int max_iter) {
  BicgResult out;
  V r = b - op(x);
  out.residual = frobenius_norm(r);
  if (out.residual <= threshold) return out;
  V rs = conj_of(r);
  V p = r;
  V ps = rs;
  Complex rho = inner_product(rs, r);
  for (int it = 1; it <= max_iter; ++it) {
    if (rho == Complex(0.0)) fail(ErrorCode::kConvergenceFailure, "BiCG breakdown (rho = 0)");
    const V q = op(p);
    const Complex denom = inner_product(ps, q);
    if (denom == Complex(0.0)) fail(ErrorCode::kConvergenceFailure, "BiCG breakdown (p^H A p = 0)");
    const Complex alpha = rho / denom;
    x += alpha * p;
    r -= alpha * q;
    rs -= std::conj(alpha) * op_h(ps);
    out.iterations = it;
    out.residual = frobenius_norm(r);
    if (out.residual <= threshold) return out;
    const Complex rho_next = inner_product(rs, r);
    const Complex beta = rho_next / rho;
    rho = rho_next;
    p = r + beta * p;
    ps = rs + std::conj(beta) * ps;
  }
  fail(ErrorCode::kConvergenceFailure, "BiCG did not reach " + std::to_string(threshold) + " in " +
                                           std::to_string(max_iter) + " iterations (residual " +
                                           std::to_string(out.residual) + ")");
}

}  // namespace rtk
