#include "rtk/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rtk {

namespace {

void require_square(const PairedTensor& a, const char* what) {
  if (!a.is_square()) fail(ErrorCode::kShapeMismatch, std::string(what) + " needs row_dims == col_dims, got " + a.shape().to_string());
}

void sort_by_real_desc(std::vector<Complex>& v) {
  std::stable_sort(v.begin(), v.end(), [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
}

}  // namespace

std::vector<Complex> u_eigenvalues(const PairedTensor& a) {
  require_square(a, "u_eigenvalues");
  Eigen::ComplexEigenSolver<CMatrix> solver(a.unfolding(), false);
  if (solver.info() != Eigen::Success) fail(ErrorCode::kConvergenceFailure, "eigenvalue iteration did not converge");
  std::vector<Complex> out(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
  sort_by_real_desc(out);
  return out;
}

bool is_stable(const std::vector<Complex>& eigenvalues) {
  return std::all_of(eigenvalues.begin(), eigenvalues.end(), [](const Complex& z) { return z.real() < 0.0; });
}

bool is_stable(const PairedTensor& a) { return is_stable(u_eigenvalues(a)); }

double multiset_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const Complex& x : a) {
    std::size_t best = b.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (used[k]) continue;
      const double d = std::abs(x - b[k]);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_d);
  }
  return worst;
}

TensorSchur tensor_schur(const PairedTensor& a) {
  require_square(a, "tensor_schur");
  Eigen::ComplexSchur<CMatrix> schur(a.unfolding(), true);
  if (schur.info() != Eigen::Success) fail(ErrorCode::kConvergenceFailure, "Schur iteration did not converge");
  TensorSchur out;
  out.Q = PairedTensor(a.shape(), schur.matrixU());
  CMatrix t = schur.matrixT().triangularView<Eigen::Upper>();
  out.T = PairedTensor(a.shape(), t);
  for (Index k = 0; k < t.rows(); ++k) out.eigenvalues.push_back(t(k, k));
  return out;
}

TensorSvd tensor_svd(const PairedTensor& a) {
  Eigen::JacobiSVD<CMatrix> svd(a.unfolding(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  TensorSvd out;
  out.U = PairedTensor(Shape::square(a.row_dims()), svd.matrixU());
  out.V = PairedTensor(Shape::square(a.col_dims()), svd.matrixV());
  CMatrix d = CMatrix::Zero(a.unfolding().rows(), a.unfolding().cols());
  for (Index k = 0; k < svd.singularValues().size(); ++k) {
    d(k, k) = svd.singularValues()(k);
    out.singular_values.push_back(svd.singularValues()(k));
  }
  out.D = PairedTensor(a.shape(), d);
  return out;
}

EigenPair rayleigh_quotient_extreme(const PairedTensor& a, Extreme which, const std::optional<PlainTensor>& x0,
                                    const RayleighOptions& options) {
  require_square(a, "rayleigh_quotient_extreme");
  if (!is_hermitian(a)) fail(ErrorCode::kNotHermitian, "Rayleigh quotient iteration needs a Hermitian tensor");
  const double sign = which == Extreme::kSmallest ? 1.0 : -1.0;
  // Work with sign * A so that the target is always the smallest eigenvalue.
  const PairedTensor b = sign == 1.0 ? a : -a;
  const double scale = std::max(spectral_norm(a), std::numeric_limits<double>::min());
  const double stop = options.tol * scale;

  PlainTensor x = x0 ? *x0 : PlainTensor::Constant(a.row_dims(), Complex(1.0));
  if (x.dims() != a.row_dims()) fail(ErrorCode::kShapeMismatch, "start tensor does not match the tensor's dims");
  double nx = frobenius_norm(x);
  if (nx == 0.0) fail(ErrorCode::kShapeMismatch, "start tensor must be nonzero");
  x /= Complex(nx);

  auto rq = [&](const PlainTensor& v) { return inner_product(v, b * v).real(); };
  auto residual = [&](const PlainTensor& v, double rho) { return frobenius_norm(b * v - Complex(rho) * v); };

  EigenPair out;
  // Locally optimal descent on span{x, r, p}.
  PlainTensor p = PlainTensor::Zero(x.dims());
  bool have_p = false;
  double rho = rq(x);
  const double warm_stop = std::sqrt(options.tol) * scale;
  for (int it = 0; it < options.warmup_iter; ++it) {
    PlainTensor r = b * x - Complex(rho) * x;
    if (frobenius_norm(r) <= warm_stop) break;
    std::vector<CVector> basis{x.data()};
    auto add = [&](CVector v) {
      for (const auto& q : basis) v -= q * q.dot(v);
      for (const auto& q : basis) v -= q * q.dot(v);
      const double n = v.norm();
      if (n > 1e-10) basis.push_back(v / n);
    };
    add(r.data());
    if (have_p) add(p.data());
    const Index k = static_cast<Index>(basis.size());
    CMatrix v(x.size(), k);
    for (Index c = 0; c < k; ++c) v.col(c) = basis[c];
    CMatrix h = v.adjoint() * b.unfolding() * v;
    h = (h + h.adjoint()).eval() / 2.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
    CVector y = eig.eigenvectors().col(0);
    CVector xn = v * y;
    CVector pn = v.rightCols(k - 1) * y.tail(k - 1);
    x = PlainTensor(x.dims(), xn / xn.norm());
    p = PlainTensor(x.dims(), pn);
    have_p = pn.norm() > 0.0;
    rho = rq(x);
    ++out.iterations;
  }

  // Rayleigh quotient iteration.
  const PairedTensor eye = PairedTensor::Identity(a.row_dims());
  double res = residual(x, rho);
  for (int it = 0; it < options.max_iter && res > stop; ++it) {
    PlainTensor y;
    // A shift that hits an eigenvalue to working precision is nudged off it;
    // the nearly singular solve still points along the eigentensor.
    for (double nudge = 0.0;; nudge = nudge == 0.0 ? 1e-13 * scale : 10.0 * nudge) {
      try {
        y = solve(b - Complex(rho + nudge) * eye, x);
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kSingularTensor || nudge > 1e-6 * scale) throw;
      }
    }
    x = y / Complex(frobenius_norm(y));
    rho = rq(x);
    res = residual(x, rho);
    ++out.iterations;
  }
  if (res > stop) {
    fail(ErrorCode::kConvergenceFailure, "Rayleigh quotient iteration stalled at residual " + std::to_string(res));
  }
  out.eigenvalue = sign * rho;
  out.eigentensor = x;
  out.residual = res;
  return out;
}

PairedTensor j_tensor(const Dims& dims) {
  const PairedTensor eye = PairedTensor::Identity(dims);
  const PairedTensor zero = PairedTensor::Zero(Shape::square(dims));
  return block2x2(zero, eye, -eye, zero, 0);
}

Dims half_dims(const Shape& shape) {
  if (!shape.is_square() || shape.row_dims[0] % 2 != 0) {
    fail(ErrorCode::kShapeMismatch, "expected a square tensor with even first mode, got " + shape.to_string());
  }
  Dims d = shape.row_dims;
  d[0] /= 2;
  return d;
}

PairedTensor hamiltonian_assemble(const HamiltonianBlocks& blocks, double tol) {
  const Shape& s = blocks.A.shape();
  if (!s.is_square() || blocks.G.shape() != s || blocks.K.shape() != s) {
    fail(ErrorCode::kShapeMismatch, "Hamiltonian blocks must share one square shape");
  }
  if (!is_hermitian(blocks.G, tol) || !is_hermitian(blocks.K, tol)) {
    fail(ErrorCode::kNotHermitianBlocks, "G and K must be Hermitian");
  }
  return block2x2(blocks.A, blocks.G, blocks.K, -conj_transpose(blocks.A), 0);
}

bool hamiltonian_check(const PairedTensor& m, double tol) {
  const PairedTensor jm = j_tensor(half_dims(m.shape())) * m;
  return frobenius_norm(conj_transpose(jm) - jm) <= tol * std::max(frobenius_norm(jm), 1.0);
}

bool symplectic_check(const PairedTensor& s, double tol) {
  const PairedTensor j = j_tensor(half_dims(s.shape()));
  return frobenius_norm(conj_transpose(s) * j * s - j) <= tol * frobenius_norm(j);
}

SchurHamiltonian schur_hamiltonian(const PairedTensor& m, double imag_tol) {
  const Dims half = half_dims(m.shape());
  const Index n = numel(half);
  if (imag_tol < 0.0) imag_tol = 1e-8 * spectral_norm(m);

  // Bring M to the block layout [[A, G], [K, -A^H]] of the unfolding.
  const CMatrix p = shuffle_permutation(0, half).cast<Complex>();
  const CMatrix h = p.transpose() * m.unfolding() * p;

  Eigen::ComplexSchur<CMatrix> schur(h, true);
  if (schur.info() != Eigen::Success) fail(ErrorCode::kConvergenceFailure, "Schur iteration did not converge");
  CMatrix t = schur.matrixT().triangularView<Eigen::Upper>();
  CMatrix u = schur.matrixU();
  for (Index k = 0; k < t.rows(); ++k) {
    if (std::abs(t(k, k).real()) <= imag_tol) {
      fail(ErrorCode::kImaginaryAxisEigenvalue,
           "eigenvalue " + std::to_string(t(k, k).real()) + (t(k, k).imag() < 0 ? "" : "+") +
               std::to_string(t(k, k).imag()) + "i lies on the imaginary axis");
    }
  }
  const Index stable = reorder_schur(t, u, [](const Complex& z) { return z.real() < 0.0; });
  if (stable != n) {
    fail(ErrorCode::kImaginaryAxisEigenvalue, "expected " + std::to_string(n) + " stable eigenvalues, found " +
                                                   std::to_string(stable));
  }

  const CMatrix w1 = u.topLeftCorner(n, n);
  const CMatrix w2 = u.bottomLeftCorner(n, n);
  CMatrix q(2 * n, 2 * n);
  q << w1, -w2, w2, w1;

  SchurHamiltonian out;
  out.Q = PairedTensor(m.shape(), p * q * p.transpose());
  out.Q1 = PairedTensor(Shape::square(half), w1);
  out.Q2 = PairedTensor(Shape::square(half), -w2);
  const PairedTensor x = conj_transpose(out.Q) * m * out.Q;
  out.T = block_of_2x2(x, 0, 0, 0);
  out.R = block_of_2x2(x, 0, 0, 1);
  for (Index k = 0; k < n; ++k) out.eigenvalues.push_back(t(k, k));
  return out;
}

SymplecticSvd symplectic_svd(const PairedTensor& q, double tol) {
  const Dims half = half_dims(q.shape());
  const PairedTensor q1 = block_of_2x2(q, 0, 0, 0);
  const PairedTensor q2 = block_of_2x2(q, 0, 0, 1);
  const double scale = std::max(frobenius_norm(q), 1.0);
  if (frobenius_norm(block_of_2x2(q, 0, 1, 0) + q2) > tol * scale ||
      frobenius_norm(block_of_2x2(q, 0, 1, 1) - q1) > tol * scale) {
    fail(ErrorCode::kNotSymplectic, "tensor is not of the form [[Q1, Q2], [-Q2, Q1]]");
  }
  const CMatrix& m = q.unfolding();
  if ((m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols())).norm() > tol * scale || !symplectic_check(q, tol)) {
    fail(ErrorCode::kNotSymplectic, "tensor is not unitary symplectic");
  }

  const Index n = numel(half);
  Eigen::JacobiSVD<CMatrix> svd(q1.unfolding(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  CMatrix u = svd.matrixU(), v = svd.matrixV();
  const Eigen::VectorXd sv = svd.singularValues();
  CMatrix d = u.adjoint() * q2.unfolding() * v;

  // Within a cluster of equal singular values the SVD basis is free; pick it so D is diagonal.
  const double cluster_tol = 1e-8;
  for (Index start = 0; start < n;) {
    Index end = start + 1;
    while (end < n && std::abs(sv(end) - sv(start)) <= cluster_tol) ++end;
    const Index len = end - start;
    if (len > 1) {
      const CMatrix block = d.block(start, start, len, len);
      if (sv(start) > cluster_tol) {
        // s * D_cc is Hermitian here; a shared unitary keeps S unchanged.
        Eigen::SelfAdjointEigenSolver<CMatrix> eig((block + block.adjoint()) / 2.0);
        u.middleCols(start, len) = (u.middleCols(start, len) * eig.eigenvectors()).eval();
        v.middleCols(start, len) = (v.middleCols(start, len) * eig.eigenvectors()).eval();
      } else {
        Eigen::JacobiSVD<CMatrix> inner(block, Eigen::ComputeFullU | Eigen::ComputeFullV);
        u.middleCols(start, len) = (u.middleCols(start, len) * inner.matrixU()).eval();
        v.middleCols(start, len) = (v.middleCols(start, len) * inner.matrixV()).eval();
      }
    }
    start = end;
  }
  d = u.adjoint() * q2.unfolding() * v;
  for (Index k = 0; k < n; ++k) {
    // Where S vanishes, a phase on u makes the D entry real.
    if (sv(k) <= cluster_tol && std::abs(d(k, k)) > 0.0) u.col(k) *= d(k, k) / std::abs(d(k, k));
  }
  d = u.adjoint() * q2.unfolding() * v;
  const CMatrix s = u.adjoint() * q1.unfolding() * v;

  SymplecticSvd out;
  const Shape sq = Shape::square(half);
  out.U = PairedTensor(sq, u);
  out.V = PairedTensor(sq, v);
  CMatrix sd = CMatrix::Zero(n, n), dd = CMatrix::Zero(n, n);
  for (Index k = 0; k < n; ++k) {
    out.s.push_back(s(k, k).real());
    out.d.push_back(d(k, k).real());
    sd(k, k) = s(k, k).real();
    dd(k, k) = d(k, k).real();
  }
  out.S = PairedTensor(sq, sd);
  out.D = PairedTensor(sq, dd);
  return out;
}

}  // namespace rtk
