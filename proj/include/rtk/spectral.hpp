#pragma once

#include <optional>
#include <vector>

#include "rtk/tensor.hpp"

namespace rtk {

// U-eigenvalues of a square tensor, sorted by nonincreasing real part.
std::vector<Complex> u_eigenvalues(const PairedTensor& a);

bool is_stable(const std::vector<Complex>& eigenvalues);
bool is_stable(const PairedTensor& a);

// Largest distance between greedily matched pairs; infinity when sizes differ.
double multiset_distance(const std::vector<Complex>& a, const std::vector<Complex>& b);

struct TensorSchur {
  PairedTensor Q;
  PairedTensor T;
  std::vector<Complex> eigenvalues;
};

// A = Q * T * Q^H with T upper triangular in the unfolding.
TensorSchur tensor_schur(const PairedTensor& a);

struct TensorSvd {
  PairedTensor U;
  PairedTensor D;
  PairedTensor V;
  std::vector<double> singular_values;
};

// A = U * D * V^H.
TensorSvd tensor_svd(const PairedTensor& a);

enum class Extreme { kSmallest, kLargest };

struct EigenPair {
  double eigenvalue = 0.0;
  PlainTensor eigentensor;
  double residual = 0.0;
  int iterations = 0;
};

struct RayleighOptions {
  double tol = 1e-12;
  int max_iter = 100;
  int warmup_iter = 500;
};

// Extreme U-eigenpair of a Hermitian tensor. A locally optimal Rayleigh quotient
// descent steers toward the requested end of the spectrum, then Rayleigh
// quotient iteration refines.
EigenPair rayleigh_quotient_extreme(const PairedTensor& a, Extreme which,
                                    const std::optional<PlainTensor>& x0 = std::nullopt,
                                    const RayleighOptions& options = {});

// Reorders a complex Schur form T = U^H H U so that entries satisfying `lead`
// come first on the diagonal. Returns how many lead.
template <typename Pred>
Index reorder_schur(CMatrix& t, CMatrix& u, Pred lead);

struct HamiltonianBlocks {
  PairedTensor A;
  PairedTensor G;
  PairedTensor K;
};

// [[O, I], [-I, O]] on the first mode; `dims` are the dims of one block.
PairedTensor j_tensor(const Dims& dims);

// Half dims of a tensor whose first mode holds a 2x2 block structure.
Dims half_dims(const Shape& shape);

PairedTensor hamiltonian_assemble(const HamiltonianBlocks& blocks, double tol = 1e-10);
bool hamiltonian_check(const PairedTensor& m, double tol = 1e-10);
bool symplectic_check(const PairedTensor& s, double tol = 1e-10);

struct SchurHamiltonian {
  PairedTensor Q;
  PairedTensor Q1;
  PairedTensor Q2;
  PairedTensor T;
  PairedTensor R;
  std::vector<Complex> eigenvalues;  // eigenvalues of T
};

// imag_tol < 0 selects the default 1e-8 * ||M||_2.
SchurHamiltonian schur_hamiltonian(const PairedTensor& m, double imag_tol = -1.0);

struct SymplecticSvd {
  PairedTensor U;
  PairedTensor V;
  PairedTensor S;
  PairedTensor D;
  std::vector<double> s;
  std::vector<double> d;
};

SymplecticSvd symplectic_svd(const PairedTensor& q, double tol = 1e-8);

// ---------------------------------------------------------------------------

template <typename Pred>
Index reorder_schur(CMatrix& t, CMatrix& u, Pred lead) {
  const Index n = t.rows();
  // Bubble each leading eigenvalue up past the trailing ones with 2x2 unitary swaps.
  Index placed = 0;
  for (Index k = 0; k < n; ++k) {
    if (!lead(t(k, k))) continue;
    for (Index p = k; p > placed; --p) {
      const Complex a = t(p - 1, p - 1), c = t(p, p), b = t(p - 1, p);
      // First column of G spans the eigenvector of [[a, b], [0, c]] for c.
      Eigen::Vector2cd v(b, c - a);
      const double nv = v.norm();
      if (nv == 0.0) {
        v << 1.0, 0.0;
      } else {
        v /= nv;
      }
      Eigen::Matrix2cd g;
      g << v(0), -std::conj(v(1)), v(1), std::conj(v(0));
      t.middleRows(p - 1, 2) = g.adjoint() * t.middleRows(p - 1, 2);
      t.middleCols(p - 1, 2) = t.middleCols(p - 1, 2) * g;
      u.middleCols(p - 1, 2) = u.middleCols(p - 1, 2) * g;
      t(p, p - 1) = 0.0;
      t(p - 1, p - 1) = c;
      t(p, p) = a;
    }
    ++placed;
  }
  return placed;
}

}  // namespace rtk
