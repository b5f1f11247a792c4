#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "rtk/control.hpp"
#include "rtk/equations.hpp"
#include "rtk/spectral.hpp"
#include "rtk/structured.hpp"
#include "rtk/tensor.hpp"

namespace rtk::testing {

inline constexpr int kCases = 50;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  double normal() { return norm_(eng_); }
  Complex cnormal() {
    const double re = normal();
    return {re, normal()};
  }
  Index pick(Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(eng_); }

  Dims dims(int order, Index max_dim) {
    Dims d(order);
    for (auto& x : d) x = pick(1, max_dim);
    return d;
  }
  CMatrix matrix(Index r, Index c) {
    CMatrix m(r, c);
    for (Index k = 0; k < m.size(); ++k) m.data()[k] = cnormal();
    return m;
  }
  CMatrix real_matrix(Index r, Index c) {
    CMatrix m(r, c);
    for (Index k = 0; k < m.size(); ++k) m.data()[k] = normal();
    return m;
  }
  PairedTensor paired(const Shape& s) { return PairedTensor(s, matrix(s.rows(), s.cols())); }
  PairedTensor square(const Dims& d) { return paired(Shape::square(d)); }
  PlainTensor plain(const Dims& d) {
    CVector v(numel(d));
    for (Index k = 0; k < v.size(); ++k) v(k) = cnormal();
    return PlainTensor(d, v);
  }
  PairedTensor hermitian(const Dims& d) { return hermitian_part(square(d)); }
  PairedTensor psd(const Dims& d) {
    const PairedTensor x = square(d);
    return hermitian_part(x * conj_transpose(x));
  }
  // Random square tensor shifted so every U-eigenvalue has real part at most -margin.
  PairedTensor stable(const Dims& d, double margin = 0.5) {
    PairedTensor a = square(d);
    double top = -1e300;
    for (const Complex& z : u_eigenvalues(a)) top = std::max(top, z.real());
    a.unfolding() -= Complex(top + margin) * CMatrix::Identity(a.unfolding().rows(), a.unfolding().cols());
    return a;
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> norm_;
};

// All multi-indices of `dims`, first index fastest, 0-based.
inline std::vector<Dims> all_indices(const Dims& dims) {
  std::vector<Dims> out;
  Dims i(dims.size(), 0);
  for (;;) {
    out.push_back(i);
    std::size_t k = 0;
    while (k < dims.size() && ++i[k] == dims[k]) i[k++] = 0;
    if (k == dims.size()) return out;
  }
}

// Flat position of entry (i, j) written out from the layout rule, independent of the library.
inline Index flat_position(const Dims& i, const Dims& j, const Shape& s) {
  Index ri = 0, cj = 0, stride = 1;
  for (std::size_t k = 0; k < i.size(); ++k) {
    ri += i[k] * stride;
    stride *= s.row_dims[k];
  }
  stride = 1;
  for (std::size_t k = 0; k < j.size(); ++k) {
    cj += j[k] * stride;
    stride *= s.col_dims[k];
  }
  return cj * s.rows() + ri;
}

inline Complex entry(const PairedTensor& a, const Dims& i, const Dims& j) {
  return a.unfolding().data()[flat_position(i, j, a.shape())];
}

inline Dims interleave(const Dims& i, const Dims& j) {
  Dims out;
  for (std::size_t k = 0; k < i.size(); ++k) {
    out.push_back(i[k]);
    out.push_back(j[k]);
  }
  return out;
}

// Contraction sum over all column multi-indices of a.
inline PairedTensor loop_einstein(const PairedTensor& a, const PairedTensor& b) {
  PairedTensor out(Shape(a.row_dims(), b.col_dims()));
  const auto rows = all_indices(a.row_dims()), mids = all_indices(a.col_dims()), cols = all_indices(b.col_dims());
  for (const Dims& i : rows) {
    for (const Dims& j : cols) {
      Complex s = 0.0;
      for (const Dims& k : mids) s += entry(a, i, k) * entry(b, k, j);
      out.unfolding().data()[flat_position(i, j, out.shape())] = s;
    }
  }
  return out;
}

inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
// Infinite when the shapes differ, so any tolerance check fails.
inline double diff(const PairedTensor& a, const PairedTensor& b) {
  if (a.shape() != b.shape()) return std::numeric_limits<double>::infinity();
  return max_abs(a.unfolding() - b.unfolding());
}
inline double rel_diff(const PairedTensor& a, const PairedTensor& b) {
  return frobenius_norm(a - b) / std::max(1e-300, frobenius_norm(b));
}

// (A, B, C) with (A, B) stabilizable and (C, A) detectable; A may be unstable.
struct ArteCase {
  ArteProblem problem;
  PairedTensor e0;  // stabilizing start
};

inline ArteCase random_arte(Gen& g, const Dims& dims, bool square_b) {
  const Shape s = Shape::square(dims);
  Dims thin(dims.size(), 1);
  thin[0] = std::min<Index>(2, dims[0]);
  ArteCase c;
  if (square_b) {
    const PairedTensor a = g.square(dims), b = g.square(dims);
    const PairedTensor cc = g.paired(Shape(thin, dims));
    c.problem = ArteProblem::from_factors(a, b, cc);
    // A - beta G is stable once beta lambda_min(G) exceeds the numerical abscissa of A.
    const double abscissa = -is_positive_semidefinite(-hermitian_part(a)).min_eigenvalue;
    const double gmin = is_positive_semidefinite(c.problem.G).min_eigenvalue;
    const double beta = std::max(0.0, 2.0 * (abscissa + 1.0) / gmin);
    c.e0 = Complex(beta) * PairedTensor::Identity(dims);
  } else {
    const PairedTensor a = g.stable(dims, 0.3);
    const PairedTensor b = g.paired(Shape(dims, thin));
    const PairedTensor cc = g.paired(Shape(thin, dims));
    c.problem = ArteProblem::from_factors(a, b, cc);
    c.e0 = PairedTensor(s);
  }
  return c;
}

}  // namespace rtk::testing
