#pragma once

#include <Eigen/Dense>

#include <complex>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "rtk/errors.hpp"
#include "rtk/shape.hpp"

namespace rtk {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using CMatrix = DenseMatrix<Complex>;
using CVector = DenseVector<Complex>;

namespace detail {

inline std::span<const Index> as_span(std::initializer_list<Index> list) {
  return {list.begin(), list.size()};
}

void check_index(std::span<const Index> index, std::span<const Index> dims);

}  // namespace detail

// Order-N tensor stored flat by linear_index (first index fastest).
template <typename Scalar>
class BasicPlainTensor {
 public:
  using Vector = DenseVector<Scalar>;

  BasicPlainTensor() = default;
  explicit BasicPlainTensor(Dims dims) : dims_(std::move(dims)) {
    validate();
    data_ = Vector::Zero(numel(dims_));
  }
  BasicPlainTensor(Dims dims, Vector data) : dims_(std::move(dims)), data_(std::move(data)) {
    validate();
    if (data_.size() != numel(dims_)) {
      fail(ErrorCode::kShapeMismatch, "plain tensor data length " + std::to_string(data_.size()) +
                                          " does not match dims " + rtk::to_string(dims_));
    }
  }

  static BasicPlainTensor Zero(const Dims& dims) { return BasicPlainTensor(dims); }
  static BasicPlainTensor Constant(const Dims& dims, Scalar value) {
    return BasicPlainTensor(dims, Vector::Constant(numel(dims), value));
  }

  const Dims& dims() const { return dims_; }
  int order() const { return static_cast<int>(dims_.size()); }
  Index size() const { return data_.size(); }
  const Vector& data() const { return data_; }
  Vector& data() { return data_; }

  Scalar& operator()(std::span<const Index> index) {
    detail::check_index(index, dims_);
    return data_(linear_index(index, dims_));
  }
  const Scalar& operator()(std::span<const Index> index) const {
    detail::check_index(index, dims_);
    return data_(linear_index(index, dims_));
  }
  Scalar& operator()(std::initializer_list<Index> index) { return (*this)(detail::as_span(index)); }
  const Scalar& operator()(std::initializer_list<Index> index) const {
    return (*this)(detail::as_span(index));
  }

  BasicPlainTensor& operator+=(const BasicPlainTensor& other) {
    require_same_dims(other);
    data_ += other.data_;
    return *this;
  }
  BasicPlainTensor& operator-=(const BasicPlainTensor& other) {
    require_same_dims(other);
    data_ -= other.data_;
    return *this;
  }
  BasicPlainTensor& operator*=(Scalar s) {
    data_ *= s;
    return *this;
  }
  BasicPlainTensor& operator/=(Scalar s) {
    data_ /= s;
    return *this;
  }

  void require_same_dims(const BasicPlainTensor& other) const {
    if (dims_ != other.dims_) {
      fail(ErrorCode::kShapeMismatch,
           "plain tensor dims " + rtk::to_string(dims_) + " vs " + rtk::to_string(other.dims_));
    }
  }

 private:
  void validate() const {
    if (dims_.empty()) fail(ErrorCode::kShapeMismatch, "plain tensor needs at least one mode");
    for (Index d : dims_) {
      if (d < 1) fail(ErrorCode::kShapeMismatch, "dimension must be positive in " + rtk::to_string(dims_));
    }
  }

  Dims dims_;
  Vector data_;
};

// Even-order paired tensor, held as its unfolding phi(A): entry (i, j) lives at
// row linear_index(i, I), column linear_index(j, J).
template <typename Scalar>
class BasicPairedTensor {
 public:
  using Matrix = DenseMatrix<Scalar>;

  BasicPairedTensor() = default;
  explicit BasicPairedTensor(Shape shape)
      : shape_(std::move(shape)), data_(Matrix::Zero(shape_.rows(), shape_.cols())) {}
  BasicPairedTensor(Shape shape, Matrix unfolding) : shape_(std::move(shape)), data_(std::move(unfolding)) {
    if (data_.rows() != shape_.rows() || data_.cols() != shape_.cols()) {
      fail(ErrorCode::kShapeMismatch, "unfolding of size " + std::to_string(data_.rows()) + "x" +
                                          std::to_string(data_.cols()) + " does not fit shape " +
                                          shape_.to_string());
    }
  }

  static BasicPairedTensor Zero(const Shape& shape) { return BasicPairedTensor(shape); }
  static BasicPairedTensor Identity(const Dims& dims) {
    Shape s = Shape::square(dims);
    return BasicPairedTensor(s, Matrix::Identity(s.rows(), s.cols()));
  }

  const Shape& shape() const { return shape_; }
  const Dims& row_dims() const { return shape_.row_dims; }
  const Dims& col_dims() const { return shape_.col_dims; }
  int order() const { return shape_.order(); }
  bool is_square() const { return shape_.is_square(); }

  const Matrix& unfolding() const { return data_; }
  Matrix& unfolding() { return data_; }

  Scalar& operator()(std::span<const Index> i, std::span<const Index> j) {
    return data_(row_of(i), col_of(j));
  }
  const Scalar& operator()(std::span<const Index> i, std::span<const Index> j) const {
    return data_(row_of(i), col_of(j));
  }

  // Interleaved 0-based access (i1, j1, i2, j2, ...).
  Scalar& at(std::span<const Index> interleaved) {
    auto [r, c] = locate(interleaved);
    return data_(r, c);
  }
  const Scalar& at(std::span<const Index> interleaved) const {
    auto [r, c] = locate(interleaved);
    return data_(r, c);
  }
  Scalar& at(std::initializer_list<Index> interleaved) { return at(detail::as_span(interleaved)); }
  const Scalar& at(std::initializer_list<Index> interleaved) const {
    return at(detail::as_span(interleaved));
  }

  BasicPairedTensor& operator+=(const BasicPairedTensor& other) {
    require_same_shape(other);
    data_ += other.data_;
    return *this;
  }
  BasicPairedTensor& operator-=(const BasicPairedTensor& other) {
    require_same_shape(other);
    data_ -= other.data_;
    return *this;
  }
  BasicPairedTensor& operator*=(Scalar s) {
    data_ *= s;
    return *this;
  }
  BasicPairedTensor& operator/=(Scalar s) {
    data_ /= s;
    return *this;
  }

  void require_same_shape(const BasicPairedTensor& other) const {
    if (shape_ != other.shape_) {
      fail(ErrorCode::kShapeMismatch, "shapes " + shape_.to_string() + " and " + other.shape_.to_string());
    }
  }

 private:
  Index row_of(std::span<const Index> i) const {
    detail::check_index(i, shape_.row_dims);
    return linear_index(i, shape_.row_dims);
  }
  Index col_of(std::span<const Index> j) const {
    detail::check_index(j, shape_.col_dims);
    return linear_index(j, shape_.col_dims);
  }
  std::pair<Index, Index> locate(std::span<const Index> interleaved) const {
    const std::size_t n = shape_.row_dims.size();
    if (interleaved.size() != 2 * n) {
      fail(ErrorCode::kIndexOutOfRange, "interleaved index needs " + std::to_string(2 * n) + " entries");
    }
    Dims i(n), j(n);
    for (std::size_t k = 0; k < n; ++k) {
      i[k] = interleaved[2 * k];
      j[k] = interleaved[2 * k + 1];
    }
    return {row_of(i), col_of(j)};
  }

  Shape shape_;
  Matrix data_;
};

using PairedTensor = BasicPairedTensor<Complex>;
using PlainTensor = BasicPlainTensor<Complex>;
using RealPairedTensor = BasicPairedTensor<double>;
using RealPlainTensor = BasicPlainTensor<double>;

// ---------------------------------------------------------------------------
// Arithmetic

template <typename S>
BasicPairedTensor<S> operator+(BasicPairedTensor<S> a, const BasicPairedTensor<S>& b) {
  return a += b;
}
template <typename S>
BasicPairedTensor<S> operator-(BasicPairedTensor<S> a, const BasicPairedTensor<S>& b) {
  return a -= b;
}
template <typename S>
BasicPairedTensor<S> operator-(const BasicPairedTensor<S>& a) {
  return BasicPairedTensor<S>(a.shape(), -a.unfolding());
}
template <typename S>
BasicPairedTensor<S> operator*(S s, BasicPairedTensor<S> a) {
  return a *= s;
}
template <typename S>
BasicPairedTensor<S> operator*(BasicPairedTensor<S> a, S s) {
  return a *= s;
}
template <typename S>
BasicPairedTensor<S> operator/(BasicPairedTensor<S> a, S s) {
  return a /= s;
}
inline PairedTensor operator*(double s, PairedTensor a) { return a *= Complex(s); }
inline PairedTensor operator*(PairedTensor a, double s) { return a *= Complex(s); }
inline PairedTensor operator/(PairedTensor a, double s) { return a /= Complex(s); }

template <typename S>
BasicPlainTensor<S> operator+(BasicPlainTensor<S> a, const BasicPlainTensor<S>& b) {
  return a += b;
}
template <typename S>
BasicPlainTensor<S> operator-(BasicPlainTensor<S> a, const BasicPlainTensor<S>& b) {
  return a -= b;
}
template <typename S>
BasicPlainTensor<S> operator-(const BasicPlainTensor<S>& a) {
  return BasicPlainTensor<S>(a.dims(), -a.data());
}
template <typename S>
BasicPlainTensor<S> operator*(S s, BasicPlainTensor<S> a) {
  return a *= s;
}
template <typename S>
BasicPlainTensor<S> operator/(BasicPlainTensor<S> a, S s) {
  return a /= s;
}
inline PlainTensor operator*(double s, PlainTensor a) { return a *= Complex(s); }
inline PlainTensor operator/(PlainTensor a, double s) { return a /= Complex(s); }

// ---------------------------------------------------------------------------
// Einstein product and unfolding

template <typename S>
BasicPairedTensor<S> einstein_product(const BasicPairedTensor<S>& a, const BasicPairedTensor<S>& b) {
  if (a.col_dims() != b.row_dims()) {
    fail(ErrorCode::kShapeMismatch, "Einstein product contracts " + to_string(a.col_dims()) +
                                        " against " + to_string(b.row_dims()));
  }
  return BasicPairedTensor<S>(Shape(a.row_dims(), b.col_dims()), a.unfolding() * b.unfolding());
}

template <typename S>
BasicPairedTensor<S> operator*(const BasicPairedTensor<S>& a, const BasicPairedTensor<S>& b) {
  return einstein_product(a, b);
}

template <typename S>
BasicPlainTensor<S> apply(const BasicPairedTensor<S>& a, const BasicPlainTensor<S>& x) {
  if (a.col_dims() != x.dims()) {
    fail(ErrorCode::kShapeMismatch,
         "cannot apply tensor with column dims " + to_string(a.col_dims()) + " to " + to_string(x.dims()));
  }
  return BasicPlainTensor<S>(a.row_dims(), a.unfolding() * x.data());
}

template <typename S>
BasicPlainTensor<S> operator*(const BasicPairedTensor<S>& a, const BasicPlainTensor<S>& x) {
  return apply(a, x);
}

template <typename S>
const DenseMatrix<S>& unfold(const BasicPairedTensor<S>& a) {
  return a.unfolding();
}

template <typename Derived>
BasicPairedTensor<typename Derived::Scalar> fold(const Eigen::MatrixBase<Derived>& m, const Shape& shape) {
  return BasicPairedTensor<typename Derived::Scalar>(shape, m);
}

template <typename S>
BasicPairedTensor<S> conj_transpose(const BasicPairedTensor<S>& a) {
  return BasicPairedTensor<S>(a.shape().transposed(), a.unfolding().adjoint());
}

template <typename S>
BasicPairedTensor<S> transpose(const BasicPairedTensor<S>& a) {
  return BasicPairedTensor<S>(a.shape().transposed(), a.unfolding().transpose());
}

template <typename S>
BasicPairedTensor<S> conj(const BasicPairedTensor<S>& a) {
  return BasicPairedTensor<S>(a.shape(), a.unfolding().conjugate());
}

template <typename S>
BasicPairedTensor<S> identity(const Dims& dims) {
  return BasicPairedTensor<S>::Identity(dims);
}
inline PairedTensor identity(const Dims& dims) { return PairedTensor::Identity(dims); }

template <typename S>
BasicPairedTensor<S> hermitian_part(const BasicPairedTensor<S>& a) {
  DenseMatrix<S> h = (a.unfolding() + a.unfolding().adjoint()) / S(2);
  return BasicPairedTensor<S>(a.shape(), std::move(h));
}

// Views a plain tensor as a paired tensor whose column modes are all 1.
template <typename S>
BasicPairedTensor<S> as_column(const BasicPlainTensor<S>& x) {
  return BasicPairedTensor<S>(Shape(x.dims(), Dims(x.dims().size(), 1)), x.data());
}

// ---------------------------------------------------------------------------
// Norms

template <typename S>
double frobenius_norm(const BasicPairedTensor<S>& a) {
  return a.unfolding().norm();
}
template <typename S>
double frobenius_norm(const BasicPlainTensor<S>& x) {
  return x.data().norm();
}

// <X, Y> = sum conj(X) Y.
template <typename S>
S inner_product(const BasicPlainTensor<S>& x, const BasicPlainTensor<S>& y) {
  x.require_same_dims(y);
  return x.data().dot(y.data());
}
template <typename S>
S inner_product(const BasicPairedTensor<S>& x, const BasicPairedTensor<S>& y) {
  x.require_same_shape(y);
  return (x.unfolding().array().conjugate() * y.unfolding().array()).sum();
}

template <typename S>
double spectral_norm(const BasicPairedTensor<S>& a) {
  if (a.unfolding().size() == 0) return 0.0;
  Eigen::BDCSVD<DenseMatrix<S>> svd(a.unfolding());
  return svd.singularValues()(0);
}

template <typename S>
bool is_hermitian(const BasicPairedTensor<S>& a, double tol = 1e-10) {
  if (!a.is_square()) return false;
  const double scale = a.unfolding().norm();
  return (a.unfolding() - a.unfolding().adjoint()).norm() <= tol * scale;
}

struct PsdVerdict {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

template <typename S>
PsdVerdict is_positive_semidefinite(const BasicPairedTensor<S>& a, double tol = 1e-10) {
  if (!is_hermitian(a, 1e-10)) {
    fail(ErrorCode::kNotHermitian, "positive semidefiniteness needs a Hermitian tensor");
  }
  DenseMatrix<S> h = (a.unfolding() + a.unfolding().adjoint()) / S(2);
  Eigen::SelfAdjointEigenSolver<DenseMatrix<S>> eig(h, Eigen::EigenvaluesOnly);
  PsdVerdict v;
  v.min_eigenvalue = eig.eigenvalues()(0);
  v.psd = v.min_eigenvalue >= -tol;
  return v;
}

// ---------------------------------------------------------------------------
// Inversion and linear solves

namespace detail {

template <typename S>
Eigen::FullPivLU<DenseMatrix<S>> checked_lu(const DenseMatrix<S>& m, const char* what) {
  if (m.rows() != m.cols()) fail(ErrorCode::kShapeMismatch, std::string(what) + ": unfolding is not square");
  Eigen::FullPivLU<DenseMatrix<S>> lu(m);
  const double scale = m.norm();
  const double pivot = m.size() == 0 ? 1.0 : lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(pivot > 1e-12 * scale)) {
    fail(ErrorCode::kSingularTensor, std::string(what) + ": pivot " + std::to_string(pivot) +
                                         " below 1e-12 * ||phi||_F");
  }
  return lu;
}

}  // namespace detail

template <typename S>
BasicPairedTensor<S> inverse(const BasicPairedTensor<S>& a) {
  if (!a.is_square()) fail(ErrorCode::kShapeMismatch, "inverse needs row_dims == col_dims");
  auto lu = detail::checked_lu<S>(a.unfolding(), "inverse");
  return BasicPairedTensor<S>(a.shape(), lu.inverse());
}

// Solves A * Y = X.
template <typename S>
BasicPairedTensor<S> solve(const BasicPairedTensor<S>& a, const BasicPairedTensor<S>& x) {
  if (!a.is_square() || a.row_dims() != x.row_dims()) {
    fail(ErrorCode::kShapeMismatch, "solve: " + a.shape().to_string() + " against " + x.shape().to_string());
  }
  auto lu = detail::checked_lu<S>(a.unfolding(), "solve");
  return BasicPairedTensor<S>(x.shape(), lu.solve(x.unfolding()));
}
template <typename S>
BasicPlainTensor<S> solve(const BasicPairedTensor<S>& a, const BasicPlainTensor<S>& x) {
  if (!a.is_square() || a.row_dims() != x.dims()) {
    fail(ErrorCode::kShapeMismatch, "solve: " + a.shape().to_string() + " against " + to_string(x.dims()));
  }
  auto lu = detail::checked_lu<S>(a.unfolding(), "solve");
  return BasicPlainTensor<S>(x.dims(), lu.solve(x.data()));
}

// ---------------------------------------------------------------------------
// Block tensors

namespace detail {

// Concatenates along column mode `mode`; the other modes must agree.
template <typename S>
BasicPairedTensor<S> concat_cols(const std::vector<BasicPairedTensor<S>>& parts, int mode) {
  if (parts.empty()) fail(ErrorCode::kShapeMismatch, "nothing to concatenate");
  const Shape& first = parts.front().shape();
  if (mode < 0 || mode >= first.order()) fail(ErrorCode::kIndexOutOfRange, "block mode out of range");
  Dims cols = first.col_dims;
  cols[mode] = 0;
  for (const auto& p : parts) {
    Dims c = p.col_dims();
    c[mode] = 0;
    Dims want = first.col_dims;
    want[mode] = 0;
    if (p.row_dims() != first.row_dims || c != want) {
      fail(ErrorCode::kShapeMismatch, "blocks " + first.to_string() + " and " + p.shape().to_string() +
                                          " are not conformal along mode " + std::to_string(mode));
    }
    cols[mode] += p.col_dims()[mode];
  }
  BasicPairedTensor<S> out(Shape(first.row_dims, cols));
  Dims j(cols.size());
  Index offset = 0;
  for (const auto& p : parts) {
    for (Index c = 0; c < p.unfolding().cols(); ++c) {
      multi_index(c, p.col_dims(), j);
      j[mode] += offset;
      out.unfolding().col(linear_index(j, cols)) = p.unfolding().col(c);
    }
    offset += p.col_dims()[mode];
  }
  return out;
}

}  // namespace detail

// Row block [A B ...]_n: blocks side by side along column mode n (0-based).
template <typename S>
BasicPairedTensor<S> hconcat(const std::vector<BasicPairedTensor<S>>& parts, int mode) {
  return detail::concat_cols(parts, mode);
}

// Column block [A; B; ...]_n: blocks stacked along row mode n (0-based).
template <typename S>
BasicPairedTensor<S> vconcat(const std::vector<BasicPairedTensor<S>>& parts, int mode) {
  std::vector<BasicPairedTensor<S>> t;
  t.reserve(parts.size());
  for (const auto& p : parts) t.push_back(transpose(p));
  return transpose(detail::concat_cols(t, mode));
}

template <typename S>
BasicPairedTensor<S> block2x2(const BasicPairedTensor<S>& a, const BasicPairedTensor<S>& b,
                              const BasicPairedTensor<S>& c, const BasicPairedTensor<S>& d, int mode = 0) {
  return vconcat<S>({hconcat<S>({a, b}, mode), hconcat<S>({c, d}, mode)}, mode);
}

// Partition of every interleaved mode (i1, j1, ..., iN, jN) into parts.
struct Blocking {
  std::vector<Dims> parts;

  static Blocking trivial(const Shape& shape);
  static Blocking halves(const Shape& shape, int mode);
  void validate(const Shape& shape) const;
};

template <typename S>
BasicPairedTensor<S> extract_block(const BasicPairedTensor<S>& a, const Blocking& blocking,
                                   std::span<const Index> block) {
  blocking.validate(a.shape());
  const int n = a.order();
  if (static_cast<int>(block.size()) != 2 * n) {
    fail(ErrorCode::kIndexOutOfRange, "block index needs " + std::to_string(2 * n) + " entries");
  }
  Dims rows(n), cols(n), row_off(n, 0), col_off(n, 0);
  for (int k = 0; k < 2 * n; ++k) {
    const Dims& p = blocking.parts[k];
    if (block[k] < 0 || block[k] >= static_cast<Index>(p.size())) {
      fail(ErrorCode::kIndexOutOfRange, "block index " + std::to_string(block[k]) + " out of range in mode " +
                                            std::to_string(k));
    }
    Index off = 0;
    for (Index b = 0; b < block[k]; ++b) off += p[b];
    if (k % 2 == 0) {
      rows[k / 2] = p[block[k]];
      row_off[k / 2] = off;
    } else {
      cols[k / 2] = p[block[k]];
      col_off[k / 2] = off;
    }
  }
  BasicPairedTensor<S> out(Shape(rows, cols));
  Dims i(n), j(n);
  for (Index c = 0; c < out.unfolding().cols(); ++c) {
    multi_index(c, cols, j);
    for (int k = 0; k < n; ++k) j[k] += col_off[k];
    const Index src_c = linear_index(j, a.col_dims());
    for (Index r = 0; r < out.unfolding().rows(); ++r) {
      multi_index(r, rows, i);
      for (int k = 0; k < n; ++k) i[k] += row_off[k];
      out.unfolding()(r, c) = a.unfolding()(linear_index(i, a.row_dims()), src_c);
    }
  }
  return out;
}

template <typename S>
BasicPairedTensor<S> extract_block(const BasicPairedTensor<S>& a, const Blocking& blocking,
                                   std::initializer_list<Index> block) {
  return extract_block(a, blocking, detail::as_span(block));
}

// Block (r, c) of a tensor read as [[X00, X01], [X10, X11]]_mode.
template <typename S>
BasicPairedTensor<S> block_of_2x2(const BasicPairedTensor<S>& a, int mode, Index r, Index c) {
  Blocking b = Blocking::halves(a.shape(), mode);
  std::vector<Index> idx(2 * a.order(), 0);
  idx[2 * mode] = r;
  idx[2 * mode + 1] = c;
  return extract_block(a, b, std::span<const Index>(idx));
}

// Perfect shuffle Pi_{q,r} of size qr: Pi z = [z(1:r:s); z(2:r:s); ...; z(r:r:s)].
Eigen::MatrixXd perfect_shuffle(Index q, Index r);

// Permutation P with phi([[A, B], [C, D]]_mode) = P [[phi A, phi B], [phi C, phi D]] P^T
// for blocks with square dims `dims`. Size 2|dims|.
Eigen::MatrixXd shuffle_permutation(int mode, const Dims& dims);

}  // namespace rtk
