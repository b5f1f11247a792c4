#include "rtk/tensor.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <sstream>

namespace rtk {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kSingularTensor: return "SingularTensor";
    case ErrorCode::kNotHermitian: return "NotHermitian";
    case ErrorCode::kNotHermitianBlocks: return "NotHermitianBlocks";
    case ErrorCode::kNotRankOne: return "NotRankOne";
    case ErrorCode::kNotSymplectic: return "NotSymplectic";
    case ErrorCode::kSingularQ1: return "SingularQ1";
    case ErrorCode::kImaginaryAxisEigenvalue: return "ImaginaryAxisEigenvalue";
    case ErrorCode::kNoUniqueSolution: return "NoUniqueSolution";
    case ErrorCode::kUnstableCoefficient: return "UnstableCoefficient";
    case ErrorCode::kUnstableSystem: return "UnstableSystem";
    case ErrorCode::kUnstableClosedLoop: return "UnstableClosedLoop";
    case ErrorCode::kNotStabilizable: return "NotStabilizable";
    case ErrorCode::kNotDetectable: return "NotDetectable";
    case ErrorCode::kSingularResolvent: return "SingularResolvent";
    case ErrorCode::kGammaTooSmall: return "GammaTooSmall";
    case ErrorCode::kConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::kMaxIterationsExceeded: return "MaxIterationsExceeded";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError:
    case ErrorCode::kValidationError:
      return 2;
    case ErrorCode::kConvergenceFailure:
    case ErrorCode::kMaxIterationsExceeded:
      return 4;
    default:
      return 3;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

Index numel(std::span<const Index> dims) {
  Index n = 1;
  for (Index d : dims) n *= d;
  return n;
}

Index ivec(std::span<const Index> index, std::span<const Index> dims) {
  if (index.size() != dims.size()) {
    fail(ErrorCode::kShapeMismatch, "index has " + std::to_string(index.size()) + " entries, dims " +
                                        std::to_string(dims.size()));
  }
  Index r = 0, stride = 1;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (index[k] < 1 || index[k] > dims[k]) {
      fail(ErrorCode::kIndexOutOfRange, "index " + std::to_string(index[k]) + " outside 1.." +
                                            std::to_string(dims[k]) + " in mode " + std::to_string(k + 1));
    }
    r += (index[k] - 1) * stride;
    stride *= dims[k];
  }
  return r + 1;
}

Index ivec(std::initializer_list<Index> index, std::initializer_list<Index> dims) {
  return ivec(std::span<const Index>(index.begin(), index.size()),
              std::span<const Index>(dims.begin(), dims.size()));
}

Index linear_index(std::span<const Index> index, std::span<const Index> dims) {
  Index r = 0, stride = 1;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    r += index[k] * stride;
    stride *= dims[k];
  }
  return r;
}

void multi_index(Index linear, std::span<const Index> dims, std::span<Index> out) {
  for (std::size_t k = 0; k < dims.size(); ++k) {
    out[k] = linear % dims[k];
    linear /= dims[k];
  }
}

std::string to_string(std::span<const Index> dims) {
  std::ostringstream os;
  os << '(';
  for (std::size_t k = 0; k < dims.size(); ++k) os << (k ? "," : "") << dims[k];
  os << ')';
  return os.str();
}

Shape::Shape(Dims rows, Dims cols) : row_dims(std::move(rows)), col_dims(std::move(cols)) {
  if (row_dims.size() != col_dims.size() || row_dims.empty()) {
    fail(ErrorCode::kShapeMismatch, "row and column dims must have the same nonzero length, got " +
                                        rtk::to_string(row_dims) + " and " + rtk::to_string(col_dims));
  }
  for (Index d : row_dims) {
    if (d < 1) fail(ErrorCode::kShapeMismatch, "nonpositive dimension in " + rtk::to_string(row_dims));
  }
  for (Index d : col_dims) {
    if (d < 1) fail(ErrorCode::kShapeMismatch, "nonpositive dimension in " + rtk::to_string(col_dims));
  }
}

std::string Shape::to_string() const { return rtk::to_string(row_dims) + "x" + rtk::to_string(col_dims); }

namespace detail {

void check_index(std::span<const Index> index, std::span<const Index> dims) {
  if (index.size() != dims.size()) {
    fail(ErrorCode::kIndexOutOfRange, "index has " + std::to_string(index.size()) + " entries, expected " +
                                          std::to_string(dims.size()));
  }
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (index[k] < 0 || index[k] >= dims[k]) {
      fail(ErrorCode::kIndexOutOfRange, "index " + rtk::to_string(index) + " outside " + rtk::to_string(dims));
    }
  }
}

}  // namespace detail

Blocking Blocking::trivial(const Shape& shape) {
  Blocking b;
  for (int k = 0; k < shape.order(); ++k) {
    b.parts.push_back({shape.row_dims[k]});
    b.parts.push_back({shape.col_dims[k]});
  }
  return b;
}

Blocking Blocking::halves(const Shape& shape, int mode) {
  if (mode < 0 || mode >= shape.order()) fail(ErrorCode::kIndexOutOfRange, "block mode out of range");
  Blocking b = trivial(shape);
  const Index r = shape.row_dims[mode], c = shape.col_dims[mode];
  if (r % 2 || c % 2) {
    fail(ErrorCode::kShapeMismatch, "mode " + std::to_string(mode) + " of " + shape.to_string() +
                                        " cannot be halved");
  }
  b.parts[2 * mode] = {r / 2, r / 2};
  b.parts[2 * mode + 1] = {c / 2, c / 2};
  return b;
}

void Blocking::validate(const Shape& shape) const {
  if (static_cast<int>(parts.size()) != 2 * shape.order()) {
    fail(ErrorCode::kShapeMismatch, "blocking needs one partition per interleaved mode");
  }
  for (int k = 0; k < 2 * shape.order(); ++k) {
    const Index dim = k % 2 == 0 ? shape.row_dims[k / 2] : shape.col_dims[k / 2];
    Index sum = 0;
    for (Index p : parts[k]) {
      if (p < 1) fail(ErrorCode::kShapeMismatch, "blocking parts must be positive");
      sum += p;
    }
    if (sum != dim) {
      fail(ErrorCode::kShapeMismatch, "blocking of mode " + std::to_string(k) + " sums to " + std::to_string(sum) +
                                          ", dimension is " + std::to_string(dim));
    }
  }
}

Eigen::MatrixXd perfect_shuffle(Index q, Index r) {
  const Index s = q * r;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(s, s);
  Index row = 0;
  for (Index start = 0; start < r; ++start) {
    for (Index idx = start; idx < s; idx += r) p(row++, idx) = 1.0;
  }
  return p;
}

Eigen::MatrixXd shuffle_permutation(int mode, const Dims& dims) {
  const int n = static_cast<int>(dims.size());
  if (mode < 0 || mode >= n) fail(ErrorCode::kIndexOutOfRange, "shuffle mode out of range");
  const Index size = 2 * numel(dims);
  // Product Q_N ... Q_{mode+2} of the factors I ⊗ Pi_{I_k,2} ⊗ I; this product maps the
  // tensor ordering to the block ordering, so the unfolding identity needs its transpose.
  Eigen::MatrixXd q_prod = Eigen::MatrixXd::Identity(size, size);
  for (int k = mode + 1; k < n; ++k) {
    const Index before = numel(std::span<const Index>(dims.data(), k));
    const Index after = numel(std::span<const Index>(dims.data() + k + 1, n - k - 1));
    Eigen::MatrixXd q = Eigen::kroneckerProduct(
        Eigen::MatrixXd::Identity(after, after),
        Eigen::MatrixXd(Eigen::kroneckerProduct(perfect_shuffle(dims[k], 2), Eigen::MatrixXd::Identity(before, before))));
    q_prod = q * q_prod;
  }
  return q_prod.transpose();
}

}  // namespace rtk
