#pragma once

#include <vector>

#include "rtk/tensor.hpp"

namespace rtk {

// Sum over r of A_r^(1) o ... o A_r^(N); each factor is an I_n x J_n matrix.
struct GcpdTensor {
  std::vector<std::vector<CMatrix>> terms;

  GcpdTensor() = default;
  explicit GcpdTensor(std::vector<std::vector<CMatrix>> t);

  Index rank() const { return static_cast<Index>(terms.size()); }
  int order() const { return terms.empty() ? 0 : static_cast<int>(terms.front().size()); }
  Shape shape() const;
  void validate() const;
};

// Sum over r of v_r^(1) o ... o v_r^(N).
struct GcpdVector {
  std::vector<std::vector<CVector>> terms;

  Dims dims() const;
};

PairedTensor outer(const std::vector<CMatrix>& factors);
PairedTensor densify(const GcpdTensor& a);
PlainTensor densify(const GcpdVector& v);

GcpdTensor gcpd_einstein(const GcpdTensor& a, const GcpdTensor& b);

// Y = X x_n M with Y(.., i, ..) = sum_k M(i, k) X(.., k, ..); n is 0-based.
PlainTensor mode_product(const PlainTensor& x, int mode, const CMatrix& m);

// Mode product acting on row mode n (or column mode n) of a paired tensor.
PairedTensor row_mode_product(const PairedTensor& e, int mode, const CMatrix& m);
PairedTensor col_mode_product(const PairedTensor& e, int mode, const CMatrix& m);

// A * E and E * A for rank-one A, evaluated through mode products.
PairedTensor rankone_left_apply(const GcpdTensor& a, const PairedTensor& e);
PairedTensor rankone_right_apply(const PairedTensor& e, const GcpdTensor& a);

// Multiplication counts of the structured and the dense contraction.
double rankone_left_apply_flops(const GcpdTensor& a, const Shape& e);
double dense_einstein_flops(const Shape& a, const Shape& b);

// Pads trailing modes with dimension 1 up to `order`.
PairedTensor pad_order(const PairedTensor& a, int order);

PairedTensor kron(const PairedTensor& a, const PairedTensor& b);

PlainTensor vec(const PairedTensor& x);
PairedTensor unvec(const PlainTensor& y, const Shape& shape);

GcpdTensor gcpd_kron(const GcpdTensor& a, const GcpdTensor& b);
GcpdVector gcpd_vec(const GcpdTensor& a);

// P with vec(E^T) = P * vec(E) for E with square dims `dims`.
PairedTensor transpose_permutation_tensor(const Dims& dims);

// Sum over n of I o ... o A^T o ... o I (A^T in position n).
GcpdTensor kronsum_tensor(const CMatrix& a, int order);

enum class NormKind { kFrobenius, kSpectral };
double rankone_norm(const GcpdTensor& a, NormKind which);

}  // namespace rtk
