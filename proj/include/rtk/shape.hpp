#pragma once

#include <Eigen/Core>

#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace rtk {

using Index = Eigen::Index;
using Dims = std::vector<Index>;

Index numel(std::span<const Index> dims);

// Column-major linear index of a 1-based multi-index (first index fastest).
Index ivec(std::span<const Index> index, std::span<const Index> dims);
Index ivec(std::initializer_list<Index> index, std::initializer_list<Index> dims);

// 0-based counterparts of ivec.
Index linear_index(std::span<const Index> index, std::span<const Index> dims);
void multi_index(Index linear, std::span<const Index> dims, std::span<Index> out);

std::string to_string(std::span<const Index> dims);

// Shape of a paired tensor with interleaved modes (i1, j1, ..., iN, jN).
struct Shape {
  Dims row_dims;
  Dims col_dims;

  Shape() = default;
  Shape(Dims rows, Dims cols);
  static Shape square(const Dims& dims) { return Shape(dims, dims); }

  int order() const { return static_cast<int>(row_dims.size()); }
  Index rows() const { return numel(row_dims); }
  Index cols() const { return numel(col_dims); }
  bool is_square() const { return row_dims == col_dims; }
  Shape transposed() const { return Shape(col_dims, row_dims); }
  std::string to_string() const;

  bool operator==(const Shape&) const = default;
};

}  // namespace rtk
