#pragma once

/**
 * @file matrix.hpp
 * Dense row-major matrix used for weights, ranks and bounded integers.
 */

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "minplus/numeric.hpp"

namespace minplus {

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix square(std::size_t n, T fill = T{}) { return Matrix(n, n, fill); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool is_square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  T* row(std::size_t i) { return data_.data() + i * cols_; }
  const T* row(std::size_t i) const { return data_.data() + i * cols_; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using WeightMatrix = Matrix<ExpFloat>;
using RankMatrix = Matrix<Rank>;
using WeightSequence = std::vector<ExpFloat>;
using RankSequence = std::vector<Rank>;

// Bounded integer entries with a sentinel for +infinity.
using BoundedInt = std::int64_t;
inline constexpr BoundedInt kBoundedInf = std::int64_t{1} << 60;
using BoundedMatrix = Matrix<BoundedInt>;
using BoundedSequence = std::vector<BoundedInt>;

template <class T>
void require_square_pair(const Matrix<T>& a, const Matrix<T>& b, const char* where) {
  if (!a.is_square() || !b.is_square() || a.rows() != b.rows()) {
    throw std::invalid_argument(std::string(where) + ": dimension mismatch");
  }
}

}  // namespace minplus
