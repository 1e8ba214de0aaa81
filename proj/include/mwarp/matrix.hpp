#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mwarp/error.hpp"

namespace mwarp {

/// Dense row-major matrix of doubles. Used for point clouds (one point per
/// row), curve values (one curve per row) and distance matrices.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  /// Builds from nested rows; all rows must have the same length.
  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    Matrix out(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != out.cols_) {
        throw UsageError("ragged rows: row " + std::to_string(i) + " has " +
                         std::to_string(rows[i].size()) + " values, expected " +
                         std::to_string(out.cols_));
      }
      std::copy(rows[i].begin(), rows[i].end(), out.data_.begin() + i * out.cols_);
    }
    return out;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double> row_copy(std::size_t r) const {
    auto s = row(r);
    return {s.begin(), s.end()};
  }

  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// n points in p-dimensional space, one per row.
using PointCloud = Matrix;

}  // namespace mwarp
