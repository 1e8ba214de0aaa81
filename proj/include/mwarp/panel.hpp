#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mwarp/error.hpp"
#include "mwarp/matrix.hpp"

namespace mwarp {

/// Curves sampled on a shared time grid: values(i, j) is curve i at grid[j].
struct CurvePanel {
  std::vector<double> grid;
  Matrix values;
  std::vector<std::string> labels;  // empty, or one per curve
  std::vector<double> shifts;       // ground-truth shifts, empty when unknown

  std::size_t size() const noexcept { return values.rows(); }
  std::size_t length() const noexcept { return grid.size(); }
  bool has_labels() const noexcept { return !labels.empty(); }
  bool has_shifts() const noexcept { return !shifts.empty(); }

  /// Throws UsageError describing the first violated invariant.
  void validate() const {
    if (grid.size() < 2) throw UsageError("panel grid needs at least 2 points");
    for (std::size_t j = 1; j < grid.size(); ++j) {
      if (!(grid[j] > grid[j - 1])) {
        throw UsageError("panel grid is not strictly increasing at index " + std::to_string(j));
      }
    }
    if (!values.empty() && values.cols() != grid.size()) {
      throw UsageError("panel rows have " + std::to_string(values.cols()) +
                       " values but the grid has " + std::to_string(grid.size()));
    }
    for (std::size_t i = 0; i < values.rows(); ++i) {
      for (double v : values.row(i)) {
        if (!std::isfinite(v)) throw UsageError("non-finite value in curve " + std::to_string(i));
      }
    }
    if (!labels.empty() && labels.size() != values.rows()) {
      throw UsageError("panel has " + std::to_string(labels.size()) + " labels for " +
                       std::to_string(values.rows()) + " curves");
    }
    if (!shifts.empty() && shifts.size() != values.rows()) {
      throw UsageError("panel has " + std::to_string(shifts.size()) + " shifts for " +
                       std::to_string(values.rows()) + " curves");
    }
  }

  /// Curves whose label equals `label`, in their original order.
  CurvePanel select_label(const std::string& label) const {
    std::vector<std::vector<double>> rows;
    CurvePanel out{grid, {}, {}, {}};
    for (std::size_t i = 0; i < size(); ++i) {
      if (labels.at(i) != label) continue;
      rows.push_back(values.row_copy(i));
      out.labels.push_back(label);
      if (has_shifts()) out.shifts.push_back(shifts[i]);
    }
    out.values = Matrix::from_rows(rows);
    return out;
  }

  /// Distinct labels in order of first appearance.
  std::vector<std::string> label_order() const {
    std::vector<std::string> out;
    for (const auto& l : labels) {
      if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
    }
    return out;
  }
};

}  // namespace mwarp
