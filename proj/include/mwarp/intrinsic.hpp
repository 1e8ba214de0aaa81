#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mwarp/error.hpp"
#include "mwarp/geometry.hpp"
#include "mwarp/matrix.hpp"
#include "mwarp/panel.hpp"

namespace mwarp {

/// The sample element minimizing the summed alpha-power distance to the sample.
struct IntrinsicEstimate {
  std::size_t index = 0;
  double objective = 0.0;
  double alpha = 1.0;
};

/// Sum over j of dm(i, j)^alpha, accumulated in long double.
inline double alpha_objective(const Matrix& dm, std::size_t i, double alpha) {
  long double sum = 0.0L;
  if (alpha == 1.0) {
    for (double d : dm.row(i)) sum += d;
  } else {
    for (double d : dm.row(i)) sum += std::pow(static_cast<long double>(d), alpha);
  }
  return static_cast<double>(sum);
}

/// argmin over sample indices of the alpha-power objective; the smallest
/// index wins ties. alpha = 1 gives the intrinsic sample median, alpha = 2
/// the sample-restricted intrinsic mean.
inline IntrinsicEstimate intrinsic_estimate(const Matrix& dm, double alpha = 1.0) {
  if (!(alpha > 0.0)) throw UsageError("alpha must be > 0");
  if (dm.empty()) throw UsageError("intrinsic_estimate: empty distance matrix");
  if (dm.rows() != dm.cols()) throw UsageError("intrinsic_estimate: distance matrix is not square");
  IntrinsicEstimate best{0, alpha_objective(dm, 0, alpha), alpha};
  for (std::size_t i = 1; i < dm.rows(); ++i) {
    const double obj = alpha_objective(dm, i, alpha);
    if (obj < best.objective) best = {i, obj, alpha};
  }
  return best;
}

/// Pairwise Euclidean distances between rows.
inline Matrix pairwise_euclidean(const Matrix& cloud) {
  const std::size_t n = cloud.rows();
  Matrix dm(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = euclidean_distance(cloud.row(i), cloud.row(j));
      dm(i, j) = d;
      dm(j, i) = d;
    }
  }
  return dm;
}

/// Baseline: the same argmin over the Euclidean distance matrix.
inline IntrinsicEstimate euclidean_medoid(const Matrix& dm_euclidean, double alpha = 1.0) {
  return intrinsic_estimate(dm_euclidean, alpha);
}

/// Coordinatewise mean, the minimizer of the summed squared Euclidean distance.
inline std::vector<double> euclidean_frechet_mean(const Matrix& cloud) {
  if (cloud.empty()) throw UsageError("euclidean_frechet_mean: empty point cloud");
  std::vector<long double> acc(cloud.cols(), 0.0L);
  for (std::size_t i = 0; i < cloud.rows(); ++i) {
    for (std::size_t k = 0; k < cloud.cols(); ++k) acc[k] += cloud(i, k);
  }
  std::vector<double> mean(cloud.cols());
  for (std::size_t k = 0; k < cloud.cols(); ++k) {
    mean[k] = static_cast<double>(acc[k] / static_cast<long double>(cloud.rows()));
  }
  return mean;
}

/// Pointwise mean of the curves.
inline std::vector<double> cross_sectional_mean(const CurvePanel& panel) {
  if (panel.size() == 0) throw UsageError("cross_sectional_mean: panel has no curves");
  if (panel.values.cols() != panel.length()) {
    throw UsageError("cross_sectional_mean: curve length does not match the grid");
  }
  return euclidean_frechet_mean(panel.values);
}

}  // namespace mwarp
