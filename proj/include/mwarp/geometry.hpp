#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mwarp/error.hpp"

namespace mwarp {

/// A point of R^p, viewed in place (usually a row of a PointCloud).
using PointView = std::span<const double>;

/// Closed segment {a + lambda (b - a) : lambda in [0,1]}.
struct Segment {
  PointView a;
  PointView b;
};

struct Ball {
  PointView center;
  double radius = 0.0;
};

/// Sub-interval of the segment parameter lambda in [0,1].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  friend bool operator==(const Interval&, const Interval&) = default;
};

namespace detail {

inline void require_same_dim(PointView a, PointView b) {
  if (a.size() != b.size()) {
    throw UsageError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
}

}  // namespace detail

inline double squared_distance(PointView a, PointView b) {
  detail::require_same_dim(a, b);
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sum += d * d;
  }
  return sum;
}

inline double euclidean_distance(PointView a, PointView b) {
  return std::sqrt(squared_distance(a, b));
}

/// Parameter range of the part of `s` lying in the closed ball of radius
/// `ball.radius + tol`, or nullopt if the two do not meet.
///
/// Solved around the foot of the perpendicular from the center to the
/// segment's supporting line, which avoids the cancellation of the textbook
/// quadratic formula when the segment is long and the ball small.
inline std::optional<Interval> segment_ball_intersection(const Segment& s, const Ball& ball,
                                                         double tol = 0.0) {
  detail::require_same_dim(s.a, s.b);
  detail::require_same_dim(s.a, ball.center);
  const double reach = ball.radius + tol;
  const double reach2 = reach * reach;

  double dd = 0.0;  // |b - a|^2
  double wd = 0.0;  // (a - c) . (b - a)
  for (std::size_t k = 0; k < s.a.size(); ++k) {
    const double d = s.b[k] - s.a[k];
    const double w = s.a[k] - ball.center[k];
    dd += d * d;
    wd += w * d;
  }

  if (dd == 0.0) {
    if (squared_distance(s.a, ball.center) <= reach2) return Interval{0.0, 1.0};
    return std::nullopt;
  }

  const double foot = -wd / dd;
  double perp2 = 0.0;
  for (std::size_t k = 0; k < s.a.size(); ++k) {
    const double x = s.a[k] + foot * (s.b[k] - s.a[k]) - ball.center[k];
    perp2 += x * x;
  }
  if (perp2 > reach2) return std::nullopt;

  const double half = std::sqrt((reach2 - perp2) / dd);
  const double lo = std::max(0.0, foot - half);
  const double hi = std::min(1.0, foot + half);
  if (lo > hi) return std::nullopt;
  return Interval{lo, hi};
}

/// True iff the sorted-and-merged union of `intervals` covers [0,1] leaving no
/// gap wider than `gap`. Reorders `intervals`.
inline bool intervals_cover_unit(std::vector<Interval>& intervals, double gap) {
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  double reached = 0.0;  // [0, reached] is covered once the first interval is in
  for (const Interval& iv : intervals) {
    if (iv.lo > reached + gap) return false;
    reached = std::max(reached, iv.hi);
    if (reached + gap >= 1.0) return true;
  }
  return false;
}

/// Whether the segment lies in the union of the balls, up to `tol`.
///
/// `tol` is a length: each radius is inflated by it, and gaps between
/// consecutive intervals shorter than `tol` (measured along the segment) are
/// ignored. A degenerate segment is covered iff some ball contains its point.
inline bool segment_covered(const Segment& s, std::span<const Ball> balls, double tol) {
  if (tol < 0.0) throw UsageError("segment_covered: tol must be >= 0");
  const double length = euclidean_distance(s.a, s.b);
  std::vector<Interval> intervals;
  intervals.reserve(balls.size());
  for (const Ball& ball : balls) {
    if (auto iv = segment_ball_intersection(s, ball, tol)) {
      if (length == 0.0) return true;
      intervals.push_back(*iv);
    }
  }
  if (length == 0.0) return false;
  return intervals_cover_unit(intervals, tol / length);
}

}  // namespace mwarp
