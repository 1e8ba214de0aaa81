#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "mwarp/error.hpp"
#include "mwarp/geometry.hpp"
#include "mwarp/matrix.hpp"
#include "mwarp/parallel.hpp"

namespace mwarp {

/// Undirected edge between sample indices i < j, weighted by Euclidean length.
struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Total order used for Kruskal and for every exported edge list.
inline bool edge_less(const Edge& x, const Edge& y) {
  return std::tie(x.weight, x.i, x.j) < std::tie(y.weight, y.i, y.j);
}

struct WeightedGraph {
  std::size_t n = 0;
  std::vector<Edge> edges;
};

/// Exactly n-1 edges forming a tree over n vertices (empty for n = 1).
struct SpanningTree {
  std::size_t n = 0;
  std::vector<Edge> edges;

  double total_weight() const {
    double sum = 0.0;
    for (const Edge& e : edges) sum += e.weight;
    return sum;
  }

  WeightedGraph as_graph() const { return {n, edges}; }
};

/// radii[i] is the longest spanning-tree edge incident to vertex i.
struct BallRadii {
  std::vector<double> radii;
};

/// Symmetric n x n matrix of path-length distances.
using DistanceMatrix = Matrix;

struct PathRecord {
  std::size_t source = 0;
  std::size_t target = 0;
  std::vector<std::size_t> vertices;
  double length = 0.0;
};

namespace detail {

class DisjointSets {
public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};

using Adjacency = std::vector<std::vector<std::pair<std::size_t, double>>>;

inline Adjacency adjacency_of(const WeightedGraph& g) {
  Adjacency adj(g.n);
  for (const Edge& e : g.edges) {
    if (e.i >= g.n || e.j >= g.n || e.i == e.j) {
      throw UsageError("invalid edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                       ") in graph with " + std::to_string(g.n) + " vertices");
    }
    adj[e.i].emplace_back(e.j, e.weight);
    adj[e.j].emplace_back(e.i, e.weight);
  }
  return adj;
}

/// Single-source Dijkstra. Fills dist (infinity when unreachable) and, if
/// non-null, the predecessor of each reached vertex.
inline void dijkstra(const Adjacency& adj, std::size_t source, std::vector<double>& dist,
                     std::vector<std::size_t>* pred = nullptr) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const std::size_t n = adj.size();
  dist.assign(n, inf);
  if (pred) pred->assign(n, n);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, w] : adj[u]) {
      const double cand = d + w;
      if (cand < dist[v]) {
        dist[v] = cand;
        if (pred) (*pred)[v] = u;
        heap.emplace(cand, v);
      }
    }
  }
}

inline std::string describe_components(const WeightedGraph& g) {
  DisjointSets sets(g.n);
  for (const Edge& e : g.edges) sets.unite(e.i, e.j);
  std::vector<std::vector<std::size_t>> groups(g.n);
  for (std::size_t v = 0; v < g.n; ++v) groups[sets.find(v)].push_back(v);
  std::ostringstream out;
  std::size_t count = 0;
  for (const auto& grp : groups) {
    if (grp.empty()) continue;
    out << (count++ ? "; " : "") << '{';
    for (std::size_t k = 0; k < grp.size() && k < 8; ++k) out << (k ? "," : "") << grp[k];
    if (grp.size() > 8) out << ",... (" << grp.size() << " vertices)";
    out << '}';
  }
  return "graph is disconnected: " + std::to_string(count) + " components " + out.str();
}

}  // namespace detail

/// Complete Euclidean graph over the rows of `cloud`, edges in (i, j) order.
inline WeightedGraph build_complete_graph(const PointCloud& cloud) {
  const std::size_t n = cloud.rows();
  WeightedGraph g{n, {}};
  g.edges.reserve(n * (n > 0 ? n - 1 : 0) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      g.edges.push_back({i, j, euclidean_distance(cloud.row(i), cloud.row(j))});
    }
  }
  return g;
}

/// Minimum spanning tree by Kruskal. Ties resolve by (weight, i, j), so the
/// result is unique even when edge lengths repeat.
inline SpanningTree compute_emst(const WeightedGraph& graph) {
  if (graph.n == 0) throw UsageError("compute_emst: graph has no vertices");
  std::vector<Edge> order = graph.edges;
  for (Edge& e : order) {
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::sort(order.begin(), order.end(), edge_less);
  detail::DisjointSets sets(graph.n);
  SpanningTree tree{graph.n, {}};
  tree.edges.reserve(graph.n - 1);
  for (const Edge& e : order) {
    if (tree.edges.size() + 1 == graph.n) break;
    if (sets.unite(e.i, e.j)) tree.edges.push_back(e);
  }
  if (tree.edges.size() + 1 != graph.n) throw DataError(detail::describe_components(graph));
  return tree;
}

inline BallRadii ball_radii(const SpanningTree& tree) {
  if (tree.n < 2) throw UsageError("ball_radii: a tree with fewer than 2 vertices has no edges");
  BallRadii out{std::vector<double>(tree.n, 0.0)};
  for (const Edge& e : tree.edges) {
    out.radii[e.i] = std::max(out.radii[e.i], e.weight);
    out.radii[e.j] = std::max(out.radii[e.j], e.weight);
  }
  return out;
}

/// Edge set of the ball-coverage graph: every pair whose connecting segment
/// lies in the union of the balls B(X_k, radii[k]), up to `tol`.
///
/// Pairs listed in `admitted` (the spanning-tree edges) are kept without a
/// coverage test; each is covered by its own endpoint ball by construction.
/// Candidate pairs are tested independently on `threads` workers and merged
/// in (i, j) order.
inline WeightedGraph build_kprime(const PointCloud& cloud, const BallRadii& radii, double tol,
                                  std::span<const Edge> admitted = {}, unsigned threads = 0) {
  const std::size_t n = cloud.rows();
  if (radii.radii.size() != n) {
    throw UsageError("build_kprime: " + std::to_string(radii.radii.size()) + " radii for " +
                     std::to_string(n) + " points");
  }
  if (tol < 0.0) throw UsageError("build_kprime: tol must be >= 0");

  std::vector<char> tree_pair(n * n, 0);
  for (const Edge& e : admitted) {
    tree_pair[e.i * n + e.j] = 1;
    tree_pair[e.j * n + e.i] = 1;
  }

  std::vector<Ball> balls(n);
  for (std::size_t k = 0; k < n; ++k) balls[k] = Ball{cloud.row(k), radii.radii[k]};

  // Row i of `keep` records the verdict for pairs (i, j > i).
  std::vector<std::vector<char>> keep(n);
  parallel_for(n, threads, [&](std::size_t i) {
    keep[i].assign(n, 0);
    std::vector<Interval> intervals;
    intervals.reserve(n);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (tree_pair[i * n + j]) {
        keep[i][j] = 1;
        continue;
      }
      const Segment seg{cloud.row(i), cloud.row(j)};
      const double length = euclidean_distance(seg.a, seg.b);
      if (length == 0.0) {
        keep[i][j] = 1;  // the point X_i sits in its own ball
        continue;
      }
      intervals.clear();
      for (const Ball& ball : balls) {
        if (auto iv = segment_ball_intersection(seg, ball, tol)) intervals.push_back(*iv);
      }
      keep[i][j] = intervals_cover_unit(intervals, tol / length) ? 1 : 0;
    }
  });

  WeightedGraph g{n, {}};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (keep[i][j]) g.edges.push_back({i, j, euclidean_distance(cloud.row(i), cloud.row(j))});
    }
  }
  return g;
}

/// All-pairs shortest path lengths, one Dijkstra run per source.
/// Entry (i, j) and (j, i) are set to the smaller of the two runs' values so
/// the matrix is exactly symmetric.
inline DistanceMatrix shortest_path_distances(const WeightedGraph& graph, unsigned threads = 0) {
  const std::size_t n = graph.n;
  const auto adj = detail::adjacency_of(graph);
  DistanceMatrix dm(n, n);
  bool disconnected = false;
  parallel_for(n, threads, [&](std::size_t s) {
    std::vector<double> dist;
    detail::dijkstra(adj, s, dist);
    std::copy(dist.begin(), dist.end(), dm.row(s).begin());
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::min(dm(i, j), dm(j, i));
      if (d == std::numeric_limits<double>::infinity()) disconnected = true;
      dm(i, j) = d;
      dm(j, i) = d;
    }
  }
  if (disconnected) throw DataError(detail::describe_components(graph));
  return dm;
}

/// A minimum-length path from source to target.
inline PathRecord shortest_path(const WeightedGraph& graph, std::size_t source,
                                std::size_t target) {
  if (source >= graph.n || target >= graph.n) throw UsageError("shortest_path: vertex out of range");
  const auto adj = detail::adjacency_of(graph);
  std::vector<double> dist;
  std::vector<std::size_t> pred;
  detail::dijkstra(adj, source, dist, &pred);
  if (dist[target] == std::numeric_limits<double>::infinity()) {
    throw DataError(detail::describe_components(graph));
  }
  PathRecord rec{source, target, {}, dist[target]};
  for (std::size_t v = target; v != source; v = pred[v]) rec.vertices.push_back(v);
  rec.vertices.push_back(source);
  std::reverse(rec.vertices.begin(), rec.vertices.end());
  return rec;
}

/// Largest pairwise Euclidean distance in the cloud.
inline double cloud_diameter(const PointCloud& cloud) {
  double best = 0.0;
  for (std::size_t i = 0; i < cloud.rows(); ++i) {
    for (std::size_t j = i + 1; j < cloud.rows(); ++j) {
      best = std::max(best, squared_distance(cloud.row(i), cloud.row(j)));
    }
  }
  return std::sqrt(best);
}

/// Coverage tolerance used when none is given: 1e-9 of the cloud diameter.
inline double default_tolerance(const PointCloud& cloud) { return 1e-9 * cloud_diameter(cloud); }

struct GeodesicResult {
  SpanningTree tree;
  BallRadii radii;
  WeightedGraph kprime;
  DistanceMatrix distances;
  double diameter = 0.0;
  double tol = 0.0;
};

struct PipelineOptions {
  double tol = -1.0;  // negative: default_tolerance(cloud)
  unsigned threads = 0;
};

/// Complete graph, EMST, ball radii, coverage graph and its path metric.
inline GeodesicResult geodesic_pipeline(const PointCloud& cloud, const PipelineOptions& opt = {}) {
  const std::size_t n = cloud.rows();
  if (n == 0) throw UsageError("geodesic_pipeline: empty point cloud");
  GeodesicResult out;
  out.diameter = cloud_diameter(cloud);
  out.tol = opt.tol >= 0.0 ? opt.tol : 1e-9 * out.diameter;
  if (n == 1) {
    out.tree = {1, {}};
    out.radii = {{0.0}};
    out.kprime = {1, {}};
    out.distances = DistanceMatrix(1, 1);
    return out;
  }
  out.tree = compute_emst(build_complete_graph(cloud));
  out.radii = ball_radii(out.tree);
  out.kprime = build_kprime(cloud, out.radii, out.tol, out.tree.edges, opt.threads);
  out.distances = shortest_path_distances(out.kprime, opt.threads);
  return out;
}

struct GraphDiagnostics {
  std::size_t n = 0;
  std::size_t tree_edges = 0;
  std::size_t kprime_edges = 0;
  std::size_t complete_edges = 0;
  double max_radius = 0.0;
  double diameter = 0.0;
  double edge_ratio = 0.0;       // |E'| / |E_T|
  double radius_fraction = 0.0;  // max radius / diameter
};

inline GraphDiagnostics diagnose(const GeodesicResult& r) {
  GraphDiagnostics d;
  d.n = r.kprime.n;
  d.tree_edges = r.tree.edges.size();
  d.kprime_edges = r.kprime.edges.size();
  d.complete_edges = d.n * (d.n > 0 ? d.n - 1 : 0) / 2;
  for (double x : r.radii.radii) d.max_radius = std::max(d.max_radius, x);
  d.diameter = r.diameter;
  d.edge_ratio = d.tree_edges ? static_cast<double>(d.kprime_edges) / d.tree_edges : 0.0;
  d.radius_fraction = d.diameter > 0.0 ? d.max_radius / d.diameter : 0.0;
  return d;
}

}  // namespace mwarp
