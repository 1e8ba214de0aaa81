#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mwarp/error.hpp"
#include "mwarp/geometry.hpp"
#include "mwarp/graph.hpp"
#include "mwarp/intrinsic.hpp"
#include "mwarp/panel.hpp"

namespace mwarp {

enum class TemplateMethod { manifold, mean, medoid };

inline TemplateMethod parse_template_method(const std::string& s) {
  if (s == "manifold") return TemplateMethod::manifold;
  if (s == "mean") return TemplateMethod::mean;
  if (s == "medoid") return TemplateMethod::medoid;
  throw UsageError("unknown template method '" + s + "' (expected manifold, mean or medoid)");
}

inline const char* to_string(TemplateMethod m) {
  switch (m) {
    case TemplateMethod::manifold: return "manifold";
    case TemplateMethod::mean: return "mean";
    case TemplateMethod::medoid: return "medoid";
  }
  return "?";
}

struct Template {
  std::string label;
  std::vector<double> curve;
  std::optional<std::size_t> source_index;  // row of the training panel, if the curve is one
  TemplateMethod method = TemplateMethod::manifold;
};

/// One representative curve per class, all on the same grid.
struct TemplateSet {
  std::vector<double> grid;
  std::vector<Template> templates;
};

/// Computes the distance matrix used by the manifold method for one class.
/// The default runs the geodesic graph pipeline on the class curves.
using ClassDistanceFn = std::function<Matrix(const CurvePanel&)>;

struct TemplateOptions {
  TemplateMethod method = TemplateMethod::manifold;
  double alpha = 1.0;
  PipelineOptions pipeline;
  ClassDistanceFn distances;  // manifold method only; empty means geodesic_pipeline
};

inline TemplateSet extract_templates(const CurvePanel& train, const TemplateOptions& opt = {}) {
  if (!train.has_labels()) throw UsageError("extract_templates: training panel has no labels");
  TemplateSet out{train.grid, {}};
  for (const std::string& label : train.label_order()) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < train.size(); ++i) {
      if (train.labels[i] == label) members.push_back(i);
    }
    if (members.empty()) throw UsageError("class '" + label + "' has no training curves");
    const CurvePanel cls = train.select_label(label);

    Template tpl{label, {}, std::nullopt, opt.method};
    switch (opt.method) {
      case TemplateMethod::mean:
        tpl.curve = cross_sectional_mean(cls);
        break;
      case TemplateMethod::medoid: {
        const auto est = euclidean_medoid(pairwise_euclidean(cls.values), opt.alpha);
        tpl.source_index = members[est.index];
        break;
      }
      case TemplateMethod::manifold: {
        const Matrix dm = opt.distances ? opt.distances(cls)
                                        : geodesic_pipeline(cls.values, opt.pipeline).distances;
        const auto est = intrinsic_estimate(dm, opt.alpha);
        tpl.source_index = members[est.index];
        break;
      }
    }
    if (tpl.source_index) tpl.curve = train.values.row_copy(*tpl.source_index);
    out.templates.push_back(std::move(tpl));
  }
  return out;
}

/// Number of leading grid points with t_j < cutoff (all of them without a cutoff).
inline std::size_t truncated_length(std::span<const double> grid, std::optional<double> cutoff) {
  if (!cutoff) return grid.size();
  const auto n = static_cast<std::size_t>(
      std::lower_bound(grid.begin(), grid.end(), *cutoff) - grid.begin());
  if (n == 0) throw UsageError("truncation cutoff leaves no grid points");
  return n;
}

namespace detail {

inline std::span<const double> leading(std::span<const double> curve, std::size_t grid_size,
                                       std::size_t keep) {
  if (curve.size() != grid_size && curve.size() != keep) {
    throw UsageError("query has " + std::to_string(curve.size()) + " values, expected " +
                     std::to_string(grid_size) + " (or " + std::to_string(keep) +
                     " after truncation)");
  }
  return curve.first(keep);
}

}  // namespace detail

/// Label of the template closest in Euclidean distance to the query, using
/// only grid points before `truncate_at`. Ties go to the earlier template.
inline std::string classify_nearest_template(const TemplateSet& templates,
                                             std::span<const double> query,
                                             std::optional<double> truncate_at = std::nullopt) {
  if (templates.templates.empty()) throw UsageError("no templates to classify against");
  const std::size_t keep = truncated_length(templates.grid, truncate_at);
  const auto q = detail::leading(query, templates.grid.size(), keep);
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < templates.templates.size(); ++k) {
    const auto& curve = templates.templates[k].curve;
    const double d = squared_distance(q, detail::leading(curve, templates.grid.size(), keep));
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return templates.templates[best].label;
}

/// Majority label among the k nearest training curves (truncated like
/// classify_nearest_template). Equal distances rank the lower index first;
/// tied votes go to the label that appears first in the training panel.
inline std::string knn_classify(const CurvePanel& train, std::span<const double> query,
                                std::size_t k, std::optional<double> truncate_at = std::nullopt) {
  if (!train.has_labels()) throw UsageError("knn_classify: training panel has no labels");
  if (k < 1 || k > train.size()) {
    throw UsageError("k = " + std::to_string(k) + " is outside [1, " +
                     std::to_string(train.size()) + "]");
  }
  const std::size_t keep = truncated_length(train.grid, truncate_at);
  const auto q = detail::leading(query, train.grid.size(), keep);
  std::vector<std::pair<double, std::size_t>> ranked(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    ranked[i] = {squared_distance(q, train.values.row(i).first(keep)), i};
  }
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end());

  const auto order = train.label_order();
  std::vector<std::size_t> votes(order.size(), 0);
  for (std::size_t r = 0; r < k; ++r) {
    const auto& lbl = train.labels[ranked[r].second];
    ++votes[static_cast<std::size_t>(std::find(order.begin(), order.end(), lbl) - order.begin())];
  }
  const auto winner = std::max_element(votes.begin(), votes.end()) - votes.begin();
  return order[static_cast<std::size_t>(winner)];
}

/// counts[r][c]: test curves of reference class r predicted as class c.
struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> counts;

  std::size_t total() const {
    std::size_t s = 0;
    for (const auto& row : counts) s = std::accumulate(row.begin(), row.end(), s);
    return s;
  }

  std::size_t correct() const {
    std::size_t s = 0;
    for (std::size_t r = 0; r < counts.size(); ++r) s += counts[r][r];
    return s;
  }

  double accuracy() const {
    const auto t = total();
    return t ? static_cast<double>(correct()) / static_cast<double>(t) : 0.0;
  }
};

struct Prediction {
  std::size_t index = 0;
  std::string reference;
  std::string predicted;
};

struct Evaluation {
  std::vector<Prediction> predictions;
  ConfusionMatrix confusion;
};

using Classifier = std::function<std::string(std::span<const double>)>;

/// Runs `classify` on every test curve and tallies a confusion matrix over
/// `labels` (rows: reference, columns: prediction).
inline Evaluation evaluate(const Classifier& classify, const std::vector<std::string>& labels,
                           const CurvePanel& test) {
  if (!test.has_labels()) throw UsageError("evaluate: test panel has no labels");
  auto slot = [&](const std::string& l) {
    const auto it = std::find(labels.begin(), labels.end(), l);
    if (it == labels.end()) throw UsageError("label '" + l + "' is not a training class");
    return static_cast<std::size_t>(it - labels.begin());
  };
  Evaluation ev;
  ev.confusion.labels = labels;
  ev.confusion.counts.assign(labels.size(), std::vector<std::size_t>(labels.size(), 0));
  for (std::size_t i = 0; i < test.size(); ++i) {
    const std::string predicted = classify(test.values.row(i));
    ++ev.confusion.counts[slot(test.labels[i])][slot(predicted)];
    ev.predictions.push_back({i, test.labels[i], predicted});
  }
  return ev;
}

/// What the classify subcommand runs: a template method or k-NN.
struct ClassifierConfig {
  std::string method = "manifold";  // manifold | mean | medoid | knn
  double alpha = 1.0;
  std::size_t k = 1;
  std::optional<double> truncate_at;
  double tol = -1.0;  // negative: default coverage tolerance
};

struct ClassificationRun {
  std::optional<TemplateSet> templates;  // absent for knn
  Evaluation evaluation;
};

inline ClassificationRun run_classification(const ClassifierConfig& cfg, const CurvePanel& train,
                                            const CurvePanel& test, unsigned threads = 0) {
  if (train.grid != test.grid) throw UsageError("train and test panels use different grids");
  const auto labels = train.label_order();
  ClassificationRun run;
  if (cfg.method == "knn") {
    run.evaluation = evaluate(
        [&](std::span<const double> q) { return knn_classify(train, q, cfg.k, cfg.truncate_at); },
        labels, test);
    return run;
  }
  TemplateOptions opt;
  opt.method = parse_template_method(cfg.method);
  opt.alpha = cfg.alpha;
  opt.pipeline = {cfg.tol, threads};
  run.templates = extract_templates(train, opt);
  run.evaluation = evaluate(
      [&](std::span<const double> q) {
        return classify_nearest_template(*run.templates, q, cfg.truncate_at);
      },
      labels, test);
  return run;
}

}  // namespace mwarp
