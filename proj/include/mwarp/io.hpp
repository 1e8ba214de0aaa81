#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mwarp/classification.hpp"
#include "mwarp/error.hpp"
#include "mwarp/graph.hpp"
#include "mwarp/intrinsic.hpp"
#include "mwarp/matrix.hpp"
#include "mwarp/panel.hpp"
#include "mwarp/warping.hpp"

// Text formats. All numbers are written with 17 significant digits through
// std::to_chars and read back with std::from_chars, so values round-trip
// bit-exactly and the locale never matters.
//
//   panel      header "t,<t_1>,...,<t_m>", rows "<label|->,<v_1>,...,<v_m>"
//   shifts     header "index,shift"
//   cloud      header "x1,...,xp" (optional on read), one point per row
//   matrix     n rows of n values, no header
//   edge list  header "i,j,weight", 0-based indices with i < j
//   confusion  header "reference\predicted,<labels>", one row per reference class

namespace mwarp::io {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return {buf, res.ptr};
}

inline double parse_double(std::string_view text, const std::string& where) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw DataError(where + ": '" + std::string(text) + "' is not a number");
  }
  return v;
}

inline std::size_t parse_index(std::string_view text, const std::string& where) {
  std::size_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw DataError(where + ": '" + std::string(text) + "' is not an index");
  }
  return v;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

/// Non-empty lines of a file, each split on commas.
inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "' for reading");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(split_csv_line(line));
  }
  return rows;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  return out;
}

inline void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

inline void write_values(std::ostream& out, std::span<const double> values) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out << ',';
    out << format_double(values[k]);
  }
}

inline std::string where(const std::filesystem::path& path, std::size_t row) {
  return path.string() + " row " + std::to_string(row);
}

// --- panels -----------------------------------------------------------------

inline void write_panel(const std::filesystem::path& path, const CurvePanel& panel) {
  auto out = open_out(path);
  out << 't';
  for (double t : panel.grid) out << ',' << format_double(t);
  out << '\n';
  for (std::size_t i = 0; i < panel.size(); ++i) {
    out << (panel.has_labels() ? panel.labels[i] : std::string("-")) << ',';
    write_values(out, panel.values.row(i));
    out << '\n';
  }
  finish(out, path);
}

inline bool is_panel_header(const std::vector<std::string>& row) {
  return !row.empty() && row.front() == "t";
}

inline CurvePanel panel_from_rows(const std::vector<std::vector<std::string>>& rows,
                                  const std::filesystem::path& path) {
  if (rows.empty() || !is_panel_header(rows.front())) {
    throw DataError(path.string() + " row 1: expected a header starting with 't'");
  }
  CurvePanel panel;
  for (std::size_t j = 1; j < rows[0].size(); ++j) {
    panel.grid.push_back(parse_double(rows[0][j], where(path, 1)));
  }
  const std::size_t m = panel.grid.size();
  Matrix values(rows.size() - 1, m);
  bool any_label = false;
  std::vector<std::string> labels;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != m + 1) {
      throw DataError(where(path, r + 1) + ": " + std::to_string(row.size()) + " fields, expected " +
                      std::to_string(m + 1));
    }
    labels.push_back(row[0]);
    if (row[0] != "-") any_label = true;
    for (std::size_t j = 0; j < m; ++j) values(r - 1, j) = parse_double(row[j + 1], where(path, r + 1));
  }
  panel.values = std::move(values);
  if (any_label) panel.labels = std::move(labels);
  try {
    panel.validate();
  } catch (const UsageError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return panel;
}

inline CurvePanel read_panel(const std::filesystem::path& path) {
  return panel_from_rows(read_csv(path), path);
}

inline void write_shifts(const std::filesystem::path& path, std::span<const double> shifts) {
  auto out = open_out(path);
  out << "index,shift\n";
  for (std::size_t i = 0; i < shifts.size(); ++i) out << i << ',' << format_double(shifts[i]) << '\n';
  finish(out, path);
}

inline std::vector<double> read_shifts(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  if (rows.empty() || rows[0].size() != 2 || rows[0][0] != "index") {
    throw DataError(path.string() + " row 1: expected header 'index,shift'");
  }
  std::vector<double> shifts(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 2) throw DataError(where(path, r + 1) + ": expected 2 fields");
    const auto idx = parse_index(rows[r][0], where(path, r + 1));
    if (idx >= shifts.size()) throw DataError(where(path, r + 1) + ": index out of range");
    shifts[idx] = parse_double(rows[r][1], where(path, r + 1));
  }
  return shifts;
}

// --- point clouds and matrices -----------------------------------------------

inline void write_cloud(const std::filesystem::path& path, const PointCloud& cloud) {
  auto out = open_out(path);
  for (std::size_t k = 0; k < cloud.cols(); ++k) out << (k ? ",x" : "x") << k + 1;
  out << '\n';
  for (std::size_t i = 0; i < cloud.rows(); ++i) {
    write_values(out, cloud.row(i));
    out << '\n';
  }
  finish(out, path);
}

inline Matrix matrix_from_rows(const std::vector<std::vector<std::string>>& rows,
                               std::size_t first, const std::filesystem::path& path) {
  if (rows.size() <= first) return {};
  const std::size_t cols = rows[first].size();
  Matrix m(rows.size() - first, cols);
  for (std::size_t r = first; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw DataError(where(path, r + 1) + ": " + std::to_string(rows[r].size()) +
                      " fields, expected " + std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) m(r - first, c) = parse_double(rows[r][c], where(path, r + 1));
  }
  return m;
}

/// Reads a point cloud with or without an "x1,...,xp" header.
inline PointCloud read_cloud(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  std::size_t first = 0;
  if (!rows.empty() && !rows[0].empty() && !rows[0][0].empty() && rows[0][0][0] == 'x') first = 1;
  return matrix_from_rows(rows, first, path);
}

/// Points to embed: the curves of a panel file, or the rows of a cloud file.
inline PointCloud read_points(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  if (!rows.empty() && is_panel_header(rows.front())) return panel_from_rows(rows, path).values;
  std::size_t first = 0;
  if (!rows.empty() && !rows[0].empty() && !rows[0][0].empty() && rows[0][0][0] == 'x') first = 1;
  return matrix_from_rows(rows, first, path);
}

inline void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    write_values(out, m.row(i));
    out << '\n';
  }
  finish(out, path);
}

inline Matrix read_matrix(const std::filesystem::path& path) {
  return matrix_from_rows(read_csv(path), 0, path);
}

inline void write_edges(const std::filesystem::path& path, std::span<const Edge> edges) {
  auto out = open_out(path);
  out << "i,j,weight\n";
  for (const Edge& e : edges) out << e.i << ',' << e.j << ',' << format_double(e.weight) << '\n';
  finish(out, path);
}

inline WeightedGraph read_edges(const std::filesystem::path& path, std::size_t n) {
  const auto rows = read_csv(path);
  if (rows.empty() || rows[0] != std::vector<std::string>{"i", "j", "weight"}) {
    throw DataError(path.string() + " row 1: expected header 'i,j,weight'");
  }
  WeightedGraph g{n, {}};
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 3) throw DataError(where(path, r + 1) + ": expected 3 fields");
    g.edges.push_back({parse_index(rows[r][0], where(path, r + 1)),
                       parse_index(rows[r][1], where(path, r + 1)),
                       parse_double(rows[r][2], where(path, r + 1))});
  }
  return g;
}

// --- estimates, diagnostics, classification -----------------------------------

inline nlohmann::json to_json(const IntrinsicEstimate& est) {
  return {{"index", est.index}, {"objective", est.objective}, {"alpha", est.alpha}};
}

inline nlohmann::json to_json(const GraphDiagnostics& d) {
  return {{"n", d.n},
          {"tree_edges", d.tree_edges},
          {"kprime_edges", d.kprime_edges},
          {"complete_edges", d.complete_edges},
          {"max_radius", d.max_radius},
          {"diameter", d.diameter},
          {"edge_ratio", d.edge_ratio},
          {"radius_fraction", d.radius_fraction}};
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

/// Classifier config: {method, alpha, k, truncate_at, tol}; every key optional.
inline ClassifierConfig classifier_config_from_json(const nlohmann::json& j) {
  ClassifierConfig cfg;
  try {
    if (j.contains("method")) cfg.method = j.at("method").get<std::string>();
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("k")) cfg.k = j.at("k").get<std::size_t>();
    if (j.contains("truncate_at") && !j.at("truncate_at").is_null()) {
      cfg.truncate_at = j.at("truncate_at").get<double>();
    }
    if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("classifier config: ") + e.what());
  }
  if (cfg.method != "knn") parse_template_method(cfg.method);
  if (!(cfg.alpha > 0.0)) throw UsageError("classifier config: alpha must be > 0");
  return cfg;
}

struct BenchmarkConfig {
  std::uint64_t seed = 1;
  GridSpec grid;
  std::vector<ClassSpec> classes;
};

/// {"seed", "grid": {"m", "lo", "hi"}, "classes": [{"label", "target",
///  "n_train", "n_test", "amplitude": [lo, hi], "scale": [lo, hi],
///  "shift": [lo, hi], "noise_sd"}]}
inline BenchmarkConfig benchmark_config_from_json(const nlohmann::json& j) {
  BenchmarkConfig cfg;
  auto law = [](const nlohmann::json& c, const char* key, UniformLaw fallback) {
    if (!c.contains(key)) return fallback;
    const auto& v = c.at(key);
    if (!v.is_array() || v.size() != 2) {
      throw DataError(std::string("benchmark config: '") + key + "' must be [lo, hi]");
    }
    UniformLaw out{v[0].get<double>(), v[1].get<double>()};
    if (out.lo > out.hi) throw DataError(std::string("benchmark config: '") + key + "' has lo > hi");
    return out;
  };
  try {
    cfg.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      cfg.grid = {g.value("m", std::size_t{100}), g.value("lo", -10.0), g.value("hi", 10.0)};
    }
    for (const auto& c : j.at("classes")) {
      ClassSpec spec;
      spec.label = c.at("label").get<std::string>();
      spec.warp.target = make_target(c.value("target", std::string("tsint")));
      spec.warp.amplitude = law(c, "amplitude", {1.0, 1.0});
      spec.warp.scale = law(c, "scale", {1.0, 1.0});
      spec.warp.shift = law(c, "shift", {0.0, 0.0});
      spec.warp.noise_sd = c.value("noise_sd", 0.0);
      spec.n_train = c.at("n_train").get<std::size_t>();
      spec.n_test = c.value("n_test", std::size_t{0});
      cfg.classes.push_back(std::move(spec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("benchmark config: ") + e.what());
  }
  return cfg;
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "' for reading");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

inline void write_confusion(const std::filesystem::path& path, const ConfusionMatrix& cm) {
  auto out = open_out(path);
  out << "reference\\predicted";
  for (const auto& l : cm.labels) out << ',' << l;
  out << '\n';
  for (std::size_t r = 0; r < cm.labels.size(); ++r) {
    out << cm.labels[r];
    for (std::size_t c : cm.counts[r]) out << ',' << c;
    out << '\n';
  }
  finish(out, path);
}

inline ConfusionMatrix read_confusion(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  if (rows.empty() || rows[0].empty() || rows[0][0] != "reference\\predicted") {
    throw DataError(path.string() + " row 1: expected header 'reference\\predicted,...'");
  }
  ConfusionMatrix cm;
  cm.labels.assign(rows[0].begin() + 1, rows[0].end());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != cm.labels.size() + 1 || rows[r][0] != cm.labels[r - 1]) {
      throw DataError(where(path, r + 1) + ": row does not match the header labels");
    }
    std::vector<std::size_t> counts;
    for (std::size_t c = 1; c < rows[r].size(); ++c) counts.push_back(parse_index(rows[r][c], where(path, r + 1)));
    cm.counts.push_back(std::move(counts));
  }
  return cm;
}

/// Templates in panel layout (label column = class label).
inline void write_templates(const std::filesystem::path& path, const TemplateSet& set) {
  CurvePanel panel;
  panel.grid = set.grid;
  std::vector<std::vector<double>> rows;
  for (const auto& t : set.templates) {
    rows.push_back(t.curve);
    panel.labels.push_back(t.label);
  }
  panel.values = Matrix::from_rows(rows);
  write_panel(path, panel);
}

inline nlohmann::json to_json(const TemplateSet& set) {
  auto arr = nlohmann::json::array();
  for (const auto& t : set.templates) {
    arr.push_back({{"label", t.label},
                   {"method", to_string(t.method)},
                   {"source_index", t.source_index ? nlohmann::json(*t.source_index) : nlohmann::json()}});
  }
  return arr;
}

inline void write_predictions(const std::filesystem::path& path, std::span<const Prediction> preds) {
  auto out = open_out(path);
  out << "index,reference,predicted\n";
  for (const auto& p : preds) out << p.index << ',' << p.reference << ',' << p.predicted << '\n';
  finish(out, path);
}

/// Wide plot table: one row per grid point, columns t, every curve, then
/// the named extra series.
inline void write_plot_data(const std::filesystem::path& path, const CurvePanel& panel,
                            const std::vector<std::pair<std::string, std::vector<double>>>& series) {
  auto out = open_out(path);
  out << 't';
  for (std::size_t i = 0; i < panel.size(); ++i) out << ",curve_" << i;
  for (const auto& [name, _] : series) out << ',' << name;
  out << '\n';
  for (std::size_t j = 0; j < panel.length(); ++j) {
    out << format_double(panel.grid[j]);
    for (std::size_t i = 0; i < panel.size(); ++i) out << ',' << format_double(panel.values(i, j));
    for (const auto& [_, values] : series) out << ',' << format_double(values.at(j));
    out << '\n';
  }
  finish(out, path);
}

}  // namespace mwarp::io
