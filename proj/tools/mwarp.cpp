// mwarp: simulate warped curves, estimate geodesic distances, extract
// structural-median templates and classify curves by nearest template.
//
// Exit codes: 0 success, 2 usage error, 3 data/parse/I-O error, 4 numeric failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mwarp/io.hpp"
#include "mwarp/mwarp.hpp"

namespace fs = std::filesystem;
using namespace mwarp;

namespace {

struct Options {
  // simulate
  std::string model = "sim2";
  std::size_t n = 100;
  std::uint64_t seed = 1;
  bool noiseless = false;
  double noise_sd = -1.0;
  std::string target = "tsint";
  std::size_t m = 100;
  double t_min = -10.0;
  double t_max = 10.0;
  double shift_lo = -2.0;
  double shift_hi = 2.0;
  std::string config;
  bool seed_given = false;

  // pipeline and estimators
  std::string input;
  std::string out;
  std::string shifts;
  double tol = -1.0;
  double alpha = 1.0;
  std::string method;
  unsigned threads = 0;

  // classify
  std::string train;
  std::string test;
  std::size_t k = 0;
  std::optional<double> truncate_at;
};

fs::path with_suffix(const std::string& prefix, const std::string& suffix) {
  return fs::path(prefix + suffix);
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
}

int cmd_simulate(const Options& o) {
  const std::string prefix = o.out.empty() ? o.model : o.out;
  ensure_parent(fs::path(prefix + ".x"));
  const GridSpec grid{o.m, o.t_min, o.t_max};

  if (o.model == "shift") {
    ShiftConfig cfg;
    cfg.target = make_target(o.target);
    cfg.grid = grid;
    cfg.n = o.n;
    cfg.shift_lo = o.shift_lo;
    cfg.shift_hi = o.shift_hi;
    cfg.seed = o.seed;
    const CurvePanel panel = generate_shift_sample(cfg);
    io::write_panel(with_suffix(prefix, ".panel.csv"), panel);
    io::write_shifts(with_suffix(prefix, ".shifts.csv"), panel.shifts);
    std::cout << "wrote " << prefix << ".panel.csv and " << prefix << ".shifts.csv\n";
  } else if (o.model == "sim1") {
    Sim1Config cfg;
    cfg.n = o.n;
    cfg.seed = o.seed;
    cfg.noiseless = o.noiseless;
    if (o.noise_sd >= 0.0) cfg.noise_sd = o.noise_sd;
    io::write_cloud(with_suffix(prefix, ".cloud.csv"), generate_sim1(cfg));
    Sim1Config exact = cfg;
    exact.noiseless = true;
    io::write_cloud(with_suffix(prefix, ".truth.csv"), generate_sim1(exact));
    std::cout << "wrote " << prefix << ".cloud.csv and " << prefix << ".truth.csv\n";
  } else if (o.model == "sim2") {
    Sim2Config cfg;
    cfg.target = make_target(o.target);
    cfg.grid = grid;
    cfg.n = o.n;
    cfg.seed = o.seed;
    if (o.noise_sd > 0.0 && !o.noiseless) cfg.noise_sd = o.noise_sd;
    const WarpSample sample = generate_sim2(cfg);
    io::write_panel(with_suffix(prefix, ".panel.csv"), sample.panel);
    const fs::path params = with_suffix(prefix, ".params.csv");
    auto out = io::open_out(params);
    out << "index,amplitude,scale,shift\n";
    for (std::size_t i = 0; i < sample.amplitude.size(); ++i) {
      out << i << ',' << io::format_double(sample.amplitude[i]) << ','
          << io::format_double(sample.scale[i]) << ',' << io::format_double(sample.shift[i]) << '\n';
    }
    io::finish(out, params);
    std::cout << "wrote " << prefix << ".panel.csv and " << prefix << ".params.csv\n";
  } else if (o.model == "classes") {
    if (o.config.empty()) throw UsageError("--model classes requires --config");
    auto cfg = io::benchmark_config_from_json(io::read_json(o.config));
    if (o.seed_given) cfg.seed = o.seed;
    const LabeledSplit split = generate_labeled_split(cfg.classes, cfg.grid, cfg.seed);
    io::write_panel(with_suffix(prefix, ".train.csv"), split.train);
    io::write_panel(with_suffix(prefix, ".test.csv"), split.test);
    std::cout << "wrote " << prefix << ".train.csv and " << prefix << ".test.csv\n";
    std::cout << "seed " << cfg.seed << '\n';
    return 0;
  } else {
    throw UsageError("unknown model '" + o.model + "' (expected shift, sim1, sim2 or classes)");
  }
  std::cout << "seed " << o.seed << '\n';
  return 0;
}

int cmd_distances(const Options& o) {
  const PointCloud cloud = io::read_points(o.input);
  if (cloud.empty()) throw DataError(o.input + ": no points");
  const std::string prefix = o.out.empty() ? fs::path(o.input).stem().string() : o.out;
  ensure_parent(fs::path(prefix + ".x"));
  const GeodesicResult res = geodesic_pipeline(cloud, {o.tol, o.threads});
  io::write_edges(with_suffix(prefix, ".emst.csv"), res.tree.edges);
  io::write_edges(with_suffix(prefix, ".kprime.csv"), res.kprime.edges);
  io::write_matrix(with_suffix(prefix, ".distances.csv"), res.distances);
  const GraphDiagnostics diag = diagnose(res);
  auto j = io::to_json(diag);
  j["tol"] = res.tol;
  io::write_json(with_suffix(prefix, ".diagnostics.json"), j);
  std::cout << "n=" << diag.n << " tree_edges=" << diag.tree_edges
            << " kprime_edges=" << diag.kprime_edges << " max_radius=" << diag.max_radius
            << " diameter=" << diag.diameter << '\n';
  return 0;
}

int cmd_template(const Options& o) {
  CurvePanel panel = io::read_panel(o.input);
  if (panel.size() == 0) throw DataError(o.input + ": panel has no curves");
  if (!o.shifts.empty()) {
    panel.shifts = io::read_shifts(o.shifts);
    if (panel.shifts.size() != panel.size()) {
      throw DataError(o.shifts + ": " + std::to_string(panel.shifts.size()) + " shifts for " +
                      std::to_string(panel.size()) + " curves");
    }
  }
  const std::string prefix = o.out.empty() ? fs::path(o.input).stem().string() : o.out;
  ensure_parent(fs::path(prefix + ".x"));
  const TemplateMethod method = parse_template_method(o.method.empty() ? "manifold" : o.method);

  nlohmann::json record;
  std::vector<double> curve;
  if (method == TemplateMethod::mean) {
    curve = cross_sectional_mean(panel);
    record = {{"index", nullptr}, {"objective", nullptr}, {"alpha", nullptr}};
  } else {
    const IntrinsicEstimate est =
        method == TemplateMethod::manifold
            ? intrinsic_estimate(geodesic_pipeline(panel.values, {o.tol, o.threads}).distances, o.alpha)
            : euclidean_medoid(pairwise_euclidean(panel.values), o.alpha);
    curve = panel.values.row_copy(est.index);
    record = io::to_json(est);
    std::cout << "selected curve " << est.index << " (objective " << io::format_double(est.objective)
              << ")\n";
    if (panel.has_shifts()) {
      const std::size_t med = median_shift_index(panel.shifts);
      record["shift"] = panel.shifts[est.index];
      record["median_shift"] = panel.shifts[med];
      record["median_shift_index"] = med;
      record["matches_median_shift"] = panel.shifts[est.index] == panel.shifts[med];
      std::cout << "selected shift " << io::format_double(panel.shifts[est.index])
                << ", sample median shift " << io::format_double(panel.shifts[med]) << '\n';
    }
  }
  record["method"] = to_string(method);

  CurvePanel tpl{panel.grid, Matrix::from_rows({curve}), {}, {}};
  io::write_panel(with_suffix(prefix, ".template.csv"), tpl);
  io::write_json(with_suffix(prefix, ".estimate.json"), record);
  io::write_plot_data(with_suffix(prefix, ".plot.csv"), panel,
                      {{"template", curve}, {"mean", cross_sectional_mean(panel)}});
  return 0;
}

int cmd_classify(const Options& o) {
  ClassifierConfig cfg;
  if (!o.config.empty()) cfg = io::classifier_config_from_json(io::read_json(o.config));
  if (!o.method.empty()) cfg.method = o.method;
  if (o.alpha != 1.0) cfg.alpha = o.alpha;
  if (o.k != 0) cfg.k = o.k;
  if (o.truncate_at) cfg.truncate_at = o.truncate_at;
  if (o.tol >= 0.0) cfg.tol = o.tol;
  if (cfg.method != "knn") parse_template_method(cfg.method);

  const CurvePanel train = io::read_panel(o.train);
  const CurvePanel test = io::read_panel(o.test);
  if (!train.has_labels()) throw UsageError(o.train + ": training curves need labels");
  if (!test.has_labels()) throw UsageError(o.test + ": test curves need labels");

  const std::string prefix = o.out.empty() ? std::string("classify") : o.out;
  ensure_parent(fs::path(prefix + ".x"));
  const ClassificationRun run = run_classification(cfg, train, test, o.threads);
  if (run.templates) {
    io::write_templates(with_suffix(prefix, ".templates.csv"), *run.templates);
    io::write_json(with_suffix(prefix, ".templates.json"), io::to_json(*run.templates));
  }
  io::write_predictions(with_suffix(prefix, ".predictions.csv"), run.evaluation.predictions);
  io::write_confusion(with_suffix(prefix, ".confusion.csv"), run.evaluation.confusion);

  const auto& cm = run.evaluation.confusion;
  std::cout << "method " << cfg.method << ": accuracy " << io::format_double(cm.accuracy()) << " ("
            << cm.correct() << '/' << cm.total() << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structural-median estimation of warped curves via graph geodesics"};
  app.require_subcommand(1);
  Options o;

  auto* sim = app.add_subcommand("simulate", "Generate a simulated sample");
  sim->add_option("--model", o.model, "shift | sim1 | sim2 | classes")->capture_default_str();
  sim->add_option("--n", o.n, "Number of curves or points")->capture_default_str();
  sim->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  sim->add_flag("--noiseless", o.noiseless, "sim1: exact parabola points");
  sim->add_option("--noise-sd", o.noise_sd, "Noise standard deviation");
  sim->add_option("--target", o.target, "tsint | identity | gaussian_bump")->capture_default_str();
  sim->add_option("--m", o.m, "Grid size")->capture_default_str();
  sim->add_option("--t-min", o.t_min, "Grid start")->capture_default_str();
  sim->add_option("--t-max", o.t_max, "Grid end")->capture_default_str();
  sim->add_option("--shift-lo", o.shift_lo, "shift: lower end of the shift law")->capture_default_str();
  sim->add_option("--shift-hi", o.shift_hi, "shift: upper end of the shift law")->capture_default_str();
  sim->add_option("--config", o.config, "classes: benchmark JSON");
  sim->add_option("--out", o.out, "Output prefix (default: model name)");

  auto* dist = app.add_subcommand("distances", "EMST, coverage graph and geodesic distance matrix");
  dist->add_option("--input", o.input, "Panel or point-cloud CSV")->required();
  dist->add_option("--out", o.out, "Output prefix");
  dist->add_option("--tol", o.tol, "Coverage tolerance (default 1e-9 x diameter)");
  dist->add_option("--threads", o.threads, "Worker threads (0: $MWARP_THREADS or all cores)");

  auto* tpl = app.add_subcommand("template", "Select the structural-median curve of a panel");
  tpl->add_option("--input", o.input, "Panel CSV")->required();
  tpl->add_option("--out", o.out, "Output prefix");
  tpl->add_option("--alpha", o.alpha, "Distance exponent (> 0)")->capture_default_str();
  tpl->add_option("--tol", o.tol, "Coverage tolerance");
  tpl->add_option("--method", o.method, "manifold | medoid | mean (default manifold)");
  tpl->add_option("--shifts", o.shifts, "Ground-truth shift sidecar to compare against");
  tpl->add_option("--threads", o.threads, "Worker threads");

  auto* cls = app.add_subcommand("classify", "Nearest-template or k-NN classification");
  cls->add_option("--train", o.train, "Labeled training panel")->required();
  cls->add_option("--test", o.test, "Labeled test panel")->required();
  cls->add_option("--out", o.out, "Output prefix (default: classify)");
  cls->add_option("--config", o.config, "Classifier JSON {method, alpha, k, truncate_at, tol}");
  cls->add_option("--method", o.method, "manifold | mean | medoid | knn");
  cls->add_option("--alpha", o.alpha, "Distance exponent for template extraction");
  cls->add_option("--k", o.k, "Neighbours for knn");
  cls->add_option("--truncate-at", o.truncate_at, "Use only grid points t < value");
  cls->add_option("--tol", o.tol, "Coverage tolerance");
  cls->add_option("--threads", o.threads, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  o.seed_given = sim->count("--seed") > 0;

  try {
    if (*sim) return cmd_simulate(o);
    if (*dist) return cmd_distances(o);
    if (*tpl) return cmd_template(o);
    if (*cls) return cmd_classify(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 4;
  }
  return 2;
}
