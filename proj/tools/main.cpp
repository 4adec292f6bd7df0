#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "manyiv/config_io.hpp"
#include "manyiv/csv.hpp"
#include "manyiv/dataset.hpp"
#include "manyiv/errors.hpp"
#include "manyiv/inference.hpp"
#include "manyiv/parallel.hpp"
#include "manyiv/reporting.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace manyiv;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Options {
  std::string command;
  std::string config_path;
  std::string calibration_path;
  std::string data_dir;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int nrep = 1000;
  double alpha = 0.10;
  int block_length = 4;
  int bootstrap_draws = 500;
  std::string method = "supscore";
  int ks = 4;
  int hac_lag = 4;
  std::string grid_spec = "-0.5:1.5:0.01,-0.5:1.0:0.01";
  int workers = 0;  // 0 = available cores
};

// JSON config supplies defaults; command-line flags win.
void merge_config_file(Options& opt, const std::string& path,
                       const CLI::App& app) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw config_error(std::string("config file: ") + e.what());
  }
  auto take = [&](const char* key, const char* flag, auto& field) {
    if (doc.contains(key) && app.count(flag) == 0)
      field = doc.at(key).get<std::remove_reference_t<decltype(field)>>();
  };
  take("calibration", "--calibration", opt.calibration_path);
  take("data_dir", "--data-dir", opt.data_dir);
  take("out", "--out", opt.out_dir);
  take("seed", "--seed", opt.seed);
  take("nrep", "--nrep", opt.nrep);
  take("alpha", "--alpha", opt.alpha);
  take("block_length", "--block-length", opt.block_length);
  take("bootstrap_draws", "--bootstrap-draws", opt.bootstrap_draws);
  take("method", "--method", opt.method);
  take("ks", "--ks", opt.ks);
  take("hac_lag", "--hac-lag", opt.hac_lag);
  take("grid", "--grid", opt.grid_spec);
  take("workers", "--workers", opt.workers);
}

CalibrationFile calibration_or_default(const Options& opt) {
  if (!opt.calibration_path.empty())
    return load_calibration(opt.calibration_path);
  CalibrationFile file;
  file.base.seed = opt.seed;
  return file;
}

CampaignConfig campaign_config(const Options& opt) {
  CampaignConfig cfg;
  cfg.nrep = opt.nrep;
  cfg.alpha = opt.alpha;
  cfg.master_seed = opt.seed;
  cfg.workers = opt.workers > 0 ? opt.workers : default_workers();
  cfg.s.hac_lag = opt.hac_lag;
  cfg.s.alpha = opt.alpha;
  cfg.supscore.block_length = opt.block_length;
  cfg.supscore.bootstrap_draws = opt.bootstrap_draws;
  cfg.supscore.alpha = opt.alpha;
  cfg.selection.k_s = opt.ks;
  return cfg;
}

MethodConfig method_config(const Options& opt) {
  MethodConfig mc;
  mc.method = parse_method(opt.method);
  mc.s.hac_lag = opt.hac_lag;
  mc.s.alpha = opt.alpha;
  mc.supscore.block_length = opt.block_length;
  mc.supscore.bootstrap_draws = opt.bootstrap_draws;
  mc.supscore.alpha = opt.alpha;
  mc.selection.k_s = opt.ks;
  mc.workers = opt.workers > 0 ? opt.workers : default_workers();
  return mc;
}

EstimationProblem load_empirical(const Options& opt) {
  if (opt.data_dir.empty())
    throw config_error("--data-dir is required for empirical data");
  fs::path dir(opt.data_dir);
  auto panel = read_panel_csv(dir / "panel.csv");
  EmpiricalConfig config;
  config.transforms = read_transform_map(dir / "transforms.csv");
  fs::path meta = dir / "empirical.json";
  if (fs::exists(meta)) {
    std::ifstream in(meta);
    json doc;
    try {
      in >> doc;
    } catch (const json::exception& e) {
      throw config_error("empirical.json: " + std::string(e.what()));
    }
    if (doc.contains("dependent_code")) config.dependent_code = doc["dependent_code"];
    if (doc.contains("forcing_code")) config.forcing_code = doc["forcing_code"];
    if (doc.contains("lags")) config.lags = doc["lags"];
    if (doc.contains("window_start"))
      config.window_start = Quarter::parse(doc["window_start"].get<std::string>());
    if (doc.contains("window_end"))
      config.window_end = Quarter::parse(doc["window_end"].get<std::string>());
  }
  return assemble_empirical_design(config, panel);
}

void write_manifest(const Options& opt, const std::vector<std::string>& outputs,
                    double wall_seconds) {
  json doc;
  doc["command"] = opt.command;
  doc["version"] = kVersion;
  doc["seed"] = opt.seed;
  doc["outputs"] = outputs;
  doc["wall_time_seconds"] = wall_seconds;
  doc["config"] = {{"calibration", opt.calibration_path},
                   {"data_dir", opt.data_dir},
                   {"out", opt.out_dir},
                   {"nrep", opt.nrep},
                   {"alpha", opt.alpha},
                   {"block_length", opt.block_length},
                   {"bootstrap_draws", opt.bootstrap_draws},
                   {"method", opt.method},
                   {"ks", opt.ks},
                   {"hac_lag", opt.hac_lag},
                   {"grid", opt.grid_spec},
                   {"workers", opt.workers}};
  fs::path path = fs::path(opt.out_dir) / "manifest.json";
  csv::write_text(path, doc.dump(2) + "\n");
  // stdout carries only the manifest path; progress goes to stderr
  std::cout << path.string() << std::endl;
}

int run_concentration(const Options& opt) {
  auto calib = calibration_or_default(opt);
  std::vector<std::pair<DgpCalibration, ConcentrationReport>> reports;
  for (const auto& cell : calib.cells()) {
    std::cerr << "concentration: cell a21=" << cell.a21 << " a22=" << cell.a22
              << " a23=" << cell.a23 << "\n";
    reports.emplace_back(cell, concentration_observed(cell));
  }
  fs::create_directories(opt.out_dir);
  write_concentration_csv(fs::path(opt.out_dir) / "concentration.csv", reports);
  return 0;
}

int run_simulate_size(const Options& opt) {
  auto calib = calibration_or_default(opt);
  CampaignConfig cfg = campaign_config(opt);
  std::vector<CampaignResult> cells;
  for (const auto& cell : calib.cells()) {
    std::cerr << "simulate-size: cell a21=" << cell.a21 << " a22=" << cell.a22
              << " a23=" << cell.a23 << " nrep=" << cfg.nrep << "\n";
    cells.push_back(monte_carlo_size(cell, cfg));
  }
  fs::create_directories(opt.out_dir);
  write_size_results_csv(fs::path(opt.out_dir) / "size_results.csv", cells);
  write_table_layout_csv(fs::path(opt.out_dir) / "table_layout.csv", cells);
  return 0;
}

int run_simulate_power(const Options& opt) {
  auto calib = calibration_or_default(opt);
  CampaignConfig cfg = campaign_config(opt);
  HypothesisGrid grid = parse_grid_spec(opt.grid_spec);
  std::cerr << "simulate-power: method=" << opt.method << " nrep=" << cfg.nrep
            << " grid=" << grid_to_string(grid) << "\n";
  auto points =
      monte_carlo_power(calib.base, parse_method(opt.method), grid, cfg);
  fs::create_directories(opt.out_dir);
  write_heatmap_csv(fs::path(opt.out_dir) / "power_heatmap.csv", points);
  return 0;
}

int run_invert(const Options& opt) {
  MethodConfig mc = method_config(opt);
  HypothesisGrid grid = parse_grid_spec(opt.grid_spec);

  EstimationProblem problem;
  std::optional<SimulatedDataset> sim;
  if (!opt.data_dir.empty()) {
    problem = load_empirical(opt);
  } else {
    auto calib = calibration_or_default(opt);
    sim = simulate_dataset(calib.base, Rng(opt.seed).derive(0));
    problem = sim->problem;
  }
  std::cerr << "invert: method=" << opt.method << " grid="
            << grid_to_string(grid) << " points="
            << grid.gf_count() * grid.lam_count() << "\n";
  ConfidenceGrid result = invert_test(problem, sim ? &*sim : nullptr, grid, mc,
                                      opt.seed);
  fs::create_directories(opt.out_dir);
  write_confidence_grid_csv(fs::path(opt.out_dir) / "confidence_grid.csv",
                            result);
  if (mc.method == Method::SupScore) {
    write_argmax_histogram_csv(fs::path(opt.out_dir) / "argmax_histogram.csv",
                               result);
  } else {
    write_selected_csv(fs::path(opt.out_dir) / "selected.csv", result.selected,
                       result.selected_labels);
  }
  std::cerr << "invert: " << result.in_set_count() << " of "
            << result.results.size() << " points in the confidence set\n";
  return 0;
}

int run_empirical(const Options& opt) {
  EstimationProblem problem = load_empirical(opt);
  fs::create_directories(opt.out_dir);
  write_design_bundle(problem, fs::path(opt.out_dir) / "design");

  auto emit_selection = [&](SelectionMethod method, const std::string& name) {
    SelectionSpec spec;
    spec.method = method;
    spec.k_s = opt.ks;
    Rng rng = Rng(opt.seed).derive(1);
    auto sel = select_instruments(problem.Y, problem.Z, spec, rng);
    std::vector<std::string> labels;
    for (int idx : sel) labels.push_back(problem.labels[static_cast<std::size_t>(idx)]);
    write_selected_csv(fs::path(opt.out_dir) / ("selected_" + name + ".csv"),
                       sel, labels);
  };
  emit_selection(SelectionMethod::Random, "random");
  emit_selection(SelectionMethod::CrudeThreshold, "crude");
  emit_selection(SelectionMethod::Lasso, "lasso");

  json summary;
  summary["T"] = problem.T();
  summary["k"] = problem.k();
  summary["p1"] = problem.p1();
  summary["p2"] = problem.p2();
  summary["partialled"] = problem.partialled;
  csv::write_text(fs::path(opt.out_dir) / "summary.json", summary.dump(2) + "\n");
  std::cerr << "empirical: T=" << problem.T() << " k=" << problem.k() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Weak-instrument robust IV inference with very many instruments"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config_path, "JSON config; flags override");
    cmd->add_option("--calibration", opt.calibration_path, "calibration JSON");
    cmd->add_option("--data-dir", opt.data_dir,
                    "directory with panel.csv and transforms.csv");
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--seed", opt.seed, "master RNG seed");
    cmd->add_option("--nrep", opt.nrep, "Monte Carlo replications");
    cmd->add_option("--alpha", opt.alpha, "test size");
    cmd->add_option("--block-length", opt.block_length, "bootstrap block length");
    cmd->add_option("--bootstrap-draws", opt.bootstrap_draws,
                    "multiplier bootstrap draws");
    cmd->add_option("--method", opt.method,
                    "oracle|random|crude|lasso|supscore");
    cmd->add_option("--ks", opt.ks, "instruments to select");
    cmd->add_option("--hac-lag", opt.hac_lag, "Newey-West lag length");
    cmd->add_option("--grid", opt.grid_spec,
                    "gfmin:gfmax:gfstep,lammin:lammax:lamstep");
    cmd->add_option("--workers", opt.workers, "worker threads (0 = cores)");
    return cmd;
  };

  auto* c1 = add_common(app.add_subcommand(
      "concentration", "first-stage concentration parameters per cell"));
  auto* c2 = add_common(app.add_subcommand(
      "simulate-size", "Monte Carlo size campaign at the true parameters"));
  auto* c3 = add_common(app.add_subcommand(
      "simulate-power", "Monte Carlo power map over a hypothesis grid"));
  auto* c4 = add_common(app.add_subcommand(
      "empirical", "assemble the empirical design and emit the audit bundle"));
  auto* c5 = add_common(app.add_subcommand(
      "invert", "confidence set by test inversion over a hypothesis grid"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  CLI::App* active = nullptr;
  for (auto* cmd : {c1, c2, c3, c4, c5})
    if (cmd->parsed()) active = cmd;
  opt.command = active->get_name();

  const auto start = std::chrono::steady_clock::now();
  try {
    if (!opt.config_path.empty()) merge_config_file(opt, opt.config_path, *active);

    int rc = 0;
    if (opt.command == "concentration") rc = run_concentration(opt);
    else if (opt.command == "simulate-size") rc = run_simulate_size(opt);
    else if (opt.command == "simulate-power") rc = run_simulate_power(opt);
    else if (opt.command == "empirical") rc = run_empirical(opt);
    else if (opt.command == "invert") rc = run_invert(opt);

    double wall = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start).count();
    std::vector<std::string> outputs;
    for (const auto& entry : fs::directory_iterator(opt.out_dir))
      outputs.push_back(entry.path().filename().string());
    std::sort(outputs.begin(), outputs.end());
    write_manifest(opt, outputs, wall);
    return rc;
  } catch (const config_error& e) {
    std::cerr << json{{"type", "config_error"}, {"error", e.what()}}.dump()
              << std::endl;
    return 2;
  } catch (const data_error& e) {
    std::cerr << json{{"type", "data_error"}, {"error", e.what()}}.dump()
              << std::endl;
    return 3;
  } catch (const numerical_error& e) {
    std::cerr << json{{"type", "numerical_error"}, {"error", e.what()}}.dump()
              << std::endl;
    return 4;
  } catch (const std::exception& e) {
    std::cerr << json{{"type", "error"}, {"error", e.what()}}.dump()
              << std::endl;
    return 1;
  }
}
