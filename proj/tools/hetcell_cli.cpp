#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "hetcell/hetcell.hpp"
#include "hetcell/oracles.hpp"

namespace fs = std::filesystem;
using namespace hetcell;

namespace {

enum ExitCode { kOk = 0, kChecksFailed = 1, kConfigFailure = 2, kRuntimeFailure = 3 };

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "experiment configuration (JSON)")->required();
  cmd->add_option("--seed", opts.seed, "override master_seed");
  cmd->add_option("--reps", opts.reps, "override replications");
  cmd->add_option("--out", opts.out_dir, "output directory (overrides output.dir)");
}

SimulationConfig load(const CommonOptions& opts) {
  std::ifstream in(opts.config_path);
  if (!in) throw ConfigError("cannot open configuration file " + opts.config_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  SimulationConfig config = parse_config(buffer.str());
  if (opts.seed) config.master_seed = *opts.seed;
  if (opts.reps) {
    if (*opts.reps < 2) throw ConfigError("--reps must be at least 2");
    config.replications = *opts.reps;
  }
  if (!opts.out_dir.empty()) config.output.dir = opts.out_dir;
  return config;
}

std::ofstream open_output(const SimulationConfig& config, const std::string& suffix) {
  fs::create_directories(config.output.dir);
  const fs::path path = fs::path(config.output.dir) / (config.experiment_id + suffix);
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  std::cout << "wrote " << path.string() << "\n";
  return out;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_simulate(const SimulationConfig& config, bool oracle) {
  const ExperimentSetup setup = to_setup(config);
  const AreaStatistics stats = run_experiment(setup);
  print_warnings(stats.warnings);

  open_output(config, "_config.json") << dump_config(config);
  {
    auto out = open_output(config, "_summary.csv");
    write_summary_csv(out, config, stats);
  }
  if (config.output.raw_cells) {
    auto out = open_output(config, "_cells.csv");
    write_cells_csv(out, config, stats);
  }
  if (config.output.raster) {
    const std::size_t n = std::min(config.output.raster_replications, config.replications);
    for (std::size_t r = 0; r < n; ++r) {
      auto out = open_output(config, "_raster_rep" + std::to_string(r) + ".txt");
      out << provenance_line(config) << "\n";
      write_raster(out, realize(setup, r).map);
    }
  }
  for (std::size_t k = 0; k < stats.tiers.size(); ++k) {
    const auto& t = stats.tiers[k];
    std::cout << "tier " << k + 1 << ": mean area " << format_number(t.typical_mean_area.value) << " +/- "
              << format_number(t.typical_mean_area.half_width) << ", assoc prob " << format_number(t.assoc_prob.value)
              << "\n";
  }

  if (oracle) {
    const Realization real = realize(setup, 0);
    try {
      const AssociationMap reference =
          oracles::brute_force_map(real.pattern, setup.tiers, setup.strategy, setup.gain_mode, setup.window,
                                   derive_stream(setup.master_seed, 0, StreamPurpose::kGains));
      const bool same = reference == real.map;
      std::cout << "oracle: replication 0 map " << (same ? "matches" : "DIFFERS FROM") << " brute force\n";
      if (!same) return kChecksFailed;
    } catch (const InvalidArgument& e) {
      std::cout << "oracle: skipped (" << e.what() << ")\n";
    }
  }
  return kOk;
}

int cmd_analyze(const SimulationConfig& config) {
  const auto tiers = linear_tiers(config);
  const AnalyticPrediction prediction = predict(tiers);
  auto out = open_output(config, "_analytic.csv");
  write_prediction_csv(out, config, prediction);
  for (std::size_t k = 0; k < tiers.size(); ++k) {
    std::cout << "tier " << k + 1 << ": mean area " << format_number(prediction.per_tier_mean_area[k])
              << ", assoc prob " << format_number(prediction.per_tier_assoc_prob[k]) << "\n";
  }
  if (config.strategy == AssociationStrategy::kNearest) {
    std::cout << "note: strategy is nearest; the values above are the max-power predictions\n";
  }
  return kOk;
}

int cmd_sweep(const SimulationConfig& config, bool analytic_only) {
  if (!config.sweep) throw ConfigError("configuration has no \"sweep\" section");
  const auto rows = run_sweep(config, !analytic_only);
  auto out = open_output(config, "_sweep.csv");
  write_sweep_csv(out, config, rows);
  return kOk;
}

int cmd_validate(const SimulationConfig& config, bool negative_control) {
  const ValidationReport report = run_validation(config, negative_control);
  print_validation(std::cout, report);
  auto out = open_output(config, "_validation.csv");
  write_validation_csv(out, config, report);
  return report.passed() ? kOk : kChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Association-cell statistics for multi-tier Poisson networks"};
  app.require_subcommand(1);

  CommonOptions simulate_opts, analyze_opts, sweep_opts, validate_opts;
  bool oracle = false, analytic_only = false, negative_control = false;

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo cell statistics");
  add_common(simulate, simulate_opts);
  simulate->add_flag("--oracle", oracle, "cross-check replication 0 against brute force")->group("");

  auto* analyze = app.add_subcommand("analyze", "analytic mean areas and association probabilities");
  add_common(analyze, analyze_opts);

  auto* sweep = app.add_subcommand("sweep", "analytic and Monte Carlo series over one parameter");
  add_common(sweep, sweep_opts);
  sweep->add_flag("--analytic-only", analytic_only, "skip the Monte Carlo column");

  auto* validate = app.add_subcommand("validate", "consistency checks; nonzero exit on failure");
  add_common(validate, validate_opts);
  validate->add_flag("--negative-control", negative_control, "corrupt the bias checks; must fail");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(load(simulate_opts), oracle);
    if (analyze->parsed()) return cmd_analyze(load(analyze_opts));
    if (sweep->parsed()) return cmd_sweep(load(sweep_opts), analytic_only);
    if (validate->parsed()) return cmd_validate(load(validate_opts), negative_control);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kOk;
}
