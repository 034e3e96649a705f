#include "floqspin/cli/app.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <thread>

#include "floqspin/cli/compare.hpp"
#include "floqspin/cli/config.hpp"
#include "floqspin/cli/runner.hpp"

namespace floqspin::cli {

namespace {

struct RunArgs {
  std::string config;
  std::string out;
  bool plots = false;
  int threads = 0;
  std::optional<std::uint64_t> seed;
};

int run_mode(Mode mode, const RunArgs& args) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(args.config);
    if (cfg.mode_set && cfg.mode != mode) {
      throw ConfigError(0, "mode", std::string("config declares mode '") + mode_name(cfg.mode) +
                                       "' but the subcommand is '" + mode_name(mode) + "'");
    }
    cfg.mode = mode;
    validate(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << args.config << ": " << e.what() << '\n';
    return kExitConfig;
  }
  if (!args.out.empty()) cfg.output_dir = args.out;
  const bool plots = args.plots || cfg.plots;

  RunOptions opts;
  opts.threads = args.threads > 0 ? args.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  opts.seed = args.seed;

  const auto result = run_experiment(cfg, opts);
  try {
    const auto files = write_outputs(cfg, opts, result, cfg.output_dir, plots);
    std::cout << mode_name(mode) << ": " << result.records.size() << " records, " << files.size()
              << " files in " << cfg.output_dir.string() << " (" << result.total_seconds << " s)\n";
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << '\n';
    return kExitConfig;
  }
  for (const auto& w : result.warnings) {
    std::cerr << "warning: " << w.polarization << " E/D=" << w.E_over_D << " B_F=" << w.B_F << ": " << w.message
              << '\n';
  }
  if (!result.failures.empty()) {
    for (const auto& f : result.failures) {
      std::cerr << "numerical failure (" << f.kind << "): " << f.polarization << " E/D=" << f.E_over_D
                << " B_F=" << f.B_F << " mT: " << f.message << '\n';
    }
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace

int run_app(int argc, char** argv) {
  CLI::App app{"Floquet spin-Hamiltonian engine for driven magnetic molecules"};
  app.require_subcommand(1);

  RunArgs args;
  Mode chosen = Mode::kSweep;
  const std::vector<std::pair<Mode, const char*>> modes = {
      {Mode::kSweep, "quasienergy levels and gradients along the drive-amplitude grid"},
      {Mode::kSmfs, "adaptive grid search for static fields with magnetic-field-stable levels"},
      {Mode::kCancel, "self-consistent dynamical cancellation of the effective Zeeman field"},
      {Mode::kEffective, "exact stroboscopic effective Hamiltonian and its spin-1 decomposition"},
      {Mode::kVanVleck, "second-order high-frequency effective Hamiltonian (closed form)"},
      {Mode::kFieldSweep, "levels versus a static-field offset along one axis"}};
  for (const auto& [mode, help] : modes) {
    auto* sub = app.add_subcommand(mode_name(mode), help);
    sub->add_option("--config", args.config, "configuration file (key = value)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "output directory (overrides output_dir)");
    sub->add_flag("--plots", args.plots, "write SVG plots");
    sub->add_option("--threads", args.threads, "worker threads (default: hardware concurrency)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", args.seed, "seed for the randomized gradient spot checks");
    sub->callback([&chosen, m = mode] { chosen = m; });
  }

  std::string file_a, file_b;
  CompareOptions cmp;
  std::vector<std::string> columns;
  std::optional<double> fold;
  auto* compare = app.add_subcommand("compare", "per-column maximum deviation between two record CSVs");
  compare->add_option("a", file_a, "first CSV")->required()->check(CLI::ExistingFile);
  compare->add_option("b", file_b, "second CSV")->required()->check(CLI::ExistingFile);
  compare->add_option("--tol", cmp.tolerance, "absolute tolerance")->check(CLI::NonNegativeNumber);
  compare->add_option("--columns", columns, "columns to compare (default: all numeric non-key columns)")
      ->delimiter(',');
  compare->add_option("--fold-ueV", fold, "fold energies into one zone of this width and sort per point")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (compare->parsed()) {
    cmp.columns = columns;
    cmp.fold_ueV = fold;
    try {
      const auto report = compare_files(file_a, file_b, cmp);
      std::cout << format_report(report);
      return report.within_tolerance() ? kExitOk : kExitComparison;
    } catch (const std::exception& e) {
      std::cerr << "schema mismatch: " << e.what() << '\n';
      return kExitComparison;
    }
  }
  return run_mode(chosen, args);
}

}  // namespace floqspin::cli
