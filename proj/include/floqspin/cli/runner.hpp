#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "floqspin/cli/config.hpp"
#include "floqspin/cli/records.hpp"

namespace floqspin::cli {

struct RunOptions {
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

/// A sweep point where a numerical routine failed; later points of that chain are not computed.
struct PointFailure {
  std::string polarization;
  double E_over_D = 0.0;
  double B_F = 0.0;
  std::string kind;
  std::string message;
};

struct RunWarning {
  std::string polarization;
  double E_over_D = 0.0;
  double B_F = 0.0;
  int level = -1;
  std::string message;
};

struct ChainTiming {
  std::string polarization;
  double E_over_D = 0.0;
  double seconds = 0.0;
};

struct GradientSample {
  std::string polarization;
  double E_over_D = 0.0;
  double B_F = 0.0;
  Vec3 Bs = Vec3::Zero();
  double deviation = 0.0;  // max |HF - FD| over levels and components [ueV/mT]
};

struct RunResult {
  std::vector<SweepRecord> records;
  std::vector<Table> tables;
  std::vector<PointFailure> failures;
  std::vector<RunWarning> warnings;
  std::vector<ChainTiming> timings;
  std::vector<GradientSample> gradient_checks;
  double total_seconds = 0.0;
};

/// Runs every (polarization, E/D) chain of the configured mode. Chains run on a worker pool;
/// results are assembled in configuration order. Numerical failures are collected, not thrown.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// records.csv, mode tables, manifest.json and, when `plots`, SVG figures under dir/plots.
/// Returns the list of files written, relative to `dir`.
std::vector<std::string> write_outputs(const ExperimentConfig& config, const RunOptions& options,
                                       const RunResult& result, const std::filesystem::path& dir, bool plots);

/// Eigenvalues (ascending) of a Hermitian matrix-valued function of Bs and their central-difference
/// gradients, level by sorted index.
std::vector<Vec3> sorted_eigen_gradients(const std::function<CMatrix(const Vec3&)>& h, const Vec3& bs, double delta);

}  // namespace floqspin::cli
