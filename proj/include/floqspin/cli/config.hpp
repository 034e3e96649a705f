#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "floqspin/types.hpp"

namespace floqspin::cli {

enum class Mode { kSweep, kSmfs, kCancel, kEffective, kVanVleck, kFieldSweep };

const char* mode_name(Mode m);
/// Throws ConfigError for an unknown name.
Mode mode_from_name(std::string_view name);

/// Bad configuration; carries the 1-based line (0 when not tied to a line) and the key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string key, const std::string& message);
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

enum class SweepCenter { kSmfs, kStatic };

/// Defaults reproduce the standard parameter set: S = 1, D = 5 ueV, E/D in {0, 0.1, 1/3}, g = 2,
/// hbar W = 20 ueV, B_F from 0 to 300 mT.
struct ExperimentConfig {
  Mode mode = Mode::kSweep;
  bool mode_set = false;

  double spin = 1.0;
  double D_ueV = 5.0;
  std::vector<double> E_over_D{0.0, 0.1, 1.0 / 3.0};
  Mat3 g = 2.0 * Mat3::Identity();

  double hbar_omega_ueV = 20.0;
  std::vector<std::string> polarizations;  // expanded names, catalog order kept as given
  double BF_min_mT = 0.0;
  double BF_max_mT = 300.0;
  double BF_step_mT = 1.0;
  double continuation_step_mT = 1.0;
  Vec3 Bs_mT = Vec3::Zero();

  int N_floquet = 10;
  int N_T = 100;
  double t0_ns = 0.0;

  double smfs_initial_spacing_mT = 0.1;
  double smfs_min_spacing_mT = 1e-5;
  double smfs_theta_tol_ueV_per_mT = 1e-12;
  double cancel_tol_mT = 1e-4;
  int cancel_max_iter = 500;
  double overlap_warning = 0.8;

  char sweep_axis = 'y';
  double sweep_range_mT = 8.0;
  double sweep_step_mT = 0.1;
  SweepCenter sweep_center = SweepCenter::kSmfs;

  int gradient_check_samples = 0;  // randomized Hellmann-Feynman vs finite-difference spot checks
  double gradient_check_delta_mT = 0.01;

  std::filesystem::path output_dir = "out";
  bool plots = false;

  /// Keys as written in the file, normalized values, in file order.
  std::vector<std::pair<std::string, std::string>> echo;

  /// Amplitude grid BF_min, BF_min + step, ..., BF_max (inclusive within 1e-9 of a step).
  std::vector<double> amplitude_grid() const;
};

/// Parses `key = value` lines; `#` starts a comment; lists are comma separated. Unknown keys,
/// duplicate keys and malformed values raise ConfigError with the line number.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Consistency checks that span several keys; throws ConfigError.
void validate(const ExperimentConfig& c);

/// Keys understood by the parser, in documentation order.
const std::vector<std::string>& config_keys();

/// Number with an optional rational form "a/b".
double parse_number(std::string_view text);

}  // namespace floqspin::cli
