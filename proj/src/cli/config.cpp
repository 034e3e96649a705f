#include "floqspin/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "floqspin/drive.hpp"
#include "floqspin/errors.hpp"

namespace floqspin::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

double parse_plain(std::string_view t) {
  double v = 0.0;
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (ec != std::errc() || ptr != end || t.empty()) throw InvalidArgument("not a number: '" + std::string(t) + "'");
  return v;
}

std::string format_number(double v) {
  std::ostringstream s;
  s.precision(12);
  s << v;
  return s.str();
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + items[i];
  return out;
}

bool parse_bool(std::string_view t) {
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw InvalidArgument("expected a boolean (true/false), got '" + std::string(t) + "'");
}

int parse_int(std::string_view t) {
  const double v = parse_number(t);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw InvalidArgument("expected an integer, got '" + std::string(t) + "'");
  return static_cast<int>(v);
}

std::vector<double> parse_numbers(std::string_view t) {
  std::vector<double> out;
  for (const auto& item : split_list(t)) out.push_back(parse_number(item));
  if (out.empty()) throw InvalidArgument("expected at least one number");
  return out;
}

std::vector<std::string> expand_polarizations(std::string_view t) {
  std::vector<std::string> out;
  auto add = [&](const std::string& name) {
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  };
  for (const auto& item : split_list(t)) {
    if (item == "linear") {
      for (const auto& n : linear_polarization_names()) add(n);
    } else if (item == "circular") {
      for (const auto& n : circular_polarization_names()) add(n);
    } else if (item == "all") {
      for (const auto& n : polarization_names()) add(n);
    } else {
      polarization_from_name(item);
      add(item);
    }
  }
  if (out.empty()) throw InvalidArgument("empty polarization list");
  return out;
}

using Setter = std::function<std::string(ExperimentConfig&, std::string_view)>;

template <typename T>
Setter number_setter(T ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, std::string_view v) {
    if constexpr (std::is_same_v<T, int>) {
      c.*field = parse_int(v);
      return std::to_string(c.*field);
    } else {
      c.*field = parse_number(v);
      return format_number(c.*field);
    }
  };
}

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"mode",
       [](ExperimentConfig& c, std::string_view v) {
         c.mode = mode_from_name(v);
         c.mode_set = true;
         return std::string(mode_name(c.mode));
       }},
      {"S", number_setter(&ExperimentConfig::spin)},
      {"D_ueV", number_setter(&ExperimentConfig::D_ueV)},
      {"E_over_D",
       [](ExperimentConfig& c, std::string_view v) {
         c.E_over_D = parse_numbers(v);
         std::vector<std::string> s;
         for (double x : c.E_over_D) s.push_back(format_number(x));
         return join(s);
       }},
      {"g",
       [](ExperimentConfig& c, std::string_view v) {
         const auto vals = parse_numbers(v);
         if (vals.size() == 1) {
           c.g = vals[0] * Mat3::Identity();
         } else if (vals.size() == 3) {
           c.g = Vec3(vals[0], vals[1], vals[2]).asDiagonal();
         } else if (vals.size() == 9) {
           for (int r = 0; r < 3; ++r) {
             for (int k = 0; k < 3; ++k) c.g(r, k) = vals[static_cast<std::size_t>(3 * r + k)];
           }
         } else {
           throw InvalidArgument("g takes 1 (isotropic), 3 (diagonal) or 9 (row-major) values");
         }
         std::vector<std::string> s;
         for (double x : vals) s.push_back(format_number(x));
         return join(s);
       }},
      {"hbar_omega_ueV", number_setter(&ExperimentConfig::hbar_omega_ueV)},
      {"polarizations",
       [](ExperimentConfig& c, std::string_view v) {
         c.polarizations = expand_polarizations(v);
         return join(c.polarizations);
       }},
      {"BF_min_mT", number_setter(&ExperimentConfig::BF_min_mT)},
      {"BF_max_mT", number_setter(&ExperimentConfig::BF_max_mT)},
      {"BF_step_mT", number_setter(&ExperimentConfig::BF_step_mT)},
      {"continuation_step_mT", number_setter(&ExperimentConfig::continuation_step_mT)},
      {"Bs_mT",
       [](ExperimentConfig& c, std::string_view v) {
         const auto vals = parse_numbers(v);
         if (vals.size() != 3) throw InvalidArgument("Bs_mT takes 3 values");
         c.Bs_mT = Vec3(vals[0], vals[1], vals[2]);
         return format_number(vals[0]) + ", " + format_number(vals[1]) + ", " + format_number(vals[2]);
       }},
      {"N_floquet", number_setter(&ExperimentConfig::N_floquet)},
      {"N_T", number_setter(&ExperimentConfig::N_T)},
      {"t0_ns", number_setter(&ExperimentConfig::t0_ns)},
      {"smfs_initial_spacing_mT", number_setter(&ExperimentConfig::smfs_initial_spacing_mT)},
      {"smfs_min_spacing_mT", number_setter(&ExperimentConfig::smfs_min_spacing_mT)},
      {"smfs_theta_tol_ueV_per_mT", number_setter(&ExperimentConfig::smfs_theta_tol_ueV_per_mT)},
      {"cancel_tol_mT", number_setter(&ExperimentConfig::cancel_tol_mT)},
      {"cancel_max_iter", number_setter(&ExperimentConfig::cancel_max_iter)},
      {"overlap_warning", number_setter(&ExperimentConfig::overlap_warning)},
      {"sweep_axis",
       [](ExperimentConfig& c, std::string_view v) {
         if (v.size() != 1 || std::string_view("xyz").find(v[0]) == std::string_view::npos) {
           throw InvalidArgument("sweep_axis must be x, y or z");
         }
         c.sweep_axis = v[0];
         return std::string(v);
       }},
      {"sweep_range_mT", number_setter(&ExperimentConfig::sweep_range_mT)},
      {"sweep_step_mT", number_setter(&ExperimentConfig::sweep_step_mT)},
      {"sweep_center",
       [](ExperimentConfig& c, std::string_view v) {
         if (v == "smfs") {
           c.sweep_center = SweepCenter::kSmfs;
         } else if (v == "static") {
           c.sweep_center = SweepCenter::kStatic;
         } else {
           throw InvalidArgument("sweep_center must be 'smfs' or 'static'");
         }
         return std::string(v);
       }},
      {"gradient_check_samples", number_setter(&ExperimentConfig::gradient_check_samples)},
      {"gradient_check_delta_mT", number_setter(&ExperimentConfig::gradient_check_delta_mT)},
      {"output_dir",
       [](ExperimentConfig& c, std::string_view v) {
         c.output_dir = std::string(v);
         return std::string(v);
       }},
      {"plots",
       [](ExperimentConfig& c, std::string_view v) {
         c.plots = parse_bool(v);
         return std::string(c.plots ? "true" : "false");
       }},
  };
  return table;
}

}  // namespace

ConfigError::ConfigError(int line, std::string key, const std::string& message)
    : std::runtime_error([&] {
        std::ostringstream s;
        if (line > 0) s << "line " << line << ": ";
        if (!key.empty()) s << "'" << key << "': ";
        s << message;
        return s.str();
      }()),
      line_(line),
      key_(std::move(key)) {}

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::kSweep:
      return "sweep";
    case Mode::kSmfs:
      return "smfs";
    case Mode::kCancel:
      return "cancel";
    case Mode::kEffective:
      return "effective";
    case Mode::kVanVleck:
      return "vanvleck";
    case Mode::kFieldSweep:
      return "field-sweep";
  }
  return "?";
}

Mode mode_from_name(std::string_view name) {
  for (Mode m : {Mode::kSweep, Mode::kSmfs, Mode::kCancel, Mode::kEffective, Mode::kVanVleck, Mode::kFieldSweep}) {
    if (name == mode_name(m)) return m;
  }
  throw ConfigError(0, "", "unknown mode '" + std::string(name) + "'");
}

double parse_number(std::string_view text) {
  const auto t = trim(text);
  const auto slash = t.find('/');
  if (slash == std::string_view::npos) return parse_plain(t);
  const double den = parse_plain(trim(t.substr(slash + 1)));
  if (den == 0.0) throw InvalidArgument("zero denominator in '" + std::string(t) + "'");
  return parse_plain(trim(t.substr(0, slash))) / den;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

std::vector<double> ExperimentConfig::amplitude_grid() const {
  std::vector<double> grid;
  const auto n = static_cast<long>(std::floor((BF_max_mT - BF_min_mT) / BF_step_mT + 1e-9));
  for (long i = 0; i <= n; ++i) grid.push_back(BF_min_mT + static_cast<double>(i) * BF_step_mT);
  return grid;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  c.polarizations = linear_polarization_names();
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "", "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    const auto& table = setters();
    const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == key; });
    if (it == table.end()) throw ConfigError(line_no, key, "unknown key");
    if (!seen.insert(key).second) throw ConfigError(line_no, key, "duplicate key");
    if (value.empty()) throw ConfigError(line_no, key, "missing value");
    try {
      c.echo.emplace_back(key, it->second(c, value));
    } catch (const std::exception& e) {
      throw ConfigError(line_no, key, e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "", "cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate(const ExperimentConfig& c) {
  auto fail = [](const char* key, const std::string& msg) { throw ConfigError(0, key, msg); };
  const double two_s = 2.0 * c.spin;
  if (!(c.spin > 0.0) || std::abs(two_s - std::round(two_s)) > 1e-12) fail("S", "2S must be a positive integer");
  if (!std::isfinite(c.D_ueV)) fail("D_ueV", "must be finite");
  for (double r : c.E_over_D) {
    if (!std::isfinite(r)) fail("E_over_D", "must be finite");
  }
  if (!c.g.allFinite() || std::abs(c.g.determinant()) < 1e-12) fail("g", "g-tensor must be finite and invertible");
  if (!(c.hbar_omega_ueV > 0.0)) fail("hbar_omega_ueV", "must be positive");
  if (!(c.BF_min_mT >= 0.0)) fail("BF_min_mT", "must be non-negative");
  if (!(c.BF_max_mT >= c.BF_min_mT)) fail("BF_max_mT", "must not be below BF_min_mT");
  if (!(c.BF_step_mT > 0.0)) fail("BF_step_mT", "must be positive");
  if (!(c.continuation_step_mT > 0.0)) fail("continuation_step_mT", "must be positive");
  if (!c.Bs_mT.allFinite()) fail("Bs_mT", "must be finite");
  if (c.N_floquet < 1) fail("N_floquet", "must be at least 1");
  if (c.N_T < 2) fail("N_T", "must be at least 2");
  if (!(c.smfs_initial_spacing_mT > 0.0)) fail("smfs_initial_spacing_mT", "must be positive");
  if (!(c.smfs_min_spacing_mT > 0.0)) fail("smfs_min_spacing_mT", "must be positive");
  if (!(c.smfs_theta_tol_ueV_per_mT >= 0.0)) fail("smfs_theta_tol_ueV_per_mT", "must be non-negative");
  if (!(c.cancel_tol_mT > 0.0)) fail("cancel_tol_mT", "must be positive");
  if (c.cancel_max_iter < 1) fail("cancel_max_iter", "must be at least 1");
  if (!(c.overlap_warning >= 0.0 && c.overlap_warning <= 1.0)) fail("overlap_warning", "must lie in [0, 1]");
  if (!(c.sweep_range_mT >= 0.0)) fail("sweep_range_mT", "must be non-negative");
  if (!(c.sweep_step_mT > 0.0)) fail("sweep_step_mT", "must be positive");
  if (c.gradient_check_samples < 0) fail("gradient_check_samples", "must be non-negative");
  if (!(c.gradient_check_delta_mT > 0.0)) fail("gradient_check_delta_mT", "must be positive");
  const bool spin_one = std::abs(c.spin - 1.0) < 1e-12;
  if ((c.mode == Mode::kCancel || c.mode == Mode::kEffective) && !spin_one) {
    fail("S", std::string(mode_name(c.mode)) + " mode uses the spin-1 basis decomposition; S must be 1");
  }
  if (c.mode == Mode::kVanVleck && (c.g - c.g(0, 0) * Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-12) {
    fail("g", "vanvleck mode requires an isotropic g-tensor");
  }
}

}  // namespace floqspin::cli
