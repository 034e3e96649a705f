#include "floqspin/cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "floqspin/cli/svg.hpp"
#include "floqspin/drive.hpp"
#include "floqspin/errors.hpp"
#include "floqspin/floquet.hpp"
#include "floqspin/linalg.hpp"
#include "floqspin/optimize.hpp"
#include "floqspin/stroboscopic.hpp"
#include "floqspin/vanvleck.hpp"

#ifndef FLOQSPIN_VERSION
#define FLOQSPIN_VERSION "unknown"
#endif

namespace floqspin::cli {

namespace {

constexpr double kUnknownAmplitude = std::numeric_limits<double>::quiet_NaN();

struct Chain {
  std::string polarization;
  double ratio = 0.0;
};

struct ChainOutput {
  std::vector<SweepRecord> records;
  std::vector<Table> tables;
  std::vector<PointFailure> failures;
  std::vector<RunWarning> warnings;
  double seconds = 0.0;
};

using Row = std::vector<std::string>;

void add_row(ChainOutput& out, const std::string& name, const Row& header, Row row) {
  auto it = std::find_if(out.tables.begin(), out.tables.end(), [&](const Table& t) { return t.name == name; });
  if (it == out.tables.end()) {
    out.tables.push_back({name, header, {}});
    it = out.tables.end() - 1;
  }
  it->rows.push_back(std::move(row));
}

Row key_cells(const Chain& ch, double amplitude) {
  return {ch.polarization, format_value(ch.ratio), format_value(amplitude)};
}

Row with_key(const std::vector<std::string>& tail) {
  Row h{"polarization", "E_over_D", "B_F_mT"};
  h.insert(h.end(), tail.begin(), tail.end());
  return h;
}

void append_vec(Row& row, const Vec3& v) {
  for (int a = 0; a < 3; ++a) row.push_back(format_value(v(a)));
}

StaticParams params_for(const ExperimentConfig& c, double ratio) {
  StaticParams p;
  p.spin = c.spin;
  p.D = c.D_ueV;
  p.E = ratio * c.D_ueV;
  p.g = c.g;
  p.Bs = c.Bs_mT;
  return p;
}

SweepRecord make_record(const Chain& ch, double amplitude, int level, double energy, const Vec3& grad, const Vec3& bs,
                        const char* method) {
  SweepRecord r;
  r.polarization = ch.polarization;
  r.E_over_D = ch.ratio;
  r.B_F = amplitude;
  r.level = level;
  r.energy = energy;
  r.gradient = grad;
  r.Bs = bs;
  r.method = method;
  set_smfs_flags(r);
  return r;
}

PropagatorSettings propagator_for(const ExperimentConfig& c) { return {c.N_T, c.t0_ns}; }

TrackingSettings tracking_for(const ExperimentConfig& c, bool gradients) {
  TrackingSettings ts;
  ts.n_floquet = c.N_floquet;
  ts.max_step = c.continuation_step_mT;
  ts.overlap_warning = c.overlap_warning;
  ts.compute_gradients = gradients;
  return ts;
}

SmfsSettings smfs_for(const ExperimentConfig& c) {
  SmfsSettings s;
  s.n_floquet = c.N_floquet;
  s.initial_spacing = c.smfs_initial_spacing_mT;
  s.min_spacing = c.smfs_min_spacing_mT;
  s.theta_tolerance = c.smfs_theta_tol_ueV_per_mT;
  return s;
}

void collect_track_warnings(ChainOutput& out, const Chain& ch, const TrackedLevels& t) {
  for (const auto& w : t.warnings) out.warnings.push_back({ch.polarization, ch.ratio, w.amplitude, w.level, w.message});
}

TrackedLevels track_on(const ExperimentConfig& c, const StaticParams& p, const Polarization& pol,
                       const std::vector<double>& grid, bool gradients, std::size_t& offset) {
  std::vector<double> g = grid;
  offset = 0;
  if (g.front() != 0.0) {
    g.insert(g.begin(), 0.0);
    offset = 1;
  }
  return track_levels(p, monochromatic_ramp(pol), c.hbar_omega_ueV, g, tracking_for(c, gradients));
}

void run_sweep(const ExperimentConfig& c, const Chain& ch, const std::vector<double>& grid, ChainOutput& out,
               double& at) {
  const auto p = params_for(c, ch.ratio);
  at = kUnknownAmplitude;
  std::size_t offset = 0;
  const auto t = track_on(c, p, polarization_from_name(ch.polarization), grid, true, offset);
  collect_track_warnings(out, ch, t);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& e = t.energies[i + offset];
    for (Eigen::Index l = 0; l < e.size(); ++l) {
      out.records.push_back(make_record(ch, grid[i], static_cast<int>(l), e(l),
                                        t.gradients[i + offset][static_cast<std::size_t>(l)].gradient, p.Bs, "floquet"));
    }
  }
}

void run_smfs(const ExperimentConfig& c, const Chain& ch, const std::vector<double>& grid, ChainOutput& out,
              double& at) {
  const auto p = params_for(c, ch.ratio);
  at = grid.front();
  const auto results = smfs_sweep(p, polarization_from_name(ch.polarization), c.hbar_omega_ueV, grid, smfs_for(c),
                                  c.continuation_step_mT, [&](std::size_t i, const SmfsResult&) {
                                    at = i + 1 < grid.size() ? grid[i + 1] : grid[i];
                                  });
  const Row header = with_key({"theta_ueV_per_mT", "iterations", "final_spacing_mT", "Bs_x_mT", "Bs_y_mT", "Bs_z_mT"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& r = results[i];
    for (Eigen::Index l = 0; l < r.energies.size(); ++l) {
      out.records.push_back(make_record(ch, grid[i], static_cast<int>(l), r.energies(l),
                                        r.gradients[static_cast<std::size_t>(l)], r.bs_opt, "smfs"));
    }
    Row row = key_cells(ch, grid[i]);
    row.push_back(format_value(r.theta));
    row.push_back(std::to_string(r.iterations));
    row.push_back(format_value(r.final_spacing));
    append_vec(row, r.bs_opt);
    add_row(out, "smfs_summary", header, std::move(row));
  }
}

void push_sorted_levels(ChainOutput& out, const Chain& ch, double amplitude, const CMatrix& h,
                        const std::vector<Vec3>& grads, const Vec3& bs, const char* method) {
  const auto eig = linalg::eigh(h);
  for (Eigen::Index l = 0; l < eig.values.size(); ++l) {
    out.records.push_back(
        make_record(ch, amplitude, static_cast<int>(l), eig.values(l), grads[static_cast<std::size_t>(l)], bs, method));
  }
}

void run_cancel(const ExperimentConfig& c, const Chain& ch, const std::vector<double>& grid, ChainOutput& out,
                double& at) {
  const auto p = params_for(c, ch.ratio);
  const auto pol = polarization_from_name(ch.polarization);
  CancellationSettings s;
  s.propagator = propagator_for(c);
  s.tolerance = c.cancel_tol_mT;
  s.max_iterations = c.cancel_max_iter;
  at = grid.front();
  const auto results = cancellation_sweep(p, pol, c.hbar_omega_ueV, grid, s, c.continuation_step_mT,
                                          [&](std::size_t i, const CancellationResult&) {
                                            at = i + 1 < grid.size() ? grid[i + 1] : grid[i];
                                          });
  const Row header = with_key({"residual_mT", "iterations", "converged", "Bs_x_mT", "Bs_y_mT", "Bs_z_mT"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& r = results[i];
    if (!r.converged) {
      out.warnings.push_back({ch.polarization, ch.ratio, grid[i], -1,
                              "cancellation not converged after " + std::to_string(r.iterations) +
                                  " iterations (residual " + format_value(r.residual) + " mT)"});
    }
    const auto f = to_fourier({c.hbar_omega_ueV, grid[i], pol});
    StaticParams q = p;
    const auto grads = sorted_eigen_gradients(
        [&](const Vec3& bs) {
          q.Bs = bs;
          return effective_hamiltonian_exact(q, f, c.hbar_omega_ueV, s.propagator).matrix;
        },
        r.bs_opt, c.gradient_check_delta_mT);
    push_sorted_levels(out, ch, grid[i], r.h_eff.matrix, grads, r.bs_opt, "cancel");
    Row row = key_cells(ch, grid[i]);
    row.push_back(format_value(r.residual));
    row.push_back(std::to_string(r.iterations));
    row.push_back(r.converged ? "1" : "0");
    append_vec(row, r.bs_opt);
    add_row(out, "cancel_summary", header, std::move(row));
  }
}

void run_effective(const ExperimentConfig& c, const Chain& ch, const std::vector<double>& grid, ChainOutput& out,
                   double& at) {
  const auto p = params_for(c, ch.ratio);
  const auto pol = polarization_from_name(ch.polarization);
  const auto prop = propagator_for(c);
  const Row header = with_key({"c1", "c2", "c3", "c4", "c5", "c6", "c7", "c8", "c9", "scriptB_x_mT", "scriptB_y_mT",
                               "scriptB_z_mT", "B_eff_x_mT", "B_eff_y_mT", "B_eff_z_mT"});
  for (double amp : grid) {
    at = amp;
    const auto f = to_fourier({c.hbar_omega_ueV, amp, pol});
    const auto h = effective_hamiltonian_exact(p, f, c.hbar_omega_ueV, prop);
    StaticParams q = p;
    const auto grads = sorted_eigen_gradients(
        [&](const Vec3& bs) {
          q.Bs = bs;
          return effective_hamiltonian_exact(q, f, c.hbar_omega_ueV, prop).matrix;
        },
        p.Bs, c.gradient_check_delta_mT);
    push_sorted_levels(out, ch, amp, h.matrix, grads, p.Bs, "effective");
    const auto& co = *h.coefficients;
    const auto field = extract_cancellation_field(co[6], co[7], co[8], p.g);
    Row row = key_cells(ch, amp);
    for (double v : co) row.push_back(format_value(v));
    append_vec(row, field.script_b);
    append_vec(row, field.b_eff);
    add_row(out, "effective_coefficients", header, std::move(row));
  }
}

void run_vanvleck(const ExperimentConfig& c, const Chain& ch, const std::vector<double>& grid, ChainOutput& out,
                  double& at) {
  const auto p = params_for(c, ch.ratio);
  const auto pol = polarization_from_name(ch.polarization);
  const Row header = with_key({"Ct1", "Ct2", "Ct3", "Im_Ct4", "Im_Ct5", "Im_Ct6", "B1_x_mT", "B1_y_mT", "B1_z_mT",
                               "B21_x_mT", "B21_y_mT", "B21_z_mT", "B22_x_mT", "B22_y_mT", "B22_z_mT", "B_eff_x_mT",
                               "B_eff_y_mT", "B_eff_z_mT"});
  for (double amp : grid) {
    at = amp;
    const auto f = to_fourier({c.hbar_omega_ueV, amp, pol});
    const auto vv = vanvleck_spin(p, f, c.hbar_omega_ueV);
    StaticParams q = p;
    const auto grads = sorted_eigen_gradients(
        [&](const Vec3& bs) {
          q.Bs = bs;
          return vanvleck_spin(q, f, c.hbar_omega_ueV).h_eff;
        },
        p.Bs, c.gradient_check_delta_mT);
    push_sorted_levels(out, ch, amp, vv.h_eff, grads, p.Bs, "vanvleck");
    Row row = key_cells(ch, amp);
    const auto& t = vv.coefficients.tilde;
    for (int l = 0; l < 3; ++l) row.push_back(format_value(t[static_cast<std::size_t>(l)].real()));
    for (int l = 3; l < 6; ++l) row.push_back(format_value(t[static_cast<std::size_t>(l)].imag()));
    append_vec(row, vv.field.first_order);
    append_vec(row, vv.field.second_order_static);
    append_vec(row, vv.field.second_order_mixed);
    append_vec(row, vv.field.total());
    add_row(out, "vanvleck_coefficients", header, std::move(row));
  }
}

void run_field_sweep(const ExperimentConfig& c, const Chain& ch, const std::vector<double>& grid, ChainOutput& out,
                     double& at) {
  const auto p = params_for(c, ch.ratio);
  const auto pol = polarization_from_name(ch.polarization);
  const int axis = axis_from_name(c.sweep_axis);
  std::vector<Vec3> centers;
  std::vector<CMatrix> states;
  std::vector<RVector> energies;
  std::vector<double> thetas;
  at = grid.front();
  if (c.sweep_center == SweepCenter::kSmfs) {
    const auto results = smfs_sweep(p, pol, c.hbar_omega_ueV, grid, smfs_for(c), c.continuation_step_mT,
                                    [&](std::size_t i, const SmfsResult&) {
                                      at = i + 1 < grid.size() ? grid[i + 1] : grid[i];
                                    });
    for (const auto& r : results) {
      centers.push_back(r.bs_opt);
      states.push_back(r.states);
      energies.push_back(r.energies);
      thetas.push_back(r.theta);
    }
  } else {
    std::size_t offset = 0;
    const auto t = track_on(c, p, pol, grid, true, offset);
    collect_track_warnings(out, ch, t);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      centers.push_back(p.Bs);
      states.push_back(t.states[i + offset]);
      energies.push_back(t.energies[i + offset]);
      double theta = 0.0;
      for (const auto& g : t.gradients[i + offset]) theta += g.gradient.norm();
      thetas.push_back(theta);
    }
  }
  const Row header = with_key({"center_x_mT", "center_y_mT", "center_z_mT", "theta_ueV_per_mT", "axis"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    at = grid[i];
    const auto f = to_fourier({c.hbar_omega_ueV, grid[i], pol});
    const auto fs = energy_sweep(p, f, c.hbar_omega_ueV, centers[i], axis, c.sweep_range_mT, c.sweep_step_mT,
                                 states[i], energies[i], c.N_floquet);
    for (std::size_t k = 0; k < fs.offsets.size(); ++k) {
      Vec3 bs = centers[i];
      bs(axis) += fs.offsets[k];
      for (Eigen::Index l = 0; l < fs.energies[k].size(); ++l) {
        out.records.push_back(make_record(ch, grid[i], static_cast<int>(l), fs.energies[k](l),
                                          fs.gradients[k][static_cast<std::size_t>(l)], bs, "field-sweep"));
      }
    }
    Row row = key_cells(ch, grid[i]);
    append_vec(row, centers[i]);
    row.push_back(format_value(thetas[i]));
    row.push_back(std::string(1, c.sweep_axis));
    add_row(out, "field_sweep_centers", header, std::move(row));
  }
}

std::string failure_kind(const std::exception& e) {
  if (dynamic_cast<const DivergenceError*>(&e)) return "divergence";
  if (dynamic_cast<const BranchAmbiguity*>(&e)) return "branch_ambiguity";
  if (dynamic_cast<const NumericalError*>(&e)) return "numerical";
  if (dynamic_cast<const InconsistentInput*>(&e)) return "inconsistent_input";
  if (dynamic_cast<const UnsupportedSpin*>(&e)) return "unsupported_spin";
  if (dynamic_cast<const UnsupportedParameters*>(&e)) return "unsupported_parameters";
  if (dynamic_cast<const InvalidArgument*>(&e)) return "invalid_argument";
  return "error";
}

ChainOutput run_chain(const ExperimentConfig& c, const Chain& ch, const std::vector<double>& grid) {
  ChainOutput out;
  const auto t0 = std::chrono::steady_clock::now();
  double at = kUnknownAmplitude;
  ChainOutput partial;
  try {
    switch (c.mode) {
      case Mode::kSweep:
        run_sweep(c, ch, grid, partial, at);
        break;
      case Mode::kSmfs:
        run_smfs(c, ch, grid, partial, at);
        break;
      case Mode::kCancel:
        run_cancel(c, ch, grid, partial, at);
        break;
      case Mode::kEffective:
        run_effective(c, ch, grid, partial, at);
        break;
      case Mode::kVanVleck:
        run_vanvleck(c, ch, grid, partial, at);
        break;
      case Mode::kFieldSweep:
        run_field_sweep(c, ch, grid, partial, at);
        break;
    }
    out = std::move(partial);
  } catch (const std::exception& e) {
    out = std::move(partial);
    out.failures.push_back({ch.polarization, ch.ratio, at, failure_kind(e), e.what()});
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::vector<GradientSample> gradient_checks(const ExperimentConfig& c, std::uint64_t seed,
                                            std::vector<PointFailure>& failures) {
  std::vector<GradientSample> out;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_pol(0, c.polarizations.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_ratio(0, c.E_over_D.size() - 1);
  std::uniform_real_distribution<double> amp(0.0, c.BF_max_mT);
  std::uniform_real_distribution<double> cube(-50.0, 50.0);
  for (int s = 0; s < c.gradient_check_samples; ++s) {
    GradientSample g;
    g.polarization = c.polarizations[pick_pol(rng)];
    g.E_over_D = c.E_over_D[pick_ratio(rng)];
    g.B_F = amp(rng);
    do {
      g.Bs = Vec3(cube(rng), cube(rng), cube(rng));
    } while (g.Bs.norm() > 50.0);
    try {
      auto p = params_for(c, g.E_over_D);
      p.Bs = g.Bs;
      const auto pol = polarization_from_name(g.polarization);
      const auto snap = continued_levels(p, pol, c.hbar_omega_ueV, g.B_F, tracking_for(c, false));
      const auto f = to_fourier({c.hbar_omega_ueV, g.B_F, pol});
      for (int a = 0; a < 3; ++a) {
        StaticParams q = p;
        q.Bs(a) += c.gradient_check_delta_mT;
        const auto up = evaluate_levels(q, f, c.hbar_omega_ueV, snap.states, snap.energies, c.N_floquet);
        q.Bs(a) -= 2.0 * c.gradient_check_delta_mT;
        const auto dn = evaluate_levels(q, f, c.hbar_omega_ueV, snap.states, snap.energies, c.N_floquet);
        for (Eigen::Index l = 0; l < snap.energies.size(); ++l) {
          const double fd = (up.energies(l) - dn.energies(l)) / (2.0 * c.gradient_check_delta_mT);
          g.deviation = std::max(g.deviation, std::abs(fd - snap.gradients[static_cast<std::size_t>(l)](a)));
        }
      }
    } catch (const std::exception& e) {
      failures.push_back({g.polarization, g.E_over_D, g.B_F, failure_kind(e), std::string("gradient check: ") + e.what()});
      g.deviation = std::numeric_limits<double>::quiet_NaN();
    }
    out.push_back(g);
  }
  return out;
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

std::string ratio_tag(double r) {
  std::string s = format_value(r);
  std::replace(s.begin(), s.end(), '.', 'p');
  std::replace(s.begin(), s.end(), '-', 'm');
  return s;
}

const char* method_energy_label(Mode m) {
  switch (m) {
    case Mode::kEffective:
    case Mode::kVanVleck:
    case Mode::kCancel:
      return "effective eigenvalue (ueV)";
    default:
      return "quasienergy (ueV)";
  }
}

std::vector<std::string> write_plots(const ExperimentConfig& c, const RunResult& r, const std::filesystem::path& dir) {
  std::vector<std::string> files;
  // Group records: ratio -> polarization -> level -> (x, y); polarization order follows the config.
  for (double ratio : c.E_over_D) {
    if (c.mode == Mode::kFieldSweep) {
      std::map<double, Figure> by_amp;
      for (const auto& pol : c.polarizations) {
        std::map<double, std::map<int, Series>> panels;
        for (const auto& rec : r.records) {
          if (rec.E_over_D != ratio || rec.polarization != pol) continue;
          auto& ser = panels[rec.B_F][rec.level];
          ser.label = "level " + std::to_string(rec.level);
          ser.x.push_back(rec.Bs(axis_from_name(c.sweep_axis)));
          ser.y.push_back(rec.energy);
        }
        for (auto& [amp, levels] : panels) {
          Panel p{pol, std::string("Bs_") + c.sweep_axis + " (mT)", "quasienergy (ueV)", {}};
          for (auto& [_, ser] : levels) p.series.push_back(std::move(ser));
          auto& fig = by_amp[amp];
          fig.title = "field sweep, E/D = " + format_value(ratio) + ", B_F = " + format_value(amp) + " mT";
          fig.panels.push_back(std::move(p));
        }
      }
      for (const auto& [amp, fig] : by_amp) {
        const std::string name = "plots/field_sweep_EoD" + ratio_tag(ratio) + "_BF" + ratio_tag(amp) + ".svg";
        write_svg(dir / name, fig);
        files.push_back(name);
      }
      continue;
    }
    Figure energies{std::string(mode_name(c.mode)) + ": energy levels, E/D = " + format_value(ratio), 3, {}};
    Figure fields{std::string(mode_name(c.mode)) + ": static field, E/D = " + format_value(ratio), 3, {}};
    for (const auto& pol : c.polarizations) {
      std::map<int, Series> levels;
      Series bx{"Bs_x", {}, {}}, by{"Bs_y", {}, {}}, bz{"Bs_z", {}, {}};
      for (const auto& rec : r.records) {
        if (rec.E_over_D != ratio || rec.polarization != pol) continue;
        auto& ser = levels[rec.level];
        ser.label = "level " + std::to_string(rec.level);
        ser.x.push_back(rec.B_F);
        ser.y.push_back(rec.energy);
        if (rec.level == 0) {
          bx.x.push_back(rec.B_F);
          bx.y.push_back(rec.Bs.x());
          by.x.push_back(rec.B_F);
          by.y.push_back(rec.Bs.y());
          bz.x.push_back(rec.B_F);
          bz.y.push_back(rec.Bs.z());
        }
      }
      if (levels.empty()) continue;
      Panel p{pol, "B_F (mT)", method_energy_label(c.mode), {}};
      for (auto& [_, ser] : levels) p.series.push_back(std::move(ser));
      energies.panels.push_back(std::move(p));
      fields.panels.push_back({pol, "B_F (mT)", "Bs (mT)", {bx, by, bz}});
    }
    if (energies.panels.empty()) continue;
    const std::string name = "plots/energies_EoD" + ratio_tag(ratio) + ".svg";
    write_svg(dir / name, energies);
    files.push_back(name);
    if (c.mode == Mode::kSmfs || c.mode == Mode::kCancel) {
      const std::string fname = "plots/fields_EoD" + ratio_tag(ratio) + ".svg";
      write_svg(dir / fname, fields);
      files.push_back(fname);
    }
  }
  return files;
}

}  // namespace

std::vector<Vec3> sorted_eigen_gradients(const std::function<CMatrix(const Vec3&)>& h, const Vec3& bs, double delta) {
  const auto n = h(bs).rows();
  std::vector<Vec3> out(static_cast<std::size_t>(n), Vec3::Zero());
  for (int a = 0; a < 3; ++a) {
    Vec3 up = bs, dn = bs;
    up(a) += delta;
    dn(a) -= delta;
    const RVector eu = linalg::eigh(h(up)).values;
    const RVector ed = linalg::eigh(h(dn)).values;
    for (Eigen::Index l = 0; l < n; ++l) out[static_cast<std::size_t>(l)](a) = (eu(l) - ed(l)) / (2.0 * delta);
  }
  return out;
}

RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  validate(config);
  const auto t0 = std::chrono::steady_clock::now();
  const auto grid = config.amplitude_grid();
  std::vector<Chain> chains;
  for (const auto& pol : config.polarizations) {
    for (double ratio : config.E_over_D) chains.push_back({pol, ratio});
  }

  std::vector<ChainOutput> outputs(chains.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < chains.size(); i = next++) outputs[i] = run_chain(config, chains[i], grid);
  };
  const int n_threads = std::max(1, std::min<int>(options.threads, static_cast<int>(chains.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  RunResult result;
  for (std::size_t i = 0; i < chains.size(); ++i) {
    auto& o = outputs[i];
    result.records.insert(result.records.end(), o.records.begin(), o.records.end());
    for (auto& t : o.tables) {
      auto it = std::find_if(result.tables.begin(), result.tables.end(), [&](const Table& x) { return x.name == t.name; });
      if (it == result.tables.end()) {
        result.tables.push_back(std::move(t));
      } else {
        it->rows.insert(it->rows.end(), t.rows.begin(), t.rows.end());
      }
    }
    result.failures.insert(result.failures.end(), o.failures.begin(), o.failures.end());
    result.warnings.insert(result.warnings.end(), o.warnings.begin(), o.warnings.end());
    result.timings.push_back({chains[i].polarization, chains[i].ratio, o.seconds});
  }
  if (config.gradient_check_samples > 0) {
    result.gradient_checks = gradient_checks(config, options.seed.value_or(0), result.failures);
  }
  result.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

std::vector<std::string> write_outputs(const ExperimentConfig& config, const RunOptions& options,
                                       const RunResult& result, const std::filesystem::path& dir, bool plots) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;
  write_records(dir / "records.csv", result.records);
  files.emplace_back("records.csv");
  for (const auto& t : result.tables) {
    write_table(dir / (t.name + ".csv"), t);
    files.push_back(t.name + ".csv");
  }
  if (plots) {
    const auto svgs = write_plots(config, result, dir);
    files.insert(files.end(), svgs.begin(), svgs.end());
  }

  nlohmann::ordered_json m;
  m["tool"] = "floqspin";
  m["version"] = FLOQSPIN_VERSION;
  m["versions"] = {{"floqspin", FLOQSPIN_VERSION},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                         std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                   {"compiler", __VERSION__}};
  m["mode"] = mode_name(config.mode);
  nlohmann::ordered_json echo = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config.echo) echo[k] = v;
  m["config"] = echo;
  const auto grid = config.amplitude_grid();
  m["resolved"] = {{"S", config.spin},
                   {"D_ueV", config.D_ueV},
                   {"E_over_D", config.E_over_D},
                   {"g", {{config.g(0, 0), config.g(0, 1), config.g(0, 2)},
                          {config.g(1, 0), config.g(1, 1), config.g(1, 2)},
                          {config.g(2, 0), config.g(2, 1), config.g(2, 2)}}},
                   {"hbar_omega_ueV", config.hbar_omega_ueV},
                   {"polarizations", config.polarizations},
                   {"BF_grid_mT", {{"min", config.BF_min_mT}, {"max", config.BF_max_mT}, {"step", config.BF_step_mT},
                                   {"points", grid.size()}}},
                   {"continuation_step_mT", config.continuation_step_mT},
                   {"Bs_mT", vec_json(config.Bs_mT)},
                   {"N_floquet", config.N_floquet},
                   {"N_T", config.N_T},
                   {"t0_ns", config.t0_ns}};
  m["threads"] = options.threads;
  m["seed"] = options.seed ? nlohmann::ordered_json(*options.seed) : nlohmann::ordered_json(nullptr);
  m["status"] = result.failures.empty() ? "ok" : "numerical_failure";
  nlohmann::ordered_json failures = nlohmann::ordered_json::array();
  for (const auto& f : result.failures) {
    failures.push_back({{"polarization", f.polarization},
                        {"E_over_D", f.E_over_D},
                        {"B_F_mT", number_or_null(f.B_F)},
                        {"kind", f.kind},
                        {"message", f.message}});
  }
  m["failures"] = failures;
  nlohmann::ordered_json warnings = nlohmann::ordered_json::array();
  for (const auto& w : result.warnings) {
    warnings.push_back({{"polarization", w.polarization},
                        {"E_over_D", w.E_over_D},
                        {"B_F_mT", number_or_null(w.B_F)},
                        {"level", w.level},
                        {"message", w.message}});
  }
  m["warnings"] = warnings;
  if (!result.gradient_checks.empty()) {
    nlohmann::ordered_json samples = nlohmann::ordered_json::array();
    double worst = 0.0;
    for (const auto& g : result.gradient_checks) {
      worst = std::isnan(g.deviation) ? worst : std::max(worst, g.deviation);
      samples.push_back({{"polarization", g.polarization},
                         {"E_over_D", g.E_over_D},
                         {"B_F_mT", g.B_F},
                         {"Bs_mT", vec_json(g.Bs)},
                         {"max_deviation_ueV_per_mT", number_or_null(g.deviation)}});
    }
    m["gradient_checks"] = {{"delta_mT", config.gradient_check_delta_mT},
                            {"max_deviation_ueV_per_mT", worst},
                            {"samples", samples}};
  }
  nlohmann::ordered_json chains = nlohmann::ordered_json::array();
  for (const auto& t : result.timings) {
    chains.push_back({{"polarization", t.polarization}, {"E_over_D", t.E_over_D}, {"seconds", t.seconds}});
  }
  m["timings"] = {{"total_seconds", result.total_seconds}, {"chains", chains}};
  files.emplace_back("manifest.json");
  m["outputs"] = files;

  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest in '" + dir.string() + "'");
  out << m.dump(2) << '\n';
  return files;
}

}  // namespace floqspin::cli
