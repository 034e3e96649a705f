#include "floqspin/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "floqspin/errors.hpp"

namespace floqspin {

namespace {

std::string format_field(const Vec3& b) {
  std::ostringstream s;
  s.precision(12);
  s << "(" << b.x() << ", " << b.y() << ", " << b.z() << ") mT";
  return s.str();
}

LevelSnapshot snapshot_from(const FloquetSpectrum& sol, const StaticParams& p, const std::vector<Eigen::Index>& idx,
                            const std::vector<double>& overlaps, const CMatrix& reference_states) {
  LevelSnapshot out;
  const auto k = static_cast<Eigen::Index>(idx.size());
  out.energies.resize(k);
  out.states.resize(sol.states.rows(), k);
  for (Eigen::Index l = 0; l < k; ++l) {
    const auto j = idx[static_cast<std::size_t>(l)];
    out.energies(l) = sol.quasienergies(j);
    out.states.col(l) = sol.states.col(j);
    const CVector ref = reference_states.col(l);
    const auto g = quasienergy_gradient(sol, p, j, &ref);
    out.gradients.push_back(g.gradient);
    out.multiplicity.push_back(g.multiplicity);
    out.theta += g.gradient.norm();
  }
  for (double o : overlaps) out.min_overlap = std::min(out.min_overlap, o);
  return out;
}

SmfsResult finish_search(SmfsResult r, const LevelSnapshot& snap) {
  r.theta = snap.theta;
  r.gradients = snap.gradients;
  r.energies = snap.energies;
  r.states = snap.states;
  for (const auto& g : snap.gradients) {
    const double mag = g.norm();
    r.magnitudes.push_back(mag);
    std::array<bool, 3> flags{};
    for (std::size_t c = 0; c < kSmfsCutoffs.size(); ++c) flags[c] = mag < kSmfsCutoffs[c];
    r.smfs_flags.push_back(flags);
  }
  return r;
}

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidArgument("amplitude grid is empty");
  if (grid.front() < 0.0) throw InvalidArgument("amplitude grid must be non-negative");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw InvalidArgument("amplitude grid must be strictly increasing");
  }
}

}  // namespace

LevelSnapshot evaluate_levels(const StaticParams& p, const FourierField& f, double hbar_omega,
                              const CMatrix& reference_states, const RVector& reference_energies, int n_floquet) {
  const auto sol = solve_floquet(p, f, hbar_omega, n_floquet);
  if (reference_states.rows() != sol.states.rows()) {
    throw InvalidArgument("reference states do not match the Floquet cutoff");
  }
  if (!sol.quasienergies.allFinite()) {
    throw NumericalError("non-finite quasienergies at Bs = " + format_field(p.Bs));
  }
  const auto match = match_levels(reference_states, reference_energies, sol);
  return snapshot_from(sol, p, match.indices, match.overlaps, reference_states);
}

LevelSnapshot continued_levels(const StaticParams& p, const Polarization& pol, double hbar_omega, double amplitude,
                               const TrackingSettings& settings) {
  if (amplitude < 0.0) throw InvalidArgument("drive amplitude must be non-negative");
  std::vector<double> grid{0.0};
  if (amplitude > 0.0) grid.push_back(amplitude);
  const auto ramp = monochromatic_ramp(pol);
  const auto tracked = track_levels(p, ramp, hbar_omega, grid, settings);
  const CMatrix& states = tracked.states.back();
  return evaluate_levels(p, ramp(amplitude), hbar_omega, states, tracked.energies.back(), settings.n_floquet);
}

SmfsResult smfs_search(const StaticParams& p, const FourierField& f, double hbar_omega, const Vec3& bs_init,
                       const CMatrix& reference_states, const RVector& reference_energies,
                       const SmfsSettings& settings) {
  if (!(settings.initial_spacing > 0.0) || !(settings.shrink_factor > 1.0) || !(settings.min_spacing > 0.0)) {
    throw InvalidArgument("grid search needs positive spacing and a shrink factor above 1");
  }
  StaticParams q = p;
  auto evaluate = [&](const Vec3& bs, const CMatrix& ref, const RVector& ref_e) {
    q.Bs = bs;
    auto snap = evaluate_levels(q, f, hbar_omega, ref, ref_e, settings.n_floquet);
    if (!std::isfinite(snap.theta)) throw NumericalError("non-finite objective at Bs = " + format_field(bs));
    return snap;
  };

  SmfsResult r;
  Vec3 center = bs_init;
  LevelSnapshot best = evaluate(center, reference_states, reference_energies);
  double spacing = settings.initial_spacing;
  r.theta_history.push_back(best.theta);
  r.spacing_history.push_back(spacing);

  while (best.theta >= settings.theta_tolerance && spacing >= settings.min_spacing &&
         r.iterations < settings.max_iterations) {
    ++r.iterations;
    // Replica identity is frozen to the current center's states for the whole cube.
    const CMatrix ref = best.states;
    const RVector ref_e = best.energies;
    Vec3 move = center;
    LevelSnapshot move_snap;
    double move_theta = best.theta;
    for (int i = -1; i <= 1; ++i) {
      for (int j = -1; j <= 1; ++j) {
        for (int k = -1; k <= 1; ++k) {
          if (i == 0 && j == 0 && k == 0) continue;
          const Vec3 trial = center + spacing * Vec3(i, j, k);
          auto snap = evaluate(trial, ref, ref_e);
          if (snap.theta < move_theta) {
            move_theta = snap.theta;
            move = trial;
            move_snap = std::move(snap);
          }
        }
      }
    }
    if (move_theta < best.theta) {
      center = move;
      best = std::move(move_snap);
      r.theta_history.push_back(best.theta);
    } else {
      spacing /= settings.shrink_factor;
      r.spacing_history.push_back(spacing);
    }
  }
  r.bs_opt = center;
  r.final_spacing = spacing;
  return finish_search(std::move(r), best);
}

std::vector<SmfsResult> smfs_sweep(const StaticParams& p, const Polarization& pol, double hbar_omega,
                                   const std::vector<double>& grid, const SmfsSettings& settings, double max_step,
                                   const SweepObserver<SmfsResult>& observer) {
  check_grid(grid);
  if (!(max_step > 0.0)) throw InvalidArgument("continuation step must be positive");
  const auto ramp = monochromatic_ramp(pol);
  TrackingSettings ts;
  ts.n_floquet = settings.n_floquet;
  StaticParams q = p;
  const auto start = track_levels(q, ramp, hbar_omega, {0.0}, ts);
  CMatrix ref = start.states.front();
  RVector ref_e = start.energies.front();
  Vec3 bs = q.Bs;
  double prev = 0.0;

  std::vector<SmfsResult> out;
  out.reserve(grid.size());
  for (double target : grid) {
    // Bridge the interval at fixed Bs so labels follow the drive adiabatically.
    const int substeps = std::max(0, static_cast<int>(std::ceil((target - prev) / max_step - 1e-9)) - 1);
    q.Bs = bs;
    for (int s = 1; s <= substeps; ++s) {
      const double amp = prev + (target - prev) * s / (substeps + 1);
      const auto snap = evaluate_levels(q, ramp(amp), hbar_omega, ref, ref_e, settings.n_floquet);
      ref = snap.states;
      ref_e = snap.energies;
    }
    auto r = smfs_search(q, ramp(target), hbar_omega, bs, ref, ref_e, settings);
    bs = r.bs_opt;
    ref = r.states;
    ref_e = r.energies;
    prev = target;
    out.push_back(std::move(r));
    if (observer) observer(out.size() - 1, out.back());
  }
  return out;
}

CancellationResult cancellation_solve(const StaticParams& p, const FourierField& f, double hbar_omega,
                                      const Vec3& bs_init, const CancellationSettings& settings) {
  if (settings.max_iterations < 1) throw InvalidArgument("cancellation needs at least one iteration");
  StaticParams q = p;
  q.Bs = bs_init;
  CancellationResult r;
  for (;;) {
    r.h_eff = effective_hamiltonian_exact(q, f, hbar_omega, settings.propagator);
    if (!r.h_eff.coefficients) throw UnsupportedSpin("dynamical cancellation uses the S = 1 basis decomposition");
    const auto& c = *r.h_eff.coefficients;
    const auto field = extract_cancellation_field(c[6], c[7], c[8], q.g);
    r.residual = field.script_b.norm();
    r.residual_trace.push_back(r.residual);
    r.bs_opt = q.Bs;
    if (!std::isfinite(r.residual)) {
      throw NumericalError("non-finite effective Zeeman field at Bs = " + format_field(q.Bs));
    }
    if (r.residual < settings.tolerance) {
      r.converged = true;
      return r;
    }
    const auto n = r.residual_trace.size();
    const auto w = static_cast<std::size_t>(settings.divergence_window);
    if (n > w && r.residual > settings.divergence_factor * r.residual_trace[n - 1 - w]) {
      std::ostringstream msg;
      msg.precision(6);
      msg << "cancellation diverged at Bs = " << format_field(q.Bs) << "; residual trace [mT]:";
      for (double v : r.residual_trace) msg << ' ' << v;
      throw DivergenceError(msg.str());
    }
    if (r.iterations >= settings.max_iterations) return r;
    ++r.iterations;
    q.Bs -= field.b_eff;
  }
}

std::vector<CancellationResult> cancellation_sweep(const StaticParams& p, const Polarization& pol, double hbar_omega,
                                                   const std::vector<double>& grid,
                                                   const CancellationSettings& settings, double max_step,
                                                   const SweepObserver<CancellationResult>& observer) {
  check_grid(grid);
  if (!(max_step > 0.0)) throw InvalidArgument("continuation step must be positive");
  const auto ramp = monochromatic_ramp(pol);
  Vec3 bs = p.Bs;
  double prev = 0.0;
  std::vector<CancellationResult> out;
  out.reserve(grid.size());
  for (double target : grid) {
    const int substeps = std::max(0, static_cast<int>(std::ceil((target - prev) / max_step - 1e-9)) - 1);
    for (int s = 1; s <= substeps; ++s) {
      const double amp = prev + (target - prev) * s / (substeps + 1);
      bs = cancellation_solve(p, ramp(amp), hbar_omega, bs, settings).bs_opt;
    }
    auto r = cancellation_solve(p, ramp(target), hbar_omega, bs, settings);
    bs = r.bs_opt;
    prev = target;
    out.push_back(std::move(r));
    if (observer) observer(out.size() - 1, out.back());
  }
  return out;
}

FieldSweep energy_sweep(const StaticParams& p, const FourierField& f, double hbar_omega, const Vec3& center, int axis,
                        double range, double step, const CMatrix& reference_states, const RVector& reference_energies,
                        int n_floquet) {
  if (axis < 0 || axis > 2) throw InvalidArgument("sweep axis must be x, y or z");
  if (!(step > 0.0) || !(range >= 0.0)) throw InvalidArgument("sweep range must be non-negative, step positive");
  const int half = static_cast<int>(std::floor(range / step + 1e-9));
  const auto count = static_cast<std::size_t>(2 * half + 1);

  FieldSweep out;
  out.axis = axis;
  out.center = center;
  out.offsets.resize(count);
  out.energies.resize(count);
  out.gradients.resize(count);

  StaticParams q = p;
  auto at = [&](int i, const CMatrix& ref, const RVector& ref_e) {
    q.Bs = center;
    q.Bs(axis) += i * step;
    return evaluate_levels(q, f, hbar_omega, ref, ref_e, n_floquet);
  };
  auto store = [&](int i, const LevelSnapshot& s) {
    const auto pos = static_cast<std::size_t>(i + half);
    out.offsets[pos] = i * step;
    out.energies[pos] = s.energies;
    out.gradients[pos] = s.gradients;
  };

  const auto mid = at(0, reference_states, reference_energies);
  store(0, mid);
  for (int dir : {1, -1}) {
    CMatrix ref = mid.states;
    RVector ref_e = mid.energies;
    for (int i = dir; std::abs(i) <= half; i += dir) {
      const auto s = at(i, ref, ref_e);
      store(i, s);
      ref = s.states;
      ref_e = s.energies;
    }
  }
  return out;
}

int axis_from_name(char name) {
  switch (name) {
    case 'x':
    case 'X':
      return 0;
    case 'y':
    case 'Y':
      return 1;
    case 'z':
    case 'Z':
      return 2;
    default:
      throw InvalidArgument(std::string("unknown axis '") + name + "'");
  }
}

}  // namespace floqspin
