#include "floqspin/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "floqspin/errors.hpp"
#include "floqspin/linalg.hpp"

namespace floqspin {

std::map<int, CMatrix> hamiltonian_harmonics(const StaticParams& p, const FourierField& f, const SpinOperators& ops) {
  std::map<int, CMatrix> out;
  out[0] = build_static_hamiltonian(p, ops);
  for (const auto& [m, field] : f.harmonics()) {
    if (m == 0) {
      out[0] += zeeman_operator(field, p.g, ops);
    } else {
      out[m] = zeeman_operator(field, p.g, ops);
    }
  }
  return out;
}

CMatrix FloquetMatrix::block(int m, int m_prime) const {
  const auto r = static_cast<Eigen::Index>(m + n_floquet) * block_dim;
  const auto c = static_cast<Eigen::Index>(m_prime + n_floquet) * block_dim;
  return matrix.block(r, c, block_dim, block_dim);
}

FloquetMatrix assemble_floquet(const StaticParams& p, const FourierField& f, double hbar_omega, int n_floquet) {
  if (n_floquet < 0) throw InvalidArgument("Floquet cutoff must be non-negative");
  if (!(hbar_omega > 0.0)) throw InvalidArgument("photon energy must be positive");
  if (!f.is_real(1e-12)) {
    throw InconsistentInput("drive harmonics violate B^(-m) = conj(B^(m)); Floquet matrix would not be Hermitian");
  }
  const auto ops = build_spin_operators(p.spin);
  const auto harmonics = hamiltonian_harmonics(p, f, ops);

  FloquetMatrix fm;
  fm.n_floquet = n_floquet;
  fm.block_dim = ops.dim();
  fm.hbar_omega = hbar_omega;
  const Eigen::Index d = fm.block_dim;
  const Eigen::Index nblocks = 2 * n_floquet + 1;
  fm.matrix = CMatrix::Zero(nblocks * d, nblocks * d);

  const CMatrix id = CMatrix::Identity(d, d);
  for (int m = -n_floquet; m <= n_floquet; ++m) {
    for (int mp = -n_floquet; mp <= n_floquet; ++mp) {
      const auto it = harmonics.find(m - mp);
      const bool diagonal = m == mp;
      if (it == harmonics.end() && !diagonal) continue;
      CMatrix blk = it == harmonics.end() ? CMatrix::Zero(d, d) : it->second;
      if (diagonal) blk -= static_cast<double>(m) * hbar_omega * id;
      fm.matrix.block((m + n_floquet) * d, (mp + n_floquet) * d, d, d) = blk;
    }
  }
  if (linalg::hermiticity_defect(fm.matrix) > 1e-12) {
    throw InconsistentInput("assembled Floquet matrix is not Hermitian");
  }
  return fm;
}

double FloquetSpectrum::block_weight(Eigen::Index col, int m) const {
  return states.col(col).segment((m + n_floquet) * block_dim, block_dim).squaredNorm();
}

FloquetSpectrum solve_quasienergies(const FloquetMatrix& m) {
  auto eig = linalg::eigh(m.matrix);
  FloquetSpectrum sol;
  sol.quasienergies = std::move(eig.values);
  sol.states = std::move(eig.vectors);
  sol.n_floquet = m.n_floquet;
  sol.block_dim = m.block_dim;
  sol.hbar_omega = m.hbar_omega;
  return sol;
}

FloquetSpectrum solve_floquet(const StaticParams& p, const FourierField& f, double hbar_omega, int n_floquet) {
  return solve_quasienergies(assemble_floquet(p, f, hbar_omega, n_floquet));
}

ReplicaSelection select_physical_replicas(const FloquetSpectrum& sol, const RVector& static_energies, double energy_tol,
                                          double min_weight) {
  ReplicaSelection out;
  std::vector<bool> used(static_cast<std::size_t>(sol.size()), false);
  const auto nlev = static_cast<int>(static_energies.size());

  for (int level = 0; level < nlev;) {
    int group_end = level + 1;
    while (group_end < nlev && std::abs(static_energies(group_end) - static_energies(level)) < energy_tol) ++group_end;
    std::vector<Eigen::Index> candidates;
    for (Eigen::Index j = 0; j < sol.size(); ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      if (std::abs(sol.quasienergies(j) - static_energies(level)) < energy_tol && sol.block_weight(j, 0) > min_weight) {
        candidates.push_back(j);
      }
    }
    const auto needed = static_cast<std::size_t>(group_end - level);
    if (candidates.size() < needed) {
      std::ostringstream msg;
      msg << "no physical replica found for static level " << level << " (E=" << static_energies(level) << ")";
      throw NumericalError(msg.str());
    }
    // Highest m = 0 weight first; ties keep spectrum order.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return sol.block_weight(a, 0) > sol.block_weight(b, 0); });
    candidates.resize(needed);
    std::sort(candidates.begin(), candidates.end());
    if (needed > 1) {
      std::vector<int> group(needed);
      std::iota(group.begin(), group.end(), level);
      out.degenerate_groups.push_back(std::move(group));
    }
    for (auto c : candidates) {
      used[static_cast<std::size_t>(c)] = true;
      out.indices.push_back(c);
    }
    level = group_end;
  }
  return out;
}

double overlap(const CVector& a, const CVector& b) { return std::abs(a.dot(b)); }

CVector embed_state(const CVector& state, Eigen::Index block_dim, int from, int to) {
  if (to < from) throw InvalidArgument("embed_state: target cutoff smaller than source");
  CVector out = CVector::Zero((2 * to + 1) * block_dim);
  out.segment((to - from) * block_dim, state.size()) = state;
  return out;
}

LevelMatch match_levels(const CMatrix& reference_states, const RVector& reference_energies, const FloquetSpectrum& sol,
                        double tie_tol) {
  const Eigen::Index k = reference_states.cols();
  const Eigen::MatrixXd ov = (reference_states.adjoint() * sol.states).cwiseAbs();
  LevelMatch out;
  out.indices.assign(static_cast<std::size_t>(k), -1);
  out.overlaps.assign(static_cast<std::size_t>(k), 0.0);
  std::vector<bool> label_done(static_cast<std::size_t>(k), false);
  std::vector<bool> col_used(static_cast<std::size_t>(sol.size()), false);

  for (Eigen::Index step = 0; step < k; ++step) {
    double best = -1.0;
    for (Eigen::Index l = 0; l < k; ++l) {
      if (label_done[static_cast<std::size_t>(l)]) continue;
      for (Eigen::Index j = 0; j < sol.size(); ++j) {
        if (!col_used[static_cast<std::size_t>(j)]) best = std::max(best, ov(l, j));
      }
    }
    Eigen::Index best_l = -1;
    Eigen::Index best_j = -1;
    double best_de = 0.0;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> contenders;
    for (Eigen::Index l = 0; l < k; ++l) {
      if (label_done[static_cast<std::size_t>(l)]) continue;
      for (Eigen::Index j = 0; j < sol.size(); ++j) {
        if (col_used[static_cast<std::size_t>(j)] || ov(l, j) < best - tie_tol) continue;
        contenders.emplace_back(l, j);
        const double de = std::abs(sol.quasienergies(j) - reference_energies(l));
        if (best_l < 0 || de < best_de) {
          best_l = l;
          best_j = j;
          best_de = de;
        }
      }
    }
    // Only contenders competing for the chosen label or column make the assignment ambiguous.
    for (const auto& [l, j] : contenders) {
      if ((l == best_l) != (j == best_j)) out.tie = true;
    }
    label_done[static_cast<std::size_t>(best_l)] = true;
    col_used[static_cast<std::size_t>(best_j)] = true;
    out.indices[static_cast<std::size_t>(best_l)] = best_j;
    out.overlaps[static_cast<std::size_t>(best_l)] = ov(best_l, best_j);
  }
  return out;
}

DriveRamp monochromatic_ramp(const Polarization& pol) {
  return [pol](double amplitude) { return to_fourier(DriveSpec{1.0, amplitude, pol}); };
}

Vec3 expectation_gradient(const CVector& state, Eigen::Index block_dim, const std::array<CMatrix, 3>& derivatives) {
  const auto nblocks = state.size() / block_dim;
  const Eigen::Map<const CMatrix> blocks(state.data(), block_dim, nblocks);
  Vec3 out;
  for (int a = 0; a < 3; ++a) {
    out(a) = (blocks.conjugate().cwiseProduct(derivatives[a] * blocks)).sum().real();
  }
  return out;
}

LevelGradient quasienergy_gradient(const FloquetSpectrum& sol, const StaticParams& p, Eigen::Index index,
                                   const CVector* reference, double degeneracy_tol) {
  const auto ops = build_spin_operators(p.spin);
  const auto derivatives = zeeman_derivatives(p.g, ops);
  const CVector ref = reference ? *reference : CVector(sol.states.col(index));

  std::vector<Eigen::Index> group;
  const double eps = sol.quasienergies(index);
  for (Eigen::Index j = 0; j < sol.size(); ++j) {
    if (std::abs(sol.quasienergies(j) - eps) < degeneracy_tol) group.push_back(j);
  }

  LevelGradient out;
  out.multiplicity = static_cast<int>(group.size());
  if (group.size() <= 1) {
    out.gradient = expectation_gradient(sol.states.col(index), sol.block_dim, derivatives);
    return out;
  }

  const auto k = static_cast<Eigen::Index>(group.size());
  CMatrix basis(sol.states.rows(), k);
  for (Eigen::Index c = 0; c < k; ++c) basis.col(c) = sol.states.col(group[static_cast<std::size_t>(c)]);
  const CVector ref_coords = basis.adjoint() * ref;
  const auto nblocks = basis.rows() / sol.block_dim;

  for (int a = 0; a < 3; ++a) {
    CMatrix projected(k, k);
    CMatrix applied(basis.rows(), k);
    for (Eigen::Index c = 0; c < k; ++c) {
      const Eigen::Map<const CMatrix> blocks(basis.col(c).data(), sol.block_dim, nblocks);
      CMatrix tmp = derivatives[a] * blocks;
      applied.col(c) = Eigen::Map<const CVector>(tmp.data(), basis.rows());
    }
    projected = basis.adjoint() * applied;
    const auto sub = linalg::eigh(0.5 * (projected + projected.adjoint()));
    Eigen::Index pick = 0;
    double best = -1.0;
    for (Eigen::Index c = 0; c < k; ++c) {
      const double w = std::abs(sub.vectors.col(c).dot(ref_coords));
      if (w > best + 1e-12) {
        best = w;
        pick = c;
      }
    }
    out.gradient(a) = sub.values(pick);
  }
  return out;
}

namespace {

std::vector<LevelGradient> gradients_for(const FloquetSpectrum& sol, const StaticParams& p,
                                         const std::vector<Eigen::Index>& idx, const CMatrix& states) {
  std::vector<LevelGradient> out;
  out.reserve(idx.size());
  for (std::size_t l = 0; l < idx.size(); ++l) {
    const CVector ref = states.col(static_cast<Eigen::Index>(l));
    out.push_back(quasienergy_gradient(sol, p, idx[l], &ref));
  }
  return out;
}

void warn_in(TrackedLevels& out, double amplitude, int level, std::string msg) {
  out.warnings.push_back({amplitude, level, std::move(msg)});
}

}  // namespace

TrackedLevels track_levels(const StaticParams& p, const DriveRamp& ramp, double hbar_omega,
                           const std::vector<double>& grid, const TrackingSettings& settings) {
  if (grid.empty() || grid.front() != 0.0) throw InvalidArgument("amplitude grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw InvalidArgument("amplitude grid must be strictly increasing");
  }
  if (!(settings.max_step > 0.0)) throw InvalidArgument("continuation step must be positive");

  const auto stat = solve_static(p);
  const auto ops = build_spin_operators(p.spin);
  const auto nlev = static_cast<Eigen::Index>(stat.energies.size());
  auto solve_at = [&](double amplitude) {
    FourierField f = ramp(amplitude);
    return solve_floquet(p, f, hbar_omega, settings.n_floquet);
  };

  TrackedLevels out;
  FloquetSpectrum sol0 = solve_at(0.0);
  const auto sel = select_physical_replicas(sol0, stat.energies, settings.degeneracy_tol);

  CMatrix states(sol0.states.rows(), nlev);
  RVector energies(nlev);
  for (Eigen::Index l = 0; l < nlev; ++l) {
    states.col(l) = sol0.states.col(sel.indices[static_cast<std::size_t>(l)]);
    energies(l) = sol0.quasienergies(sel.indices[static_cast<std::size_t>(l)]);
  }
  out.amplitudes.push_back(0.0);
  out.energies.push_back(energies);
  out.states.push_back(states);
  std::vector<Eigen::Index> idx0 = sel.indices;

  auto pending_groups = sel.degenerate_groups;
  double prev_amp = 0.0;

  for (std::size_t gi = 1; gi < grid.size(); ++gi) {
    const double target = grid[gi];
    const int substeps = std::max(1, static_cast<int>(std::ceil((target - prev_amp) / settings.max_step - 1e-9)));
    FloquetSpectrum sol;
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(nlev));
    for (int s = 1; s <= substeps; ++s) {
      const double amp = s == substeps ? target : prev_amp + (target - prev_amp) * s / substeps;
      sol = solve_at(amp);

      std::vector<bool> col_used(static_cast<std::size_t>(sol.size()), false);
      std::vector<bool> label_fixed(static_cast<std::size_t>(nlev), false);
      // Degenerate start: the first nonzero amplitude fixes the labels inside each group, and the
      // chosen states are projected back onto the B_F = 0 eigenspace.
      if (!pending_groups.empty()) {
        for (const auto& group : pending_groups) {
          CMatrix sub(states.rows(), static_cast<Eigen::Index>(group.size()));
          for (std::size_t c = 0; c < group.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = states.col(group[c]);
          const RVector weight = (sub.adjoint() * sol.states).cwiseAbs2().colwise().sum().transpose();
          std::vector<Eigen::Index> order(static_cast<std::size_t>(sol.size()));
          std::iota(order.begin(), order.end(), 0);
          std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return weight(a) > weight(b); });
          std::vector<Eigen::Index> picked;
          for (auto j : order) {
            if (picked.size() == group.size()) break;
            if (!col_used[static_cast<std::size_t>(j)]) picked.push_back(j);
          }
          std::sort(picked.begin(), picked.end(),
                    [&](auto a, auto b) { return sol.quasienergies(a) < sol.quasienergies(b); });
          if (std::abs(sol.quasienergies(picked.front()) - sol.quasienergies(picked.back())) < settings.degeneracy_tol) {
            warn_in(out, amp, group.front(), "degeneracy persists at first nonzero amplitude; labels arbitrary");
          }
          for (std::size_t c = 0; c < group.size(); ++c) {
            const int label = group[c];
            const auto j = picked[c];
            col_used[static_cast<std::size_t>(j)] = true;
            label_fixed[static_cast<std::size_t>(label)] = true;
            idx[static_cast<std::size_t>(label)] = j;
            CVector back = sub * (sub.adjoint() * sol.states.col(j));
            out.states.front().col(label) = back.normalized();
          }
        }
        pending_groups.clear();
        for (Eigen::Index l = 0; l < nlev; ++l) states.col(l) = out.states.front().col(l);
      }

      // Remaining labels: maximal overlap on unused columns.
      std::vector<Eigen::Index> free_labels;
      for (Eigen::Index l = 0; l < nlev; ++l) {
        if (!label_fixed[static_cast<std::size_t>(l)]) free_labels.push_back(l);
      }
      if (!free_labels.empty()) {
        FloquetSpectrum reduced;
        std::vector<Eigen::Index> cols;
        for (Eigen::Index j = 0; j < sol.size(); ++j) {
          if (!col_used[static_cast<std::size_t>(j)]) cols.push_back(j);
        }
        reduced.quasienergies.resize(static_cast<Eigen::Index>(cols.size()));
        reduced.states.resize(sol.states.rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t c = 0; c < cols.size(); ++c) {
          reduced.quasienergies(static_cast<Eigen::Index>(c)) = sol.quasienergies(cols[c]);
          reduced.states.col(static_cast<Eigen::Index>(c)) = sol.states.col(cols[c]);
        }
        CMatrix ref(states.rows(), static_cast<Eigen::Index>(free_labels.size()));
        RVector ref_e(static_cast<Eigen::Index>(free_labels.size()));
        for (std::size_t c = 0; c < free_labels.size(); ++c) {
          ref.col(static_cast<Eigen::Index>(c)) = states.col(free_labels[c]);
          ref_e(static_cast<Eigen::Index>(c)) = energies(free_labels[c]);
        }
        const auto match = match_levels(ref, ref_e, reduced);
        if (match.tie) warn_in(out, amp, -1, "equal overlap maxima; tie broken by smaller |delta epsilon|");
        for (std::size_t c = 0; c < free_labels.size(); ++c) {
          idx[static_cast<std::size_t>(free_labels[c])] = cols[static_cast<std::size_t>(match.indices[c])];
          if (match.overlaps[c] < settings.overlap_warning) {
            std::ostringstream msg;
            msg << "overlap " << match.overlaps[c] << " below " << settings.overlap_warning << "; refine the step";
            warn_in(out, amp, static_cast<int>(free_labels[c]), msg.str());
          }
        }
      }
      for (Eigen::Index l = 0; l < nlev; ++l) {
        states.col(l) = sol.states.col(idx[static_cast<std::size_t>(l)]);
        energies(l) = sol.quasienergies(idx[static_cast<std::size_t>(l)]);
      }
      if (out.gradients.empty() && settings.compute_gradients) {
        out.gradients.push_back(gradients_for(sol0, p, idx0, out.states.front()));
      }
    }
    prev_amp = target;
    out.amplitudes.push_back(target);
    out.energies.push_back(energies);
    out.states.push_back(states);
    if (settings.compute_gradients) out.gradients.push_back(gradients_for(sol, p, idx, states));
  }
  if (settings.compute_gradients && out.gradients.empty()) {
    out.gradients.push_back(gradients_for(sol0, p, idx0, out.states.front()));
  }
  return out;
}

double truncation_convergence(const StaticParams& p, const DriveRamp& ramp, double hbar_omega,
                              const std::vector<double>& grid, int n_low, int n_high, double max_step) {
  TrackingSettings lo;
  lo.n_floquet = n_low;
  lo.max_step = max_step;
  TrackingSettings hi = lo;
  hi.n_floquet = n_high;
  const auto a = track_levels(p, ramp, hbar_omega, grid, lo);
  const auto b = track_levels(p, ramp, hbar_omega, grid, hi);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.energies.size(); ++i) {
    worst = std::max(worst, (a.energies[i] - b.energies[i]).cwiseAbs().maxCoeff());
  }
  return worst;
}

double fold_quasienergy(double value, double hbar_omega) {
  double r = value - hbar_omega * std::round(value / hbar_omega);
  if (r <= -0.5 * hbar_omega) r += hbar_omega;
  if (r > 0.5 * hbar_omega) r -= hbar_omega;
  return r;
}

}  // namespace floqspin
