#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "floqspin/drive.hpp"
#include "floqspin/spin_model.hpp"
#include "floqspin/types.hpp"

namespace floqspin {

inline constexpr int kDefaultFloquetCutoff = 10;

/// Fourier components H^(m) of H(t) = sum_m H^(m) exp(-i m W t). H^(0) always present.
std::map<int, CMatrix> hamiltonian_harmonics(const StaticParams& p, const FourierField& f, const SpinOperators& ops);

/// Fourier-space Floquet Hamiltonian, harmonics -N..N. Block (m, m') sits at rows
/// (m+N)*d .. and columns (m'+N)*d .. with d = 2S+1.
struct FloquetMatrix {
  int n_floquet = kDefaultFloquetCutoff;
  Eigen::Index block_dim = 3;
  double hbar_omega = 20.0;
  CMatrix matrix;

  Eigen::Index size() const { return matrix.rows(); }
  CMatrix block(int m, int m_prime) const;
};

/// Block (m, m') = H^(m-m') - delta_{mm'} m hbar W. Throws InconsistentInput when the drive table
/// breaks the reality condition.
FloquetMatrix assemble_floquet(const StaticParams& p, const FourierField& f, double hbar_omega,
                               int n_floquet = kDefaultFloquetCutoff);

struct FloquetSpectrum {
  RVector quasienergies;  // ascending, ueV
  CMatrix states;         // stacked phi^(-N) ... phi^(N) per column
  int n_floquet = kDefaultFloquetCutoff;
  Eigen::Index block_dim = 3;
  double hbar_omega = 20.0;

  Eigen::Index size() const { return quasienergies.size(); }
  /// ||phi^(m)||^2 of eigenvector `col`.
  double block_weight(Eigen::Index col, int m) const;
};

FloquetSpectrum solve_quasienergies(const FloquetMatrix& m);
FloquetSpectrum solve_floquet(const StaticParams& p, const FourierField& f, double hbar_omega,
                              int n_floquet = kDefaultFloquetCutoff);

struct ReplicaSelection {
  std::vector<Eigen::Index> indices;           // one per static level, static (ascending) order
  std::vector<std::vector<int>> degenerate_groups;  // level positions sharing a static energy
  bool degenerate() const { return !degenerate_groups.empty(); }
};

/// Picks the 2S+1 eigenpairs with quasienergy equal to a static level and dominant m = 0 weight.
/// Intended for a spectrum solved at B_F = 0.
ReplicaSelection select_physical_replicas(const FloquetSpectrum& sol, const RVector& static_energies,
                                          double energy_tol = 1e-8, double min_weight = 0.99);

/// |sum_m phi_a^(m)^dagger phi_b^(m)|: the one-cycle average overlap of two Floquet states.
double overlap(const CVector& a, const CVector& b);

/// Zero-pads a Fourier-space state from cutoff `from` to cutoff `to` (to >= from).
CVector embed_state(const CVector& state, Eigen::Index block_dim, int from, int to);

struct LevelMatch {
  std::vector<Eigen::Index> indices;  // spectrum column per reference label
  std::vector<double> overlaps;
  bool tie = false;
};

/// Label assignment by maximal overlap with the reference states (columns). The assignment is a
/// permutation: each spectrum column is used at most once. Equal maxima are broken by the smaller
/// |delta epsilon| against `reference_energies` and reported through `tie`.
LevelMatch match_levels(const CMatrix& reference_states, const RVector& reference_energies, const FloquetSpectrum& sol,
                        double tie_tol = 1e-12);

struct LevelGradient {
  Vec3 gradient = Vec3::Zero();  // d epsilon / d Bs [ueV / mT]
  int multiplicity = 1;          // > 1 flags a degenerate level
};

struct TrackingSettings {
  int n_floquet = kDefaultFloquetCutoff;
  double max_step = 1.0;           // amplitude continuation step [mT]
  double overlap_warning = 0.8;    // warn below this overlap
  double degeneracy_tol = 1e-8;    // static levels closer than this are a degenerate group
  bool compute_gradients = false;
};

struct TrackWarning {
  double amplitude = 0.0;
  int level = -1;
  std::string message;
};

/// Unfolded quasienergies along an amplitude grid, with persistent labels. Label n starts on
/// static level n (ascending static order).
struct TrackedLevels {
  std::vector<double> amplitudes;
  std::vector<RVector> energies;  // per grid point, indexed by label
  std::vector<CMatrix> states;    // per grid point, one column per label
  std::vector<std::vector<LevelGradient>> gradients;  // filled when requested
  std::vector<TrackWarning> warnings;
};

using DriveRamp = std::function<FourierField(double amplitude)>;

DriveRamp monochromatic_ramp(const Polarization& pol);

/// Amplitude continuation from B_F = 0. `grid` must start at 0 and increase; intervals wider than
/// settings.max_step are subdivided internally.
TrackedLevels track_levels(const StaticParams& p, const DriveRamp& ramp, double hbar_omega,
                           const std::vector<double>& grid, const TrackingSettings& settings = {});

/// Hellmann-Feynman gradient of quasienergy `index`. The derivative of the Floquet matrix is
/// block diagonal, mu_B (g s)_alpha in every block. At a degeneracy (within degeneracy_tol) the
/// perturbation is diagonalized inside the degenerate eigenspace and the eigenvector closest to
/// `reference` (default: the spectrum column itself) supplies each component.
LevelGradient quasienergy_gradient(const FloquetSpectrum& sol, const StaticParams& p, Eigen::Index index,
                                   const CVector* reference = nullptr, double degeneracy_tol = 1e-10);

/// <phi| dH/dB_alpha |phi> for an arbitrary Fourier-space state (no degeneracy handling).
Vec3 expectation_gradient(const CVector& state, Eigen::Index block_dim, const std::array<CMatrix, 3>& derivatives);

/// Largest change of the tracked physical quasienergies between two cutoffs at the end of the grid.
double truncation_convergence(const StaticParams& p, const DriveRamp& ramp, double hbar_omega,
                              const std::vector<double>& grid, int n_low, int n_high, double max_step = 1.0);

/// Folds a quasienergy into the zone (-hbar W / 2, hbar W / 2].
double fold_quasienergy(double value, double hbar_omega);

}  // namespace floqspin
