#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "floqspin/drive.hpp"
#include "floqspin/floquet.hpp"
#include "floqspin/spin_model.hpp"
#include "floqspin/stroboscopic.hpp"
#include "floqspin/types.hpp"

namespace floqspin {

/// SMFS cutoffs [ueV/mT]: the "yellow point" threshold, the stricter practical one, and the
/// linear-polarization level.
inline constexpr std::array<double, 3> kSmfsCutoffs{1e-2, 1e-3, 1e-9};

/// Physical levels at one static field, identified against reference states.
struct LevelSnapshot {
  RVector energies;
  CMatrix states;
  std::vector<Vec3> gradients;
  std::vector<int> multiplicity;
  double theta = 0.0;  // sum_n |d eps_n / d Bs|
  double min_overlap = 1.0;
};

/// Solves the Floquet problem at p.Bs and picks, for each reference column, the eigenstate with the
/// largest overlap; gradients by Hellmann-Feynman.
LevelSnapshot evaluate_levels(const StaticParams& p, const FourierField& f, double hbar_omega,
                              const CMatrix& reference_states, const RVector& reference_energies,
                              int n_floquet = kDefaultFloquetCutoff);

/// Physical levels at (amplitude, p.Bs), reached by amplitude continuation from B_F = 0.
LevelSnapshot continued_levels(const StaticParams& p, const Polarization& pol, double hbar_omega, double amplitude,
                               const TrackingSettings& settings = {});

struct SmfsSettings {
  int n_floquet = kDefaultFloquetCutoff;
  double initial_spacing = 0.1;                 // mT
  double shrink_factor = std::numbers::sqrt3;
  double min_spacing = 1e-5;                    // mT
  double theta_tolerance = 1e-12;               // ueV/mT
  long max_iterations = 200000;
};

struct SmfsResult {
  Vec3 bs_opt = Vec3::Zero();
  double theta = 0.0;
  std::vector<Vec3> gradients;
  std::vector<double> magnitudes;
  std::vector<std::array<bool, 3>> smfs_flags;  // per level, per kSmfsCutoffs entry
  long iterations = 0;
  double final_spacing = 0.0;
  RVector energies;
  CMatrix states;
  std::vector<double> theta_history;    // after every accepted move, starting with the initial point
  std::vector<double> spacing_history;  // after every shrink, starting with the initial spacing
};

/// Adaptive 3x3x3 grid search for min Theta(Bs). Replica identity is carried from the current
/// center to its neighbors by overlap. Throws NumericalError on a non-finite objective.
SmfsResult smfs_search(const StaticParams& p, const FourierField& f, double hbar_omega, const Vec3& bs_init,
                       const CMatrix& reference_states, const RVector& reference_energies,
                       const SmfsSettings& settings = {});

/// Called after each completed grid point of a sweep.
template <typename Result>
using SweepObserver = std::function<void(std::size_t index, const Result& result)>;

/// Amplitude-continued searches: B_F = grid[0] = 0 starts from Bs = 0; each later amplitude starts
/// from the previous optimum. Intervals wider than `max_step` are bridged by label tracking only.
std::vector<SmfsResult> smfs_sweep(const StaticParams& p, const Polarization& pol, double hbar_omega,
                                   const std::vector<double>& grid, const SmfsSettings& settings = {},
                                   double max_step = 1.0, const SweepObserver<SmfsResult>& observer = {});

struct CancellationSettings {
  PropagatorSettings propagator{};
  double tolerance = 1e-4;  // |script-B_eff| [mT]
  int max_iterations = 500;
  double divergence_factor = 10.0;
  int divergence_window = 20;
};

struct CancellationResult {
  Vec3 bs_opt = Vec3::Zero();
  double residual = 0.0;  // |script-B_eff| at bs_opt [mT]
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_trace;
  EffectiveHamiltonian h_eff;
};

/// Self-consistent iteration Bs <- Bs - (g^T)^-1 script-B_eff(Bs) on the exact stroboscopic
/// effective Hamiltonian. Throws DivergenceError when the residual grows by divergence_factor over
/// divergence_window iterations.
CancellationResult cancellation_solve(const StaticParams& p, const FourierField& f, double hbar_omega,
                                      const Vec3& bs_init, const CancellationSettings& settings = {});

/// Warm-started solves along the amplitude grid; intervals wider than `max_step` get intermediate
/// solves whose results only seed the next point.
std::vector<CancellationResult> cancellation_sweep(const StaticParams& p, const Polarization& pol, double hbar_omega,
                                                   const std::vector<double>& grid,
                                                   const CancellationSettings& settings = {}, double max_step = 1.0,
                                                   const SweepObserver<CancellationResult>& observer = {});

struct FieldSweep {
  int axis = 0;
  Vec3 center = Vec3::Zero();
  std::vector<double> offsets;     // mT, ascending
  std::vector<RVector> energies;   // per offset, per label
  std::vector<std::vector<Vec3>> gradients;
};

/// Levels along center + offset * e_axis for offsets in [-range, range], labels continued outward
/// from the center by overlap.
FieldSweep energy_sweep(const StaticParams& p, const FourierField& f, double hbar_omega, const Vec3& center, int axis,
                        double range, double step, const CMatrix& reference_states, const RVector& reference_energies,
                        int n_floquet = kDefaultFloquetCutoff);

/// Axis letter to index; throws InvalidArgument for anything but x, y, z.
int axis_from_name(char name);

}  // namespace floqspin
