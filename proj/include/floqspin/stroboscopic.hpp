#pragma once

#include <array>
#include <optional>

#include "floqspin/drive.hpp"
#include "floqspin/spin_model.hpp"
#include "floqspin/types.hpp"

namespace floqspin {

struct PropagatorSettings {
  int time_steps = 100;     // N_T >= 2
  double start_time = 0.0;  // ns
};

/// H(t) = H_static + mu_B B(t)^T g s.
CMatrix hamiltonian_at(const StaticParams& p, const FourierField& f, double hbar_omega, double t,
                       const SpinOperators& ops);

/// Left-point product over one period: U_F = prod_{N = N_T .. 1} exp(-i dt H(t_N) / hbar),
/// t_N = t0 + (N - 1) dt, later times on the left.
CMatrix one_cycle_propagator(const StaticParams& p, const FourierField& f, double hbar_omega,
                             const PropagatorSettings& settings = {});

/// Principal matrix logarithm of a unitary matrix (eigenphases in (-pi, pi]).
/// Throws BranchAmbiguity when an eigenvalue lies within `branch_tol` of -1.
CMatrix principal_log_unitary(const CMatrix& u, double branch_tol = 1e-12);

/// (i hbar / T) ln U_F, Hermitian.
CMatrix effective_hamiltonian_matrix(const CMatrix& u, double period);

enum class EffectiveProvenance { kExact, kVanVleck };

/// 9-coefficient expansion of a spin-1 effective Hamiltonian on
/// {s_x^2, s_y^2, s_z^2, {s_x,s_y}, {s_x,s_z}, {s_y,s_z}, s_x, s_y, s_z}.
using Spin1Coefficients = std::array<double, 9>;

struct EffectiveHamiltonian {
  CMatrix matrix;  // ueV
  EffectiveProvenance provenance = EffectiveProvenance::kExact;
  std::optional<Spin1Coefficients> coefficients;  // S = 1 only
  Mat3 d_tensor = Mat3::Zero();                  // from c_1..c_6
  Vec3 zeeman_field = Vec3::Zero();              // script-B_eff = (c_7, c_8, c_9) / mu_B  [mT]
};

/// Exact stroboscopic effective Hamiltonian, decomposed when S = 1.
EffectiveHamiltonian effective_hamiltonian_exact(const CMatrix& u, double period);
EffectiveHamiltonian effective_hamiltonian_exact(const StaticParams& p, const FourierField& f, double hbar_omega,
                                                 const PropagatorSettings& settings = {});

/// The nine basis matrices M_1..M_9.
std::array<CMatrix, 9> spin1_basis();

/// Solves the 9x9 linear system for the basis coefficients. Throws UnsupportedSpin unless 3x3.
Spin1Coefficients decompose_spin1(const CMatrix& h);
CMatrix reconstruct_spin1(const Spin1Coefficients& c);
Mat3 d_tensor_from(const Spin1Coefficients& c);

struct CancellationField {
  Vec3 script_b = Vec3::Zero();  // (c_7, c_8, c_9) / mu_B
  Vec3 b_eff = Vec3::Zero();     // (g^T)^-1 script_b
};

/// Throws InvalidArgument for a singular g.
CancellationField extract_cancellation_field(double c7, double c8, double c9, const Mat3& g);

struct PropagatorStepCheck {
  double coarse = 0.0;  // ||U(N) - U(2N)||
  double fine = 0.0;    // ||U(2N) - U(4N)||
  double ratio() const { return coarse / fine; }
};

/// Richardson-style discretization diagnostic.
PropagatorStepCheck propagator_step_check(const StaticParams& p, const FourierField& f, double hbar_omega, int n_steps);

}  // namespace floqspin
