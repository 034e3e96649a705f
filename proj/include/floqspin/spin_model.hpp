#pragma once

#include <array>
#include <string>
#include <vector>

#include "floqspin/types.hpp"

namespace floqspin {

/// Dimensionless spin matrices in the |S, m> basis ordered m = S, S-1, ..., -S.
struct SpinOperators {
  double spin = 1.0;
  std::array<CMatrix, 3> s;  // s_x, s_y, s_z

  const CMatrix& sx() const { return s[0]; }
  const CMatrix& sy() const { return s[1]; }
  const CMatrix& sz() const { return s[2]; }
  Eigen::Index dim() const { return s[2].rows(); }
};

/// Ladder construction. Throws InvalidArgument unless 2S is a positive integer.
SpinOperators build_spin_operators(double spin);

/// Zero-field splitting + Zeeman parameters; D, E in ueV, Bs in mT.
struct StaticParams {
  double spin = 1.0;
  double D = 5.0;
  double E = 0.0;
  Mat3 g = 2.0 * Mat3::Identity();
  Vec3 Bs = Vec3::Zero();

  /// Non-fatal findings, e.g. |E| > |D|/3 (outside the conventional range).
  std::vector<std::string> warnings() const;
  bool g_isotropic(double tol = 1e-12) const;
};

/// mu_B * field^T g s. The field may be complex (a Fourier harmonic).
CMatrix zeeman_operator(const CVec3& field, const Mat3& g, const SpinOperators& ops);
CMatrix zeeman_operator(const Vec3& field, const Mat3& g, const SpinOperators& ops);

/// dH/dB_alpha = mu_B (g s)_alpha for the three Cartesian components.
std::array<CMatrix, 3> zeeman_derivatives(const Mat3& g, const SpinOperators& ops);

/// D [s_z^2 - S(S+1)/3] + E (s_x^2 - s_y^2).
CMatrix zero_field_hamiltonian(double D, double E, const SpinOperators& ops);

/// Zero-field plus Zeeman term in the static field p.Bs.
CMatrix build_static_hamiltonian(const StaticParams& p, const SpinOperators& ops);

struct StaticSpectrum {
  RVector energies;  // ascending, ueV
  CMatrix states;    // columns
};

StaticSpectrum solve_static(const StaticParams& p);

}  // namespace floqspin
