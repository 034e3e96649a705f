#pragma once

#include <array>
#include <map>

#include "floqspin/drive.hpp"
#include "floqspin/spin_model.hpp"
#include "floqspin/types.hpp"

namespace floqspin {

/// Second-order high-frequency (Van Vleck) effective Hamiltonian from an arbitrary harmonic table
/// H^(m), using nested commutators only. Harmonics absent from the table are zero.
CMatrix vanvleck_generic(const std::map<int, CMatrix>& harmonics, double hbar_omega);

/// Drive-dependent coefficients of the closed-form spin expansion (isotropic g).
/// tilde[0..2] multiply the anticommutators {s_x,s_y}, {s_x,s_z}, {s_y,s_z} and are real;
/// tilde[3..5] multiply [{s_y,s_z},s_x], [{s_x,s_z},s_y], [{s_x,s_y},s_z] and are purely imaginary.
struct VanVleckCoefficients {
  std::array<cplx, 6> tilde{};
  std::map<int, std::array<cplx, 6>> per_harmonic;  // C_{l m}, m != 0  [ueV mT^2]
};

/// B_eff = Bs + B^(0) + B_1 + B_{2,1} + B_{2,2}  [mT]
struct EffectiveFieldBreakdown {
  Vec3 static_field = Vec3::Zero();
  Vec3 dc_field = Vec3::Zero();
  Vec3 first_order = Vec3::Zero();
  Vec3 second_order_static = Vec3::Zero();
  Vec3 second_order_mixed = Vec3::Zero();

  Vec3 total() const { return static_field + dc_field + first_order + second_order_static + second_order_mixed; }
};

struct VanVleckResult {
  CMatrix h_eff;
  CMatrix zero_field;        // H_ZF
  CMatrix delta_zero_field;  // anticommutator renormalization
  CMatrix zeeman;            // mu_B g B_eff . s
  CMatrix neq;               // non-equilibrium term as used in h_eff (S = 1 reduced form when S = 1)
  CMatrix neq_general;       // commutator-of-anticommutator form, any S
  VanVleckCoefficients coefficients;
  EffectiveFieldBreakdown field;
};

/// Isotropic-g g value; throws UnsupportedParameters for an anisotropic tensor.
double isotropic_g(const Mat3& g);

VanVleckCoefficients vanvleck_coefficients(double D, double E, double g, const FourierField& f, double hbar_omega);

/// Each contribution computed separately. The static-field cross term uses Bs + B^(0).
EffectiveFieldBreakdown effective_field(const FourierField& f, const Vec3& bs, const Mat3& g, double hbar_omega);

/// Closed-form second-order effective Hamiltonian for p.spin with g = g * 1.
VanVleckResult vanvleck_spin(const StaticParams& p, const FourierField& f, double hbar_omega);

/// 2i (C6 - C5) s_x^2 + 2i (C4 - C6) s_y^2 + 2i (C5 - C4) s_z^2 (S = 1 only).
CMatrix neq_spin1(const VanVleckCoefficients& c, const SpinOperators& ops);
CMatrix neq_general(const VanVleckCoefficients& c, const SpinOperators& ops);

}  // namespace floqspin
