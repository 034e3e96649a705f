#include "floqspin/vanvleck.hpp"

#include <cmath>

#include "floqspin/errors.hpp"
#include "floqspin/floquet.hpp"
#include "floqspin/linalg.hpp"

namespace floqspin {

using linalg::anticommutator;
using linalg::commutator;

namespace {

// Bilinear cross product; Eigen's cross() conjugates complex results.
CVec3 cross(const CVec3& a, const CVec3& b) {
  return {a.y() * b.z() - a.z() * b.y(), a.z() * b.x() - a.x() * b.z(), a.x() * b.y() - a.y() * b.x()};
}

}  // namespace

CMatrix vanvleck_generic(const std::map<int, CMatrix>& harmonics, double hbar_omega) {
  const auto h0_it = harmonics.find(0);
  if (h0_it == harmonics.end()) throw InvalidArgument("harmonic table must contain H^(0)");
  const CMatrix& h0 = h0_it->second;
  const auto n = h0.rows();
  const CMatrix zero = CMatrix::Zero(n, n);
  auto get = [&](int m) -> const CMatrix& {
    const auto it = harmonics.find(m);
    return it == harmonics.end() ? zero : it->second;
  };

  CMatrix first = CMatrix::Zero(n, n);
  CMatrix second = CMatrix::Zero(n, n);
  for (const auto& [m, hm] : harmonics) {
    if (m == 0) continue;
    const CMatrix& hmm = get(-m);
    const double md = m;
    first += commutator(hmm, hm) / (2.0 * md * hbar_omega);
    second += commutator(commutator(hmm, h0), hm) / (2.0 * md * md * hbar_omega * hbar_omega);
    for (const auto& [nn, hn] : harmonics) {
      if (nn == 0 || nn == m) continue;
      const auto diff = harmonics.find(m - nn);
      if (diff == harmonics.end()) continue;
      second += commutator(commutator(hmm, diff->second), hn) / (3.0 * md * nn * hbar_omega * hbar_omega);
    }
  }
  return h0 + first + second;
}

double isotropic_g(const Mat3& g) {
  if ((g - g(0, 0) * Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-12) {
    throw UnsupportedParameters("closed-form Van Vleck expansion requires an isotropic g-tensor");
  }
  return g(0, 0);
}

VanVleckCoefficients vanvleck_coefficients(double D, double E, double g, const FourierField& f, double hbar_omega) {
  VanVleckCoefficients out;
  const double prefactor = std::pow(units::kBohrMagneton * g, 2) / (2.0 * hbar_omega * hbar_omega);
  for (const auto& [m, bp] : f.harmonics()) {
    if (m == 0) continue;
    const CVec3 bm = f.harmonic(-m);  // B^(-m)
    std::array<cplx, 6> c{};
    c[0] = -(D + E) * bm.x() * bp.y() - (D - E) * bm.y() * bp.x();
    c[1] = (D + E) * bm.x() * bp.z() + 2.0 * E * bm.z() * bp.x();
    c[2] = (D - E) * bm.y() * bp.z() - 2.0 * E * bm.z() * bp.y();
    c[3] = -kI * (D + E) * bm.x() * bp.x();
    c[4] = kI * (D - E) * bm.y() * bp.y();
    c[5] = 2.0 * kI * E * bm.z() * bp.z();
    out.per_harmonic[m] = c;
    const double inv_m2 = 1.0 / (static_cast<double>(m) * m);
    for (std::size_t l = 0; l < 6; ++l) out.tilde[l] += prefactor * inv_m2 * c[l];
  }
  return out;
}

EffectiveFieldBreakdown effective_field(const FourierField& f, const Vec3& bs, const Mat3& g, double hbar_omega) {
  const double gv = isotropic_g(g);
  const double mug = units::kBohrMagneton * gv;
  EffectiveFieldBreakdown out;
  out.static_field = bs;
  out.dc_field = f.harmonic(0).real();
  const CVec3 b_static = (bs + out.dc_field).cast<cplx>();

  CVec3 first = CVec3::Zero();
  CVec3 second_static = CVec3::Zero();
  CVec3 second_mixed = CVec3::Zero();
  for (const auto& [m, bp] : f.harmonics()) {
    if (m == 0) continue;
    const CVec3 bm = f.harmonic(-m);
    const double md = m;
    first += cross(bm, bp) / md;
    second_static += cross(bp, cross(bm, b_static)) / (md * md);
    for (const auto& [n, bn] : f.harmonics()) {
      if (n == 0 || n == m) continue;
      const CVec3 bdiff = f.harmonic(m - n);
      second_mixed += cross(bn, cross(bm, bdiff)) / (md * n);
    }
  }
  const cplx c1 = kI * mug / (2.0 * hbar_omega);
  const double c21 = mug * mug / (2.0 * hbar_omega * hbar_omega);
  const double c22 = mug * mug / (3.0 * hbar_omega * hbar_omega);
  out.first_order = (c1 * first).real();
  out.second_order_static = (c21 * second_static).real();
  out.second_order_mixed = (c22 * second_mixed).real();
  return out;
}

CMatrix neq_spin1(const VanVleckCoefficients& c, const SpinOperators& ops) {
  if (ops.dim() != 3) throw UnsupportedSpin("reduced non-equilibrium form holds for S = 1 only");
  const auto& t = c.tilde;
  return 2.0 * kI * (t[5] - t[4]) * ops.sx() * ops.sx() + 2.0 * kI * (t[3] - t[5]) * ops.sy() * ops.sy() +
         2.0 * kI * (t[4] - t[3]) * ops.sz() * ops.sz();
}

CMatrix neq_general(const VanVleckCoefficients& c, const SpinOperators& ops) {
  const CMatrix& x = ops.sx();
  const CMatrix& y = ops.sy();
  const CMatrix& z = ops.sz();
  const auto& t = c.tilde;
  return t[3] * commutator(anticommutator(y, z), x) + t[4] * commutator(anticommutator(x, z), y) +
         t[5] * commutator(anticommutator(x, y), z);
}

VanVleckResult vanvleck_spin(const StaticParams& p, const FourierField& f, double hbar_omega) {
  const double g = isotropic_g(p.g);
  if (!f.is_real(1e-12)) throw InconsistentInput("drive harmonics violate the reality condition");
  const auto ops = build_spin_operators(p.spin);

  VanVleckResult out;
  out.coefficients = vanvleck_coefficients(p.D, p.E, g, f, hbar_omega);
  out.field = effective_field(f, p.Bs, p.g, hbar_omega);

  const auto& t = out.coefficients.tilde;
  out.zero_field = zero_field_hamiltonian(p.D, p.E, ops);
  out.delta_zero_field = t[0].real() * anticommutator(ops.sx(), ops.sy()) +
                         t[1].real() * anticommutator(ops.sx(), ops.sz()) +
                         t[2].real() * anticommutator(ops.sy(), ops.sz());
  out.zeeman = zeeman_operator(out.field.total(), p.g, ops);
  out.neq_general = neq_general(out.coefficients, ops);
  out.neq = ops.dim() == 3 ? neq_spin1(out.coefficients, ops) : out.neq_general;
  out.h_eff = out.zero_field + out.delta_zero_field + out.zeeman + out.neq;
  return out;
}

}  // namespace floqspin
