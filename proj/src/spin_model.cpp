#include "floqspin/spin_model.hpp"

#include <cmath>
#include <sstream>

#include "floqspin/errors.hpp"
#include "floqspin/linalg.hpp"

namespace floqspin {

SpinOperators build_spin_operators(double spin) {
  const double twice = 2.0 * spin;
  if (!std::isfinite(spin) || twice < 1.0 - 1e-12 || std::abs(twice - std::round(twice)) > 1e-12) {
    std::ostringstream msg;
    msg << "non-physical total spin S=" << spin << " (2S must be a positive integer)";
    throw InvalidArgument(msg.str());
  }
  const auto dim = static_cast<Eigen::Index>(std::lround(twice)) + 1;
  const double s_s1 = spin * (spin + 1.0);

  // s_+ |m> = sqrt(S(S+1) - m(m+1)) |m+1>; row i holds m = S - i.
  CMatrix raise = CMatrix::Zero(dim, dim);
  for (Eigen::Index col = 1; col < dim; ++col) {
    const double m = spin - static_cast<double>(col);
    raise(col - 1, col) = std::sqrt(s_s1 - m * (m + 1.0));
  }
  const CMatrix lower = raise.adjoint();

  SpinOperators ops;
  ops.spin = spin;
  ops.s[0] = 0.5 * (raise + lower);
  ops.s[1] = (raise - lower) / (2.0 * kI);
  ops.s[2] = CMatrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) ops.s[2](i, i) = spin - static_cast<double>(i);
  return ops;
}

std::vector<std::string> StaticParams::warnings() const {
  std::vector<std::string> out;
  if (std::abs(E) > std::abs(D) / 3.0 + 1e-12) {
    out.emplace_back("|E| > |D|/3: outside the conventional zero-field parameter range");
  }
  return out;
}

bool StaticParams::g_isotropic(double tol) const {
  return (g - g(0, 0) * Mat3::Identity()).cwiseAbs().maxCoeff() <= tol;
}

CMatrix zeeman_operator(const CVec3& field, const Mat3& g, const SpinOperators& ops) {
  // (B^T g)_beta couples to s_beta.
  const CVec3 coupling = g.transpose().cast<cplx>() * field;
  CMatrix h = CMatrix::Zero(ops.dim(), ops.dim());
  for (int beta = 0; beta < 3; ++beta) h += coupling(beta) * ops.s[beta];
  return units::kBohrMagneton * h;
}

CMatrix zeeman_operator(const Vec3& field, const Mat3& g, const SpinOperators& ops) {
  return zeeman_operator(CVec3(field.cast<cplx>()), g, ops);
}

std::array<CMatrix, 3> zeeman_derivatives(const Mat3& g, const SpinOperators& ops) {
  std::array<CMatrix, 3> out;
  for (int alpha = 0; alpha < 3; ++alpha) {
    out[alpha] = CMatrix::Zero(ops.dim(), ops.dim());
    for (int beta = 0; beta < 3; ++beta) out[alpha] += g(alpha, beta) * ops.s[beta];
    out[alpha] *= units::kBohrMagneton;
  }
  return out;
}

CMatrix zero_field_hamiltonian(double D, double E, const SpinOperators& ops) {
  const auto n = ops.dim();
  const CMatrix id = CMatrix::Identity(n, n);
  const double s_s1 = ops.spin * (ops.spin + 1.0);
  return D * (ops.sz() * ops.sz() - (s_s1 / 3.0) * id) + E * (ops.sx() * ops.sx() - ops.sy() * ops.sy());
}

CMatrix build_static_hamiltonian(const StaticParams& p, const SpinOperators& ops) {
  if (std::abs(ops.spin - p.spin) > 1e-12) {
    std::ostringstream msg;
    msg << "spin operators built for S=" << ops.spin << " but parameters have S=" << p.spin;
    throw InvalidArgument(msg.str());
  }
  CMatrix h = zero_field_hamiltonian(p.D, p.E, ops) + zeeman_operator(p.Bs, p.g, ops);
  return 0.5 * (h + h.adjoint());
}

StaticSpectrum solve_static(const StaticParams& p) {
  const auto ops = build_spin_operators(p.spin);
  const auto eig = linalg::eigh(build_static_hamiltonian(p, ops));
  return {eig.values, eig.vectors};
}

}  // namespace floqspin
