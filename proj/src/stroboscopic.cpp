#include "floqspin/stroboscopic.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "floqspin/errors.hpp"
#include "floqspin/linalg.hpp"

namespace floqspin {

CMatrix hamiltonian_at(const StaticParams& p, const FourierField& f, double hbar_omega, double t,
                       const SpinOperators& ops) {
  return build_static_hamiltonian(p, ops) + zeeman_operator(field_at(f, hbar_omega, t), p.g, ops);
}

CMatrix one_cycle_propagator(const StaticParams& p, const FourierField& f, double hbar_omega,
                             const PropagatorSettings& settings) {
  if (settings.time_steps < 2) throw InvalidArgument("propagator needs at least 2 time steps");
  if (!(hbar_omega > 0.0)) throw InvalidArgument("photon energy must be positive");
  const auto ops = build_spin_operators(p.spin);
  const double period = drive_period(hbar_omega);
  const double dt = period / settings.time_steps;
  const CMatrix h_static = build_static_hamiltonian(p, ops);

  CMatrix u = CMatrix::Identity(ops.dim(), ops.dim());
  for (int n = 1; n <= settings.time_steps; ++n) {
    const double t = settings.start_time + (n - 1) * dt;
    const CMatrix h = h_static + zeeman_operator(field_at(f, hbar_omega, t), p.g, ops);
    u = linalg::expm_hermitian(h, dt / units::kHbar) * u;
  }
  return u;
}

CMatrix principal_log_unitary(const CMatrix& u, double branch_tol) {
  // A unitary matrix is normal, so its complex Schur form is diagonal up to rounding.
  Eigen::ComplexSchur<CMatrix> schur(u);
  const CMatrix& q = schur.matrixU();
  const CMatrix& t = schur.matrixT();
  CVector logs(t.rows());
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    const cplx lambda = t(i, i);
    if (std::abs(lambda + 1.0) < branch_tol) {
      throw BranchAmbiguity("U_F has an eigenvalue at -1 (quasienergy on the zone edge); shift hbar*Omega");
    }
    logs(i) = std::log(lambda);
  }
  return q * logs.asDiagonal() * q.adjoint();
}

CMatrix effective_hamiltonian_matrix(const CMatrix& u, double period) {
  const CMatrix h = (kI * units::kHbar / period) * principal_log_unitary(u);
  return 0.5 * (h + h.adjoint());
}

std::array<CMatrix, 9> spin1_basis() {
  const auto ops = build_spin_operators(1.0);
  const CMatrix& x = ops.sx();
  const CMatrix& y = ops.sy();
  const CMatrix& z = ops.sz();
  return {x * x, y * y, z * z, linalg::anticommutator(x, y), linalg::anticommutator(x, z),
          linalg::anticommutator(y, z), x, y, z};
}

namespace {

const Eigen::Matrix<cplx, 9, 9>& basis_system() {
  static const Eigen::Matrix<cplx, 9, 9> m = [] {
    Eigen::Matrix<cplx, 9, 9> out;
    const auto basis = spin1_basis();
    for (int b = 0; b < 9; ++b) {
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) out(3 * r + c, b) = basis[b](r, c);
      }
    }
    return out;
  }();
  return m;
}

}  // namespace

Spin1Coefficients decompose_spin1(const CMatrix& h) {
  if (h.rows() != 3 || h.cols() != 3) {
    throw UnsupportedSpin("the nine-matrix basis decomposition is defined for S = 1 (3x3) only");
  }
  Eigen::Matrix<cplx, 9, 1> flat;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) flat(3 * r + c) = h(r, c);
  }
  const Eigen::Matrix<cplx, 9, 1> c = basis_system().fullPivLu().solve(flat);
  Spin1Coefficients out{};
  for (int b = 0; b < 9; ++b) out[static_cast<std::size_t>(b)] = c(b).real();
  return out;
}

CMatrix reconstruct_spin1(const Spin1Coefficients& c) {
  const auto basis = spin1_basis();
  CMatrix h = CMatrix::Zero(3, 3);
  for (std::size_t b = 0; b < 9; ++b) h += c[b] * basis[b];
  return h;
}

Mat3 d_tensor_from(const Spin1Coefficients& c) {
  Mat3 d;
  d << c[0], c[3], c[4],  //
      c[3], c[1], c[5],   //
      c[4], c[5], c[2];
  return d;
}

CancellationField extract_cancellation_field(double c7, double c8, double c9, const Mat3& g) {
  Eigen::FullPivLU<Mat3> lu(g.transpose());
  if (!lu.isInvertible() || !g.allFinite()) throw InvalidArgument("g-tensor is singular");
  CancellationField out;
  out.script_b = Vec3(c7, c8, c9) / units::kBohrMagneton;
  out.b_eff = lu.solve(out.script_b);
  return out;
}

EffectiveHamiltonian effective_hamiltonian_exact(const CMatrix& u, double period) {
  EffectiveHamiltonian out;
  out.matrix = effective_hamiltonian_matrix(u, period);
  out.provenance = EffectiveProvenance::kExact;
  if (out.matrix.rows() == 3) {
    const auto c = decompose_spin1(out.matrix);
    out.coefficients = c;
    out.d_tensor = d_tensor_from(c);
    out.zeeman_field = Vec3(c[6], c[7], c[8]) / units::kBohrMagneton;
  }
  return out;
}

EffectiveHamiltonian effective_hamiltonian_exact(const StaticParams& p, const FourierField& f, double hbar_omega,
                                                 const PropagatorSettings& settings) {
  return effective_hamiltonian_exact(one_cycle_propagator(p, f, hbar_omega, settings), drive_period(hbar_omega));
}

PropagatorStepCheck propagator_step_check(const StaticParams& p, const FourierField& f, double hbar_omega,
                                          int n_steps) {
  PropagatorSettings s;
  s.time_steps = n_steps;
  const CMatrix u1 = one_cycle_propagator(p, f, hbar_omega, s);
  s.time_steps = 2 * n_steps;
  const CMatrix u2 = one_cycle_propagator(p, f, hbar_omega, s);
  s.time_steps = 4 * n_steps;
  const CMatrix u4 = one_cycle_propagator(p, f, hbar_omega, s);
  return {linalg::operator_norm(u1 - u2), linalg::operator_norm(u2 - u4)};
}

}  // namespace floqspin
