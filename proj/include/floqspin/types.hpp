#pragma once

#include <complex>

#include <Eigen/Dense>

namespace floqspin {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Mat3 = Eigen::Matrix3d;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

/// Unit system: energies in ueV, fields in mT, times in ns.
namespace units {
/// Bohr magneton [ueV / mT].
inline constexpr double kBohrMagneton = 0.05788381806;
/// Reduced Planck constant [ueV ns].
inline constexpr double kHbar = 0.6582119569;
}  // namespace units

/// Drive period T = 2 pi hbar / (hbar Omega) [ns].
double drive_period(double hbar_omega);

}  // namespace floqspin
