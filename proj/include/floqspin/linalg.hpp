#pragma once

#include "floqspin/types.hpp"

namespace floqspin::linalg {

struct HermitianEigen {
  RVector values;   // ascending
  CMatrix vectors;  // columns, orthonormal
};

/// Dense Hermitian eigendecomposition with ascending eigenvalues.
HermitianEigen eigh(const CMatrix& h);

/// exp(-i * scale * H) for Hermitian H, through its eigendecomposition.
CMatrix expm_hermitian(const CMatrix& h, double scale);

double hermiticity_defect(const CMatrix& m);
double unitarity_defect(const CMatrix& u);

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }
inline CMatrix anticommutator(const CMatrix& a, const CMatrix& b) { return a * b + b * a; }

/// Largest singular value.
double operator_norm(const CMatrix& m);

}  // namespace floqspin::linalg
