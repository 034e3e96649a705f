#pragma once

#include <stdexcept>
#include <string>

namespace floqspin {

/// Bad argument to a public operation (non-physical spin, unknown polarization, singular g, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inputs that are individually valid but mutually inconsistent (e.g. a drive table that violates
/// the reality condition, so the assembled Floquet matrix is not Hermitian).
class InconsistentInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested decomposition exists only for a particular spin (the nine-matrix basis is S = 1).
class UnsupportedSpin : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Closed-form Van Vleck expressions require an isotropic g-tensor.
class UnsupportedParameters : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// U_F has an eigenvalue at -1, so the principal logarithm is not unique.
class BranchAmbiguity : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical routine produced something unusable (non-finite objective, lost replica, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The self-consistent cancellation iteration diverged.
class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace floqspin
