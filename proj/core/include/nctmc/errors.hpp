#pragma once

#include <stdexcept>

namespace nctmc {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An observed state change matches no reaction's stoichiometry.
struct NoMatchingReaction : Error {
  using Error::Error;
};

/// Total propensity is zero: no further event can occur.
struct AbsorbedState : Error {
  using Error::Error;
};

/// A propensity model returned a negative rate.
struct NegativePropensity : Error {
  using Error::Error;
};

/// The propensity of an observed transition is not strictly positive,
/// so its log-likelihood contribution is undefined.
struct NonPositivePropensity : Error {
  using Error::Error;
};

/// Tensor or layer shapes are incompatible.
struct ShapeMismatch : Error {
  using Error::Error;
};

struct NonFiniteValue : Error {
  using Error::Error;
};

struct NonFiniteGradient : Error {
  using Error::Error;
};

struct NonFiniteLoss : Error {
  using Error::Error;
};

/// A covariate value falls outside every configured bin.
struct UnbinnableCovariate : Error {
  using Error::Error;
};

/// Malformed configuration, spec file, or data file.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace nctmc
