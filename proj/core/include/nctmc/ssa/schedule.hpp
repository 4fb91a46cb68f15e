#pragma once

#include <limits>

#include "nctmc/core/network.hpp"

namespace nctmc {

/// Piecewise-constant covariate process with known breakpoints.
///
/// PeriodicDiscretized emits the scalar s(t) = round_to(resolution,
/// (t/period) mod 1), values in {0, resolution, ..., 1}; breakpoints sit
/// where the rounded value changes. ConstantPerTrajectory emits a fixed
/// vector; None emits an empty one.
class CovariateSchedule {
 public:
  enum class Kind { None, PeriodicDiscretized, ConstantPerTrajectory };

  static CovariateSchedule none();
  static CovariateSchedule periodic_discretized(double period, double resolution);
  static CovariateSchedule constant(Covariates values);

  Kind kind() const { return kind_; }
  double period() const { return period_; }
  double resolution() const { return resolution_; }
  const Covariates& constant_values() const { return constant_; }

  std::size_t dimension() const;

  /// Covariate vector in effect at time t.
  Covariates at(double t) const;

  /// First time strictly after t where the emitted value changes;
  /// +infinity when the schedule is constant.
  double next_breakpoint(double t) const;

 private:
  CovariateSchedule() = default;

  Kind kind_ = Kind::None;
  double period_ = 0.0;
  double resolution_ = 0.0;
  Covariates constant_;
};

}  // namespace nctmc
