#include "nctmc/ssa/schedule.hpp"

#include <cmath>

namespace nctmc {

CovariateSchedule CovariateSchedule::none() { return CovariateSchedule(); }

CovariateSchedule CovariateSchedule::periodic_discretized(double period, double resolution) {
  if (!(period > 0.0)) throw ConfigError("schedule period must be positive");
  if (!(resolution > 0.0) || resolution > 1.0)
    throw ConfigError("schedule resolution must lie in (0, 1]");
  CovariateSchedule s;
  s.kind_ = Kind::PeriodicDiscretized;
  s.period_ = period;
  s.resolution_ = resolution;
  return s;
}

CovariateSchedule CovariateSchedule::constant(Covariates values) {
  CovariateSchedule s;
  s.kind_ = Kind::ConstantPerTrajectory;
  s.constant_ = std::move(values);
  return s;
}

std::size_t CovariateSchedule::dimension() const {
  switch (kind_) {
    case Kind::None:
      return 0;
    case Kind::PeriodicDiscretized:
      return 1;
    case Kind::ConstantPerTrajectory:
      return constant_.size();
  }
  return 0;
}

Covariates CovariateSchedule::at(double t) const {
  switch (kind_) {
    case Kind::None:
      return {};
    case Kind::ConstantPerTrajectory:
      return constant_;
    case Kind::PeriodicDiscretized: {
      double frac = std::fmod(t / period_, 1.0);
      if (frac < 0.0) frac += 1.0;
      // Round to the nearest multiple of the resolution. The small bias
      // keeps a clock advanced exactly onto a breakpoint inside the new
      // cell despite floating-point division noise.
      const double cells = 1.0 / resolution_;
      double k = std::floor(frac / resolution_ + 0.5 + 1e-9);
      if (k > std::round(cells)) k = std::round(cells);
      return {k * resolution_};
    }
  }
  return {};
}

double CovariateSchedule::next_breakpoint(double t) const {
  if (kind_ != Kind::PeriodicDiscretized)
    return std::numeric_limits<double>::infinity();

  // Within one period the value changes at fractions (j + 1/2) * resolution
  // and at the period wrap itself.
  const double n = std::floor(t / period_);
  for (int cycle = 0; cycle < 2; ++cycle) {
    const double base = n + cycle;
    for (double b = 0.5 * resolution_; b < 1.0; b += resolution_) {
      const double tb = (base + b) * period_;
      if (tb > t) return tb;
    }
    const double wrap = (base + 1.0) * period_;
    if (wrap > t) return wrap;
  }
  throw Error("schedule breakpoint search failed");  // unreachable
}

}  // namespace nctmc
