#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "nctmc/core/propensity.hpp"
#include "nctmc/core/trajectory.hpp"
#include "nctmc/ssa/rng.hpp"
#include "nctmc/ssa/schedule.hpp"

namespace nctmc {

struct SimulationConfig {
  State initial_state;
  std::optional<double> t_max;
  std::optional<std::uint64_t> max_transitions;
  std::uint64_t rng_seed = 0;
  CovariateSchedule schedule = CovariateSchedule::none();
  double t_start = 0.0;
};

/// Samples the next jump: tau = (1/alpha) * log(1/v1) from the total
/// propensity, and the firing index by the cumulative-sum rule on a second
/// uniform draw. Throws AbsorbedState when the total is zero and
/// NegativePropensity when any rate is negative.
std::pair<double, std::size_t> next_event(const State& state, const Covariates& covariates,
                                          const PropensityModel& model,
                                          rng::Xoshiro256StarStar& rng);

/// Exact simulation under a propensity model. Stops at t_max or
/// max_transitions; a zero total propensity yields a truncated trajectory
/// with the absorbed flag set (unless a covariate breakpoint can still
/// change the rates). For piecewise-constant schedules a sojourn crossing
/// a breakpoint advances the clock to the breakpoint with no event and
/// resamples, which is exact for piecewise-constant rates.
Trajectory simulate(const ReactionNetwork& network, const EquivalenceClasses& classes,
                    const PropensityModel& model, const SimulationConfig& config);

struct SimulationResult {
  Trajectory trajectory;
  bool ok = true;
  std::string error;
};

/// Runs one simulation per config, each from its own seed. Output order
/// matches input order and every entry is bit-identical to a standalone
/// simulate() call; worker count never changes results. Per-trajectory
/// failures are collected, not rethrown.
std::vector<SimulationResult> simulate_batch(const ReactionNetwork& network,
                                             const EquivalenceClasses& classes,
                                             const PropensityModel& model,
                                             const std::vector<SimulationConfig>& configs,
                                             std::size_t workers = 0);

}  // namespace nctmc
