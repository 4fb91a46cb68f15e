#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nctmc/core/network.hpp"

namespace nctmc {

/// One record of the observation sequence: the state and covariates at a
/// jump time, plus the reaction that fires next (absent on the final record).
/// Reaction indices are 0-based in memory, 1-based in files.
struct Observation {
  double time = 0.0;
  State state;
  Covariates covariates;
  std::optional<std::size_t> reaction;
};

/// Fully observed sample path: states at strictly increasing jump times.
struct Trajectory {
  std::vector<Observation> observations;

  /// Set when simulation stopped because the total propensity hit zero.
  bool absorbed = false;

  std::size_t transition_count() const {
    return observations.empty() ? 0 : observations.size() - 1;
  }
};

struct Violation {
  std::size_t index = 0;  // observation index the check failed at
  std::string message;
};

/// Checks trajectory invariants against a network: strictly increasing
/// times, non-negative states, identifiable state changes, reaction
/// records consistent with the observed jumps. Returns one entry per
/// failed check; empty means well formed.
std::vector<Violation> validate_trajectory(const Trajectory& trajectory,
                                           const ReactionNetwork& network,
                                           const EquivalenceClasses& classes);

}  // namespace nctmc
