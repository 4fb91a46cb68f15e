#include "nctmc/core/trajectory.hpp"

#include <sstream>

namespace nctmc {

namespace {

void add(std::vector<Violation>& out, std::size_t index, std::string message) {
  out.push_back(Violation{index, std::move(message)});
}

}  // namespace

std::vector<Violation> validate_trajectory(const Trajectory& trajectory,
                                           const ReactionNetwork& network,
                                           const EquivalenceClasses& classes) {
  std::vector<Violation> out;
  const auto& obs = trajectory.observations;
  if (obs.empty()) {
    add(out, 0, "trajectory has no observations");
    return out;
  }

  const std::size_t s = network.species_count();
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (obs[i].state.size() != s) {
      add(out, i, "state dimension does not match network");
      return out;  // downstream checks would be meaningless
    }
    for (std::size_t j = 0; j < s; ++j)
      if (obs[i].state[j] < 0) add(out, i, "negative species count");
    if (obs[i].time < 0.0) add(out, i, "negative time");
  }

  for (std::size_t i = 0; i + 1 < obs.size(); ++i) {
    if (!(obs[i + 1].time > obs[i].time)) {
      std::ostringstream os;
      os << "non-increasing time at index " << (i + 1);
      add(out, i + 1, os.str());
    }
    std::size_t k = 0;
    bool identified = true;
    try {
      k = identify_reaction(classes, obs[i].state, obs[i + 1].state);
    } catch (const NoMatchingReaction&) {
      identified = false;
      add(out, i, "unidentifiable transition");
    }
    if (obs[i].reaction) {
      const std::size_t rho = *obs[i].reaction;
      if (rho >= network.reaction_count()) {
        add(out, i, "reaction index out of range");
      } else if (identified && classes.class_of(rho) != k) {
        add(out, i, "recorded reaction inconsistent with observed state change");
      }
    } else {
      add(out, i, "missing reaction record before a transition");
    }
  }

  if (obs.back().reaction) add(out, obs.size() - 1, "final record carries a reaction");

  return out;
}

}  // namespace nctmc
