#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nctmc/errors.hpp"

namespace nctmc {

/// Species counts S(t). Stored as 64-bit integers so desk-scale
/// populations (~5e4 and beyond) can never overflow.
using State = std::vector<std::int64_t>;

/// External covariates C. Real-valued even when the generating schedule
/// is discrete; discreteness belongs to the schedule, not the type.
using Covariates = std::vector<double>;

/// Stoichiometry of a reaction network: r reactions over s species.
/// Immutable after construction and safe to share across threads.
class ReactionNetwork {
 public:
  struct Reaction {
    std::string label;
    std::vector<std::int64_t> reactants;  // phi, length s, non-negative
    std::vector<std::int64_t> products;   // psi, length s, non-negative
  };

  ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions);

  std::size_t species_count() const { return species_.size(); }
  std::size_t reaction_count() const { return reactions_.size(); }

  const std::vector<std::string>& species() const { return species_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }
  const Reaction& reaction(std::size_t rho) const { return reactions_.at(rho); }

  /// State change of reaction rho: products - reactants.
  const State& state_change(std::size_t rho) const { return deltas_.at(rho); }

 private:
  std::vector<std::string> species_;
  std::vector<Reaction> reactions_;
  std::vector<State> deltas_;
};

/// Partition of the reactions into groups with identical state change.
/// Reactions within one group are indistinguishable from trajectory data
/// and are modeled through a single joint propensity. Groups are ordered
/// by their smallest member reaction index.
class EquivalenceClasses {
 public:
  explicit EquivalenceClasses(const ReactionNetwork& network);

  std::size_t class_count() const { return members_.size(); }

  /// Member reaction indices of class k, ascending.
  const std::vector<std::size_t>& members(std::size_t k) const { return members_.at(k); }

  /// Class index of reaction rho.
  std::size_t class_of(std::size_t rho) const { return class_of_.at(rho); }

  /// Shared state change of class k.
  const State& state_change(std::size_t k) const { return deltas_.at(k); }

  /// Smallest member reaction index, used wherever one reaction must
  /// stand in for the whole class (e.g. event records).
  std::size_t representative(std::size_t k) const { return members_.at(k).front(); }

  /// Class whose state change equals `delta`, if any.
  const std::size_t* find_by_delta(const State& delta) const;

  std::string label(std::size_t k) const;

 private:
  std::vector<std::vector<std::size_t>> members_;
  std::vector<std::size_t> class_of_;
  std::vector<State> deltas_;
  std::map<State, std::size_t> by_delta_;
  const ReactionNetwork* network_;
};

EquivalenceClasses build_equivalence_classes(const ReactionNetwork& network);

/// Class index of the reaction explaining the jump `from` -> `to`.
/// Throws NoMatchingReaction if the difference matches no state change.
std::size_t identify_reaction(const EquivalenceClasses& classes, const State& from,
                              const State& to);

}  // namespace nctmc
