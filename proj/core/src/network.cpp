#include "nctmc/core/network.hpp"

#include <sstream>

namespace nctmc {

namespace {

std::string coeff_error(const std::string& what, const std::string& label) {
  std::ostringstream os;
  os << what << " in reaction '" << label << "'";
  return os.str();
}

}  // namespace

ReactionNetwork::ReactionNetwork(std::vector<std::string> species,
                                 std::vector<Reaction> reactions)
    : species_(std::move(species)), reactions_(std::move(reactions)) {
  if (species_.empty()) throw ConfigError("network needs at least one species");
  if (reactions_.empty()) throw ConfigError("network needs at least one reaction");

  const std::size_t s = species_.size();
  deltas_.reserve(reactions_.size());
  for (auto& r : reactions_) {
    if (r.reactants.size() != s || r.products.size() != s)
      throw ConfigError(coeff_error("coefficient vector length mismatch", r.label));
    State delta(s);
    for (std::size_t i = 0; i < s; ++i) {
      if (r.reactants[i] < 0 || r.products[i] < 0)
        throw ConfigError(coeff_error("negative stoichiometric coefficient", r.label));
      delta[i] = r.products[i] - r.reactants[i];
    }
    deltas_.push_back(std::move(delta));
  }
}

EquivalenceClasses::EquivalenceClasses(const ReactionNetwork& network) : network_(&network) {
  const std::size_t r = network.reaction_count();
  class_of_.assign(r, 0);
  for (std::size_t rho = 0; rho < r; ++rho) {
    const State& delta = network.state_change(rho);
    auto it = by_delta_.find(delta);
    if (it == by_delta_.end()) {
      // New class; classes end up ordered by smallest member because
      // reactions are scanned in index order.
      const std::size_t k = members_.size();
      members_.push_back({rho});
      deltas_.push_back(delta);
      by_delta_.emplace(delta, k);
      class_of_[rho] = k;
    } else {
      members_[it->second].push_back(rho);
      class_of_[rho] = it->second;
    }
  }
}

const std::size_t* EquivalenceClasses::find_by_delta(const State& delta) const {
  auto it = by_delta_.find(delta);
  return it == by_delta_.end() ? nullptr : &it->second;
}

std::string EquivalenceClasses::label(std::size_t k) const {
  std::ostringstream os;
  const auto& m = members_.at(k);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) os << "+";
    os << network_->reaction(m[i]).label;
  }
  return os.str();
}

EquivalenceClasses build_equivalence_classes(const ReactionNetwork& network) {
  return EquivalenceClasses(network);
}

std::size_t identify_reaction(const EquivalenceClasses& classes, const State& from,
                              const State& to) {
  if (from.size() != to.size())
    throw NoMatchingReaction("state dimension changed between observations");
  State delta(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) delta[i] = to[i] - from[i];
  const std::size_t* k = classes.find_by_delta(delta);
  if (!k) {
    std::ostringstream os;
    os << "state change (";
    for (std::size_t i = 0; i < delta.size(); ++i) os << (i ? "," : "") << delta[i];
    os << ") matches no reaction";
    throw NoMatchingReaction(os.str());
  }
  return *k;
}

}  // namespace nctmc
