#include "nctmc/core/propensity.hpp"

#include <algorithm>

#include "nctmc/errors.hpp"

namespace nctmc {

std::vector<double> PropensityModel::rates(const State& state,
                                           const Covariates& covariates) const {
  std::vector<double> out(output_count());
  if (!try_rates(state, covariates, out))
    throw Error("propensity model undefined at the requested point");
  return out;
}

ClassAggregatedModel::ClassAggregatedModel(const PropensityModel& base,
                                           const EquivalenceClasses& classes)
    : base_(&base), classes_(&classes) {
  if (base.level() != Level::Reaction)
    throw ConfigError("ClassAggregatedModel expects a reaction-level model");
}

bool ClassAggregatedModel::try_rates(const State& state, const Covariates& covariates,
                                     std::span<double> out) const {
  std::vector<double> per_reaction(base_->output_count());
  if (!base_->try_rates(state, covariates, per_reaction)) return false;
  for (std::size_t k = 0; k < classes_->class_count(); ++k) {
    double sum = 0.0;
    for (std::size_t rho : classes_->members(k)) sum += per_reaction[rho];
    out[k] = sum;
  }
  return true;
}

FeasibilityGuard::FeasibilityGuard(const PropensityModel& base, const EquivalenceClasses& classes)
    : base_(&base), classes_(&classes) {
  if (base.level() != Level::Class || base.output_count() != classes.class_count())
    throw ConfigError("FeasibilityGuard expects a class-level model matching the classes");
}

bool FeasibilityGuard::try_rates(const State& state, const Covariates& covariates,
                                 std::span<double> out) const {
  if (!base_->try_rates(state, covariates, out)) return false;
  for (std::size_t k = 0; k < classes_->class_count(); ++k) {
    const State& delta = classes_->state_change(k);
    for (std::size_t j = 0; j < delta.size(); ++j)
      if (state[j] + delta[j] < 0) {
        out[k] = 0.0;
        break;
      }
  }
  return true;
}

bool try_class_rates(const PropensityModel& model, const EquivalenceClasses& classes,
                     const State& state, const Covariates& covariates, std::span<double> out) {
  if (out.size() != classes.class_count()) throw ShapeMismatch("output span size mismatch");
  if (model.level() == PropensityModel::Level::Class) {
    if (model.output_count() != classes.class_count())
      throw ShapeMismatch("model output count does not match the class count");
    return model.try_rates(state, covariates, out);
  }
  std::vector<double> per_reaction(model.output_count());
  if (!model.try_rates(state, covariates, per_reaction)) return false;
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t j = 0; j < per_reaction.size(); ++j)
    out[classes.class_of(j)] += per_reaction[j];
  return true;
}

}  // namespace nctmc
