#include "nctmc/likelihood/nll.hpp"

#include <cmath>

#include "nctmc/errors.hpp"

namespace nctmc {

namespace {

struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double term = x - comp;
    const double next = sum + term;
    comp = (next - sum) - term;
    sum = next;
  }
};

// Evaluates a model's class-level rates, pooling reaction-level outputs.
class ClassRates {
 public:
  ClassRates(const PropensityModel& model, const EquivalenceClasses& classes)
      : model_(model), classes_(classes), rates_(classes.class_count()) {
    if (model.level() == PropensityModel::Level::Reaction) {
      reaction_rates_.resize(model.output_count());
    } else if (model.output_count() != classes.class_count()) {
      throw ShapeMismatch("model output count does not match the class count");
    }
  }

  std::span<const double> at(const State& state, const Covariates& covariates) {
    if (model_.level() == PropensityModel::Level::Class) {
      if (!model_.try_rates(state, covariates, rates_))
        throw Error("model undefined at an observed row");
      return rates_;
    }
    if (!model_.try_rates(state, covariates, reaction_rates_))
      throw Error("model undefined at an observed row");
    std::fill(rates_.begin(), rates_.end(), 0.0);
    for (std::size_t j = 0; j < reaction_rates_.size(); ++j)
      rates_[classes_.class_of(j)] += reaction_rates_[j];
    return rates_;
  }

 private:
  const PropensityModel& model_;
  const EquivalenceClasses& classes_;
  std::vector<double> rates_;
  std::vector<double> reaction_rates_;
};

void unpack_row(const nn::Tensor& design, std::size_t r, std::size_t state_width,
                std::size_t covariate_width, State& state, Covariates& covariates) {
  state.resize(state_width);
  covariates.resize(covariate_width);
  for (std::size_t j = 0; j < state_width; ++j)
    state[j] = static_cast<std::int64_t>(std::llround(design(r, j)));
  for (std::size_t j = 0; j < covariate_width; ++j)
    covariates[j] = design(r, state_width + j);
}

double positive_log(double alpha) {
  if (!(alpha > 0.0)) throw NonPositivePropensity("observed transition has zero rate");
  return std::log(alpha);
}

}  // namespace

double nll(const PropensityModel& model, const GroupedDataset& data,
           const EquivalenceClasses& classes) {
  if (data.blocks.size() != classes.class_count())
    throw ShapeMismatch("grouped dataset does not match the class count");
  ClassRates rates(model, classes);
  KahanSum acc;
  State state;
  Covariates covariates;
  for (std::size_t k = 0; k < data.blocks.size(); ++k) {
    const ClassBlock& block = data.blocks[k];
    for (std::size_t r = 0; r < block.design.rows; ++r) {
      unpack_row(block.design, r, data.state_width, data.covariate_width, state, covariates);
      const auto alpha = rates.at(state, covariates);
      double total = 0.0;
      for (double a : alpha) total += a;
      acc.add(block.sojourns[r] * total);
      acc.add(-positive_log(alpha[k]));
    }
  }
  return acc.sum;
}

double nll(const PropensityModel& model, std::span<const Trajectory> trajectories,
           const EquivalenceClasses& classes) {
  return nll(model, group_transitions(trajectories, classes), classes);
}

double nll_sequential(const PropensityModel& model, const Trajectory& trajectory,
                      const EquivalenceClasses& classes) {
  ClassRates rates(model, classes);
  KahanSum acc;
  const auto& obs = trajectory.observations;
  for (std::size_t i = 0; i + 1 < obs.size(); ++i) {
    if (!obs[i].reaction) throw Error("transition without a recorded reaction");
    const double sojourn = obs[i + 1].time - obs[i].time;
    if (!(sojourn > 0.0)) throw Error("non-positive holding time");
    const auto alpha = rates.at(obs[i].state, obs[i].covariates);
    double total = 0.0;
    for (double a : alpha) total += a;
    acc.add(sojourn * total);
    acc.add(-positive_log(alpha[classes.class_of(*obs[i].reaction)]));
  }
  return acc.sum;
}

double nll_compressed(const PropensityModel& model, const SufficientStats& stats,
                      const EquivalenceClasses& classes) {
  if (stats.counts.cols != classes.class_count())
    throw ShapeMismatch("sufficient statistics do not match the class count");
  ClassRates rates(model, classes);
  KahanSum acc;
  State state;
  Covariates covariates;
  for (std::size_t r = 0; r < stats.rows.rows; ++r) {
    unpack_row(stats.rows, r, stats.state_width, stats.covariate_width, state, covariates);
    const auto alpha = rates.at(state, covariates);
    double total = 0.0;
    for (double a : alpha) total += a;
    acc.add(stats.waits[r] * total);
    for (std::size_t k = 0; k < classes.class_count(); ++k)
      if (stats.counts(r, k) != 0.0) acc.add(-stats.counts(r, k) * positive_log(alpha[k]));
  }
  return acc.sum;
}

}  // namespace nctmc
