#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "nctmc/core/network.hpp"

namespace nctmc {

/// A propensity model maps x = [state, covariates] to non-negative rates.
/// Models evaluate either per reaction (ground-truth, closed-form models)
/// or per equivalence class (everything learned from data, where reactions
/// sharing a state change are unidentifiable and carry a joint rate).
class PropensityModel {
 public:
  enum class Level { Reaction, Class };

  virtual ~PropensityModel() = default;

  virtual Level level() const = 0;
  virtual std::size_t output_count() const = 0;

  /// Writes output_count() rates into `out`. Returns false where the model
  /// is undefined (e.g. an unobserved bin of a counting estimator); models
  /// that are defined everywhere always return true.
  virtual bool try_rates(const State& state, const Covariates& covariates,
                         std::span<double> out) const = 0;

  /// As try_rates, but an undefined point is an error.
  std::vector<double> rates(const State& state, const Covariates& covariates) const;
};

/// Reaction-level model folded to class level by summing member rates.
class ClassAggregatedModel final : public PropensityModel {
 public:
  ClassAggregatedModel(const PropensityModel& base, const EquivalenceClasses& classes);

  Level level() const override { return Level::Class; }
  std::size_t output_count() const override { return classes_->class_count(); }
  bool try_rates(const State& state, const Covariates& covariates,
                 std::span<double> out) const override;

 private:
  const PropensityModel* base_;
  const EquivalenceClasses* classes_;
};

/// Evaluates class-level rates for any model, pooling reaction-level
/// outputs through `classes`. Returns false where the model is undefined.
bool try_class_rates(const PropensityModel& model, const EquivalenceClasses& classes,
                     const State& state, const Covariates& covariates, std::span<double> out);

/// Zeroes any class rate whose state change would drive a species count
/// negative. Learned models cannot represent exhausted-reactant indicators
/// exactly, so simulating them needs this guard to stay well-posed.
class FeasibilityGuard final : public PropensityModel {
 public:
  FeasibilityGuard(const PropensityModel& base, const EquivalenceClasses& classes);

  Level level() const override { return Level::Class; }
  std::size_t output_count() const override { return classes_->class_count(); }
  bool try_rates(const State& state, const Covariates& covariates,
                 std::span<double> out) const override;

 private:
  const PropensityModel* base_;
  const EquivalenceClasses* classes_;
};

/// Convenience wrapper around a plain function; handy for closed-form
/// rates and test fixtures.
class FunctionModel final : public PropensityModel {
 public:
  using Fn = std::function<void(const State&, const Covariates&, std::span<double>)>;

  FunctionModel(Level level, std::size_t outputs, Fn fn)
      : level_(level), outputs_(outputs), fn_(std::move(fn)) {}

  Level level() const override { return level_; }
  std::size_t output_count() const override { return outputs_; }
  bool try_rates(const State& state, const Covariates& covariates,
                 std::span<double> out) const override {
    fn_(state, covariates, out);
    return true;
  }

 private:
  Level level_;
  std::size_t outputs_;
  Fn fn_;
};

}  // namespace nctmc
