#pragma once

#include <array>
#include <cstdint>

#include "nctmc/core/network.hpp"
#include "nctmc/core/propensity.hpp"
#include "nctmc/ssa/schedule.hpp"

namespace nctmc {

inline constexpr double kGasConstant = 8.314;  // J / (mol K)

// Arrhenius law k = prefactor * exp(-activation_energy / (R * T)).
double arrhenius_rate(double prefactor, double activation_energy, double temperature);

// How the seasonal rate curves are kept non-negative. The raw curves
// 2.1*cos(2*pi*s) and 2*sin(2*pi*s) dip below zero; Abs folds them, Clamp
// cuts them off at zero. Abs is the default reading: the two rates are then
// never simultaneously zero.
enum class Rectify { Abs, Clamp };

// --- Seasonal birth-death ---------------------------------------------------
// One species; births and deaths depend only on the day-of-year fraction
// s = (t / period) mod 1, rounded to `covariate_resolution`. The death rate
// carries an indicator [A >= 1] so the population cannot go negative.
struct BirthDeathConfig {
  double birth_scale = 2.1;
  double death_scale = 2.0;
  Rectify rectify = Rectify::Abs;
  double period_days = 365.24;
  double covariate_resolution = 0.1;
  std::int64_t initial_population = 50000;
};

ReactionNetwork birth_death_network();
CovariateSchedule birth_death_schedule(const BirthDeathConfig& config = {});

class BirthDeathTruth final : public PropensityModel {
 public:
  explicit BirthDeathTruth(BirthDeathConfig config = {}) : config_(config) {}

  Level level() const override { return Level::Reaction; }
  std::size_t output_count() const override { return 2; }
  bool try_rates(const State& state, const Covariates& covariates,
                 std::span<double> out) const override;

 private:
  BirthDeathConfig config_;
};

// --- Predator-prey community ------------------------------------------------
// Prey A and predators B, C with in/out flows, prey breeding, and two
// non-mass-action hunting rates. `system_size` is the N in
// alpha_3 = A k_3 / N and alpha_7 = A k_7 / N; reactions 4 and 7 share a
// state change and collapse into one equivalence class.
struct PredatorPreyConfig {
  std::array<double, 9> k{0.5, 1.7, 3.9, 4.6, 2.7, 1.9, 6.1, 2.4, 1.5};
  double system_size = 1e5;
  State initial_state{100000, 10, 10};
};

ReactionNetwork predator_prey_network();

class PredatorPreyTruth final : public PropensityModel {
 public:
  explicit PredatorPreyTruth(PredatorPreyConfig config = {}) : config_(config) {}

  Level level() const override { return Level::Reaction; }
  std::size_t output_count() const override { return 9; }
  bool try_rates(const State& state, const Covariates& covariates,
                 std::span<double> out) const override;

 private:
  PredatorPreyConfig config_;
};

// --- Temperature-dependent reaction network ---------------------------------
// Species A and B under mass action; each rate constant follows the
// Arrhenius law in the temperature covariate (Kelvin, constant per
// trajectory).
struct TemperatureCrnConfig {
  std::array<double, 4> prefactor{630000, 770000, 5380000, 2240000};
  std::array<double, 4> activation_energy{39000, 36000, 40000, 40000};
  std::vector<double> temperatures{271, 272, 273, 274, 275};
  std::int64_t initial_count_max = 4;  // A(0), B(0) uniform on {0,...,max}
};

ReactionNetwork temperature_crn_network();

class TemperatureCrnTruth final : public PropensityModel {
 public:
  explicit TemperatureCrnTruth(TemperatureCrnConfig config = {}) : config_(std::move(config)) {}

  Level level() const override { return Level::Reaction; }
  std::size_t output_count() const override { return 4; }
  bool try_rates(const State& state, const Covariates& covariates,
                 std::span<double> out) const override;

 private:
  TemperatureCrnConfig config_;
};

}  // namespace nctmc
