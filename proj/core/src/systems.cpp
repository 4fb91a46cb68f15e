#include "nctmc/experiments/systems.hpp"

#include <cmath>
#include <numbers>

#include "nctmc/errors.hpp"

namespace nctmc {

namespace {

double rectify(Rectify mode, double v) {
  return mode == Rectify::Abs ? std::abs(v) : std::max(v, 0.0);
}

}  // namespace

double arrhenius_rate(double prefactor, double activation_energy, double temperature) {
  if (!(temperature > 0.0)) throw ConfigError("temperature must be positive");
  return prefactor * std::exp(-activation_energy / (kGasConstant * temperature));
}

ReactionNetwork birth_death_network() {
  return ReactionNetwork({"A"}, {
                                    {"birth", {0}, {1}},
                                    {"death", {1}, {0}},
                                });
}

CovariateSchedule birth_death_schedule(const BirthDeathConfig& config) {
  return CovariateSchedule::periodic_discretized(config.period_days,
                                                 config.covariate_resolution);
}

bool BirthDeathTruth::try_rates(const State& state, const Covariates& covariates,
                                std::span<double> out) const {
  const double s = covariates.at(0);
  const double angle = 2.0 * std::numbers::pi * s;
  out[0] = config_.birth_scale * rectify(config_.rectify, std::cos(angle));
  out[1] = state.at(0) >= 1 ? config_.death_scale * rectify(config_.rectify, std::sin(angle))
                            : 0.0;
  return true;
}

ReactionNetwork predator_prey_network() {
  return ReactionNetwork({"A", "B", "C"}, {
                                              {"B_out", {0, 1, 0}, {0, 0, 0}},
                                              {"B_in", {0, 0, 0}, {0, 1, 0}},
                                              {"A_out", {1, 0, 0}, {0, 0, 0}},
                                              {"A_in", {0, 0, 0}, {1, 0, 0}},
                                              {"C_out", {0, 0, 1}, {0, 0, 0}},
                                              {"C_in", {0, 0, 0}, {0, 0, 1}},
                                              {"A_breed", {1, 0, 0}, {2, 0, 0}},
                                              {"B_hunts_A", {1, 1, 0}, {0, 2, 0}},
                                              {"C_hunts_B", {0, 1, 1}, {0, 0, 2}},
                                          });
}

bool PredatorPreyTruth::try_rates(const State& state, const Covariates&,
                                  std::span<double> out) const {
  const double a = static_cast<double>(state.at(0));
  const double b = static_cast<double>(state.at(1));
  const double c = static_cast<double>(state.at(2));
  const auto& k = config_.k;
  out[0] = b * k[0];
  out[1] = k[1];
  out[2] = a * k[2] / config_.system_size;
  out[3] = k[3];
  out[4] = c * k[4];
  out[5] = k[5];
  out[6] = a * k[6] / config_.system_size;
  out[7] = a * std::sqrt(b) * k[7];
  out[8] = std::log(b * c + 1.0) * k[8];
  return true;
}

ReactionNetwork temperature_crn_network() {
  return ReactionNetwork({"A", "B"}, {
                                         {"AA_out", {2, 0}, {0, 0}},
                                         {"AB_out", {1, 1}, {0, 0}},
                                         {"A_in", {0, 0}, {1, 0}},
                                         {"B_in", {0, 0}, {0, 1}},
                                     });
}

bool TemperatureCrnTruth::try_rates(const State& state, const Covariates& covariates,
                                    std::span<double> out) const {
  const double temperature = covariates.at(0);
  const double a = static_cast<double>(state.at(0));
  const double b = static_cast<double>(state.at(1));
  const auto rate = [&](std::size_t j) {
    return arrhenius_rate(config_.prefactor[j], config_.activation_energy[j], temperature);
  };
  out[0] = a * (a - 1.0) * rate(0);
  out[1] = a * b * rate(1);
  out[2] = rate(2);
  out[3] = rate(3);
  return true;
}

}  // namespace nctmc
