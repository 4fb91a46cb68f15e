#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nctmc/core/network.hpp"
#include "nctmc/core/propensity.hpp"
#include "nctmc/estimators/counting.hpp"
#include "nctmc/estimators/glm.hpp"
#include "nctmc/experiments/systems.hpp"
#include "nctmc/likelihood/train.hpp"
#include "nctmc/nn/network.hpp"
#include "nctmc/ssa/schedule.hpp"

namespace nctmc {

enum class SystemKind { BirthDeath, PredatorPrey, TemperatureCrn };

std::string system_name(SystemKind kind);
SystemKind system_from_name(const std::string& name);

// One of the built-in study systems with its closed-form rates. Only the
// branch matching `kind` is consulted.
struct SystemConfig {
  SystemKind kind = SystemKind::BirthDeath;
  BirthDeathConfig birth_death;
  PredatorPreyConfig predator_prey;
  TemperatureCrnConfig temperature_crn;
};

ReactionNetwork make_network(const SystemConfig& system);
std::unique_ptr<PropensityModel> make_truth(const SystemConfig& system);
std::size_t system_covariate_width(const SystemConfig& system);

// Counting-estimator setup that matches how each system uses covariates:
// discrete season bins pooled over states for the seasonal system, discrete
// temperature bins for the temperature network, plain state cells otherwise.
CountingConfig default_counting_config(const SystemConfig& system);

struct GenerateSpec {
  SystemConfig system;
  std::size_t trajectories = 1;  // per temperature for TemperatureCrn
  std::optional<std::uint64_t> max_transitions;
  std::optional<double> t_max;
  std::uint64_t seed = 42;
  std::size_t workers = 0;  // 0 = hardware concurrency
};

enum class ModelKind { Neural, Glm };

struct ModelSpec {
  ModelKind kind = ModelKind::Neural;
  std::vector<nn::Layer> body;  // layers before the softplus class head; empty for Glm
  GlmLink link = GlmLink::Softplus;
  std::optional<std::vector<std::size_t>> input_columns;
  std::uint64_t init_seed = 1;
};

// Input columns when the spec leaves them open: covariates only for the
// seasonal system (its rates ignore the population), every packed column
// otherwise.
std::vector<std::size_t> resolve_input_columns(const ModelSpec& model, const SystemConfig& system,
                                               std::size_t state_width,
                                               std::size_t covariate_width);

struct TrainSpec {
  SystemConfig system;
  std::vector<std::string> data;  // trajectory files, and/or ...
  std::string manifest;           // ... a dataset manifest listing them
  ModelSpec model;
  TrainingConfig training;
  bool counting_baseline = false;  // also fit and report the counting estimator
  bool pool_covariates = false;    // report errors over covariate-pooled rows
};

struct MleSpec {
  SystemConfig system;
  std::vector<std::string> data;
  std::string manifest;
  CountingConfig counting;
  bool pool_covariates = false;
};

struct EvaluateSpec {
  SystemConfig system;
  std::vector<std::string> data;
  std::string manifest;
  std::string model;  // saved model file
  bool pool_covariates = false;
};

struct ControlDemoSpec {
  BirthDeathConfig birth_death;
  double horizon_days = 1461.0;
  double flip_fraction = 0.015;  // share of birth events rewritten as deaths
  std::size_t replicates = 32;
  ModelSpec model;
  TrainingConfig training;
  std::uint64_t seed = 42;
  std::size_t workers = 0;
};

// Each parser reads a JSON document; a "preset" key loads the named preset
// first, then remaining keys override individual fields.
GenerateSpec parse_generate_spec(std::istream& in);
TrainSpec parse_train_spec(std::istream& in);
MleSpec parse_mle_spec(std::istream& in);
EvaluateSpec parse_evaluate_spec(std::istream& in);
ControlDemoSpec parse_control_demo_spec(std::istream& in);

GenerateSpec generate_preset(const std::string& name);
TrainSpec train_preset(const std::string& name);
ControlDemoSpec control_demo_preset(const std::string& name);
std::vector<std::string> generate_preset_names();
std::vector<std::string> train_preset_names();

}  // namespace nctmc
