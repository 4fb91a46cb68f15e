#include "nctmc/experiments/run.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "nctmc/core/io.hpp"
#include "nctmc/errors.hpp"
#include "nctmc/estimators/counting.hpp"
#include "nctmc/likelihood/grouped.hpp"
#include "nctmc/ssa/simulate.hpp"

namespace nctmc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trajectory_filename(std::size_t index) {
  std::ostringstream name;
  name << "trajectory_" << std::setw(5) << std::setfill('0') << index << ".jsonl";
  return name.str();
}

std::int64_t uniform_count(rng::Xoshiro256StarStar& rng, std::int64_t max_inclusive) {
  const double u = rng.uniform01();
  const auto v = static_cast<std::int64_t>(u * static_cast<double>(max_inclusive + 1));
  return std::min(v, max_inclusive);
}

json system_config_json(const SystemConfig& system) {
  json j;
  j["kind"] = system_name(system.kind);
  switch (system.kind) {
    case SystemKind::BirthDeath: {
      const auto& c = system.birth_death;
      j["birth_scale"] = c.birth_scale;
      j["death_scale"] = c.death_scale;
      j["rectify"] = c.rectify == Rectify::Abs ? "abs" : "clamp";
      j["period_days"] = c.period_days;
      j["covariate_resolution"] = c.covariate_resolution;
      j["initial_population"] = c.initial_population;
      break;
    }
    case SystemKind::PredatorPrey: {
      const auto& c = system.predator_prey;
      j["k"] = c.k;
      j["system_size"] = c.system_size;
      j["initial_state"] = c.initial_state;
      break;
    }
    case SystemKind::TemperatureCrn: {
      const auto& c = system.temperature_crn;
      j["prefactor"] = c.prefactor;
      j["activation_energy"] = c.activation_energy;
      j["temperatures"] = c.temperatures;
      j["initial_count_max"] = c.initial_count_max;
      break;
    }
  }
  return j;
}

json report_to_json(const ErrorReport& report) {
  std::ostringstream buffer;
  write_error_report_json(buffer, report);
  return json::parse(buffer.str());
}

json training_summary_json(const TrainingResult& result) {
  return json{{"epochs", result.epochs},
              {"final_nll", result.final_nll},
              {"stop_reason", result.stop_reason}};
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

fs::path resolve(const std::string& file, const fs::path& base) {
  fs::path p(file);
  return p.is_absolute() ? p : base / p;
}

// The inventory rows rate errors are scored on: as observed, or pooled to
// one row per covariate vector when the system's rates ignore the state.
StateInventory evaluation_inventory(std::span<const Trajectory> trajectories,
                                    const ReactionNetwork& network, bool pool_covariates) {
  StateInventory inventory = build_inventory(trajectories);
  if (!pool_covariates) return inventory;
  return pool_by_covariates(inventory, State(network.species_count(), 1));
}

}  // namespace

std::vector<Trajectory> load_trajectories(const std::vector<std::string>& files,
                                          const fs::path& base) {
  std::vector<Trajectory> out;
  out.reserve(files.size());
  for (const auto& file : files) out.push_back(load_trajectory(resolve(file, base).string()));
  return out;
}

std::vector<Trajectory> load_training_data(const std::vector<std::string>& data,
                                           const std::string& manifest, const fs::path& base) {
  std::vector<Trajectory> out = load_trajectories(data, base);
  if (!manifest.empty()) {
    const fs::path mpath = resolve(manifest, base);
    std::ifstream in(mpath);
    if (!in) throw ConfigError("cannot open manifest " + mpath.string());
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError("manifest " + mpath.string() + " is not valid JSON: " + e.what());
    }
    if (!j.is_object() || j.value("format", "") != "nctmc.dataset.v1")
      throw ConfigError("manifest " + mpath.string() + " has an unrecognized format");
    const fs::path mdir = mpath.parent_path();
    for (const auto& entry : j.at("trajectories"))
      out.push_back(
          load_trajectory(resolve(entry.at("file").get<std::string>(), mdir).string()));
  }
  if (out.empty()) throw ConfigError("no trajectory files given (use 'data' or 'manifest')");
  return out;
}

NeuralPropensityModel make_model(const ModelSpec& model, const SystemConfig& system,
                                 const SufficientStats& stats,
                                 const EquivalenceClasses& classes) {
  auto columns = resolve_input_columns(model, system, stats.state_width, stats.covariate_width);
  std::vector<std::string> labels;
  labels.reserve(classes.class_count());
  for (std::size_t k = 0; k < classes.class_count(); ++k) labels.push_back(classes.label(k));

  if (model.kind == ModelKind::Glm)
    return make_glm(stats, std::move(columns), model.link, model.init_seed, std::move(labels));

  nn::NetworkSpec architecture;
  architecture.input_width = columns.size();
  architecture.layers = model.body;
  architecture.layers.push_back(nn::DenseLayer{classes.class_count(), nn::Activation::Softplus});
  architecture.validate();

  auto parameters = nn::initialize_parameters(architecture, model.init_seed);
  auto transform = derive_input_transform(stats, std::move(columns));
  auto scales = derive_output_scale(stats);
  return NeuralPropensityModel(std::move(architecture), std::move(parameters),
                               std::move(transform), std::move(scales), stats.state_width,
                               stats.covariate_width, std::move(labels));
}

GenerateOutput run_generate(const GenerateSpec& spec, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const ReactionNetwork network = make_network(spec.system);
  const EquivalenceClasses classes = build_equivalence_classes(network);
  const auto truth = make_truth(spec.system);

  std::vector<SimulationConfig> configs;
  switch (spec.system.kind) {
    case SystemKind::BirthDeath: {
      const auto& c = spec.system.birth_death;
      for (std::size_t i = 0; i < spec.trajectories; ++i) {
        SimulationConfig config;
        config.initial_state = {c.initial_population};
        config.t_max = spec.t_max;
        config.max_transitions = spec.max_transitions;
        config.rng_seed = rng::derive_seed(spec.seed, i);
        config.schedule = birth_death_schedule(c);
        configs.push_back(std::move(config));
      }
      break;
    }
    case SystemKind::PredatorPrey: {
      const auto& c = spec.system.predator_prey;
      for (std::size_t i = 0; i < spec.trajectories; ++i) {
        SimulationConfig config;
        config.initial_state = c.initial_state;
        config.t_max = spec.t_max;
        config.max_transitions = spec.max_transitions;
        config.rng_seed = rng::derive_seed(spec.seed, i);
        configs.push_back(std::move(config));
      }
      break;
    }
    case SystemKind::TemperatureCrn: {
      const auto& c = spec.system.temperature_crn;
      std::size_t index = 0;
      for (double temperature : c.temperatures) {
        for (std::size_t i = 0; i < spec.trajectories; ++i, ++index) {
          rng::Xoshiro256StarStar init_rng(rng::derive_seed(spec.seed, 1000000 + index));
          SimulationConfig config;
          config.initial_state = {uniform_count(init_rng, c.initial_count_max),
                                  uniform_count(init_rng, c.initial_count_max)};
          config.t_max = spec.t_max;
          config.max_transitions = spec.max_transitions;
          config.rng_seed = rng::derive_seed(spec.seed, index);
          config.schedule = CovariateSchedule::constant({temperature});
          configs.push_back(std::move(config));
        }
      }
      break;
    }
  }

  const auto results = simulate_batch(network, classes, *truth, configs, spec.workers);

  GenerateOutput output;
  output.trajectories = results.size();
  json entries = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].ok)
      throw Error("trajectory " + std::to_string(i) + " failed: " + results[i].error);
    const Trajectory& trajectory = results[i].trajectory;
    const std::string name = trajectory_filename(i);
    save_trajectory((out_dir / name).string(), trajectory);
    output.trajectory_files.push_back(out_dir / name);
    output.transitions += trajectory.transition_count();
    if (trajectory.absorbed) ++output.absorbed;

    json entry;
    entry["file"] = name;
    entry["seed"] = configs[i].rng_seed;
    entry["initial_state"] = configs[i].initial_state;
    if (configs[i].schedule.kind() == CovariateSchedule::Kind::ConstantPerTrajectory)
      entry["covariates"] = configs[i].schedule.constant_values();
    entry["transitions"] = trajectory.transition_count();
    entry["absorbed"] = trajectory.absorbed;
    entries.push_back(std::move(entry));
  }

  json manifest;
  manifest["format"] = "nctmc.dataset.v1";
  manifest["system"] = system_name(spec.system.kind);
  manifest["system_config"] = system_config_json(spec.system);
  manifest["generator"] = rng::kGeneratorFamily;
  manifest["seed"] = spec.seed;
  manifest["trajectories"] = std::move(entries);

  output.manifest_file = out_dir / "manifest.json";
  write_text_file(output.manifest_file, manifest.dump(2) + "\n");
  return output;
}

TrainOutput run_train(const TrainSpec& spec, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const auto trajectories = load_training_data(spec.data, spec.manifest, fs::current_path());
  const ReactionNetwork network = make_network(spec.system);
  const EquivalenceClasses classes = build_equivalence_classes(network);
  const auto truth = make_truth(spec.system);

  const SufficientStats stats = compress(trajectories, classes);
  NeuralPropensityModel model = make_model(spec.model, spec.system, stats, classes);

  TrainOutput output;
  output.training = train_model(model, trajectories, classes, spec.training);
  output.parameter_count = model.parameters().count();

  output.model_file = out_dir / "model.json";
  {
    std::ofstream out(output.model_file, std::ios::binary);
    if (!out) throw Error("cannot open " + output.model_file.string() + " for writing");
    model.save(out);
  }
  output.loss_file = out_dir / "loss_history.csv";
  {
    std::ofstream out(output.loss_file, std::ios::binary);
    if (!out) throw Error("cannot open " + output.loss_file.string() + " for writing");
    write_loss_history_csv(out, output.training.history);
  }

  const StateInventory inventory =
      evaluation_inventory(trajectories, network, spec.pool_covariates);
  output.model_report = compare_models(*truth, model, inventory, classes);

  json metrics;
  metrics["model"] = report_to_json(output.model_report);
  if (spec.counting_baseline) {
    const CountingMle counting =
        fit_counting_mle(trajectories, classes, default_counting_config(spec.system));
    output.counting_report = compare_models(*truth, counting, inventory, classes);
    metrics["counting"] = report_to_json(*output.counting_report);
    output.counting_file = out_dir / "counting_rates.csv";
    std::ofstream out(*output.counting_file, std::ios::binary);
    if (!out) throw Error("cannot open " + output.counting_file->string() + " for writing");
    counting.write_csv(out);
  }

  json report;
  report["format"] = "nctmc.train_report.v1";
  report["system"] = system_name(spec.system.kind);
  report["trajectories"] = trajectories.size();
  report["transitions"] = stats.transition_count;
  report["unique_rows"] = stats.row_count();
  report["model"] = {{"kind", spec.model.kind == ModelKind::Glm ? "glm" : "neural"},
                     {"parameters", output.parameter_count},
                     {"input_columns", model.transform().columns}};
  report["training"] = training_summary_json(output.training);
  report["metrics"] = std::move(metrics);

  output.report_file = out_dir / "report.json";
  write_text_file(output.report_file, report.dump(2) + "\n");
  return output;
}

MleOutput run_mle(const MleSpec& spec, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const auto trajectories = load_training_data(spec.data, spec.manifest, fs::current_path());
  const ReactionNetwork network = make_network(spec.system);
  const EquivalenceClasses classes = build_equivalence_classes(network);
  const auto truth = make_truth(spec.system);

  const CountingMle counting = fit_counting_mle(trajectories, classes, spec.counting);
  const StateInventory inventory =
      evaluation_inventory(trajectories, network, spec.pool_covariates);

  MleOutput output;
  output.cells = counting.cell_count();
  output.report = compare_models(*truth, counting, inventory, classes);

  output.table_file = out_dir / "counting_rates.csv";
  {
    std::ofstream out(output.table_file, std::ios::binary);
    if (!out) throw Error("cannot open " + output.table_file.string() + " for writing");
    counting.write_csv(out);
  }

  json report;
  report["format"] = "nctmc.mle_report.v1";
  report["system"] = system_name(spec.system.kind);
  report["trajectories"] = trajectories.size();
  report["cells"] = output.cells;
  report["metrics"] = {{"counting", report_to_json(output.report)}};
  output.report_file = out_dir / "report.json";
  write_text_file(output.report_file, report.dump(2) + "\n");
  return output;
}

EvaluateOutput run_evaluate(const EvaluateSpec& spec, const fs::path& out_dir) {
  if (spec.model.empty())
    throw ConfigError("no model file given (set 'model' in the spec or pass --model)");
  fs::create_directories(out_dir);
  const auto trajectories = load_training_data(spec.data, spec.manifest, fs::current_path());
  const ReactionNetwork network = make_network(spec.system);
  const EquivalenceClasses classes = build_equivalence_classes(network);
  const auto truth = make_truth(spec.system);

  std::ifstream in(resolve(spec.model, fs::current_path()));
  if (!in) throw ConfigError("cannot open model file " + spec.model);
  const NeuralPropensityModel model = NeuralPropensityModel::load(in);

  const StateInventory inventory =
      evaluation_inventory(trajectories, network, spec.pool_covariates);

  EvaluateOutput output;
  output.report = compare_models(*truth, model, inventory, classes);

  json report;
  report["format"] = "nctmc.evaluate_report.v1";
  report["system"] = system_name(spec.system.kind);
  report["trajectories"] = trajectories.size();
  report["model_file"] = spec.model;
  report["metrics"] = {{"model", report_to_json(output.report)}};
  output.report_file = out_dir / "report.json";
  write_text_file(output.report_file, report.dump(2) + "\n");
  return output;
}

fs::path run_export_scatter(const EvaluateSpec& spec, const fs::path& out_dir) {
  if (spec.model.empty())
    throw ConfigError("no model file given (set 'model' in the spec or pass --model)");
  fs::create_directories(out_dir);
  const auto trajectories = load_training_data(spec.data, spec.manifest, fs::current_path());
  const ReactionNetwork network = make_network(spec.system);
  const EquivalenceClasses classes = build_equivalence_classes(network);
  const auto truth = make_truth(spec.system);

  std::ifstream in(resolve(spec.model, fs::current_path()));
  if (!in) throw ConfigError("cannot open model file " + spec.model);
  const NeuralPropensityModel model = NeuralPropensityModel::load(in);

  const StateInventory inventory =
      evaluation_inventory(trajectories, network, spec.pool_covariates);

  const fs::path file = out_dir / "scatter.csv";
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot open " + file.string() + " for writing");
  export_scatter(out, *truth, model, inventory, classes);
  return file;
}

Trajectory reassign_events(const Trajectory& trajectory, const EquivalenceClasses& classes,
                           std::size_t from_reaction, std::size_t to_reaction, double fraction,
                           std::uint64_t seed) {
  if (fraction < 0 || fraction > 1) throw ConfigError("fraction must lie in [0, 1]");
  Trajectory out = trajectory;
  if (out.observations.empty()) return out;

  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i + 1 < out.observations.size(); ++i)
    if (out.observations[i].reaction && *out.observations[i].reaction == from_reaction)
      hits.push_back(i);

  const auto flips =
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(hits.size())));
  rng::Xoshiro256StarStar rng(seed);
  for (std::size_t j = 0; j < flips; ++j) {
    // Partial Fisher-Yates: hits[j] becomes a uniform pick from hits[j..].
    const std::size_t remaining = hits.size() - j;
    const auto offset = static_cast<std::size_t>(
        std::min(rng.uniform01() * static_cast<double>(remaining),
                 static_cast<double>(remaining - 1)));
    std::swap(hits[j], hits[j + offset]);
    out.observations[hits[j]].reaction = to_reaction;
  }

  State state = out.observations.front().state;
  for (std::size_t i = 0; i + 1 < out.observations.size(); ++i) {
    const std::size_t k = classes.class_of(*out.observations[i].reaction);
    const State& delta = classes.state_change(k);
    for (std::size_t s = 0; s < state.size(); ++s) {
      state[s] += delta[s];
      if (state[s] < 0)
        throw Error("event reassignment drives species " + std::to_string(s) +
                    " negative at transition " + std::to_string(i));
    }
    out.observations[i + 1].state = state;
  }
  return out;
}

ControlDemoOutput run_control_demo(const ControlDemoSpec& spec, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  SystemConfig system;
  system.kind = SystemKind::BirthDeath;
  system.birth_death = spec.birth_death;

  const ReactionNetwork network = make_network(system);
  const EquivalenceClasses classes = build_equivalence_classes(network);
  const BirthDeathTruth truth(spec.birth_death);

  SimulationConfig base_config;
  base_config.initial_state = {spec.birth_death.initial_population};
  base_config.t_max = spec.horizon_days;
  base_config.rng_seed = rng::derive_seed(spec.seed, 0);
  base_config.schedule = birth_death_schedule(spec.birth_death);

  const Trajectory baseline = simulate(network, classes, truth, base_config);

  std::size_t births = 0;
  for (std::size_t i = 0; i + 1 < baseline.observations.size(); ++i)
    if (baseline.observations[i].reaction && *baseline.observations[i].reaction == 0) ++births;

  const Trajectory adjusted = reassign_events(baseline, classes, 0, 1, spec.flip_fraction,
                                              rng::derive_seed(spec.seed, 1));

  const std::vector<Trajectory> data{adjusted};
  const SufficientStats stats = compress(data, classes);
  NeuralPropensityModel model = make_model(spec.model, system, stats, classes);
  const TrainingResult training = train_model(model, data, classes, spec.training);

  const FeasibilityGuard guarded(model, classes);
  std::vector<SimulationConfig> configs(spec.replicates, base_config);
  for (std::size_t i = 0; i < configs.size(); ++i)
    configs[i].rng_seed = rng::derive_seed(spec.seed, 100 + i);
  const auto replicates = simulate_batch(network, classes, guarded, configs, spec.workers);

  std::vector<double> endpoints;
  for (std::size_t i = 0; i < replicates.size(); ++i) {
    if (!replicates[i].ok)
      throw Error("replicate " + std::to_string(i) + " failed: " + replicates[i].error);
    endpoints.push_back(
        static_cast<double>(replicates[i].trajectory.observations.back().state.at(0)));
  }

  ControlDemoOutput output;
  output.flips =
      static_cast<std::size_t>(std::llround(spec.flip_fraction * static_cast<double>(births)));
  output.replicates = spec.replicates;
  output.baseline_endpoint = static_cast<double>(baseline.observations.back().state.at(0));
  output.adjusted_endpoint = static_cast<double>(adjusted.observations.back().state.at(0));
  double sum = 0.0;
  for (double e : endpoints) sum += e;
  output.replicate_mean_endpoint = sum / static_cast<double>(endpoints.size());
  output.relative_gap = std::abs(output.replicate_mean_endpoint - output.adjusted_endpoint) /
                        std::max(std::abs(output.adjusted_endpoint), 1.0);

  output.series_file = out_dir / "series.csv";
  {
    std::ofstream out(output.series_file, std::ios::binary);
    if (!out) throw Error("cannot open " + output.series_file.string() + " for writing");
    out << "series,t,population\n";
    out << std::setprecision(17);
    const auto emit = [&out](const char* name, const Trajectory& trajectory) {
      for (const auto& obs : trajectory.observations)
        out << name << ',' << obs.time << ',' << obs.state.at(0) << '\n';
    };
    emit("baseline", baseline);
    emit("adjusted", adjusted);
    emit("predicted", replicates.front().trajectory);
  }

  json summary;
  summary["format"] = "nctmc.control_demo.v1";
  summary["horizon_days"] = spec.horizon_days;
  summary["flip_fraction"] = spec.flip_fraction;
  summary["flips"] = output.flips;
  summary["baseline_endpoint"] = output.baseline_endpoint;
  summary["adjusted_endpoint"] = output.adjusted_endpoint;
  summary["replicate_endpoints"] = endpoints;
  summary["replicate_mean_endpoint"] = output.replicate_mean_endpoint;
  summary["relative_gap"] = output.relative_gap;
  summary["training"] = training_summary_json(training);
  output.summary_file = out_dir / "summary.json";
  write_text_file(output.summary_file, summary.dump(2) + "\n");
  return output;
}

}  // namespace nctmc
