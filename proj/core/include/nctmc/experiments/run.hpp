#pragma once

#include <filesystem>
#include <optional>

#include "nctmc/experiments/spec.hpp"
#include "nctmc/likelihood/neural_model.hpp"
#include "nctmc/metrics/metrics.hpp"

namespace nctmc {

// Runners behind the command-line verbs. Every artifact they write is a
// deterministic function of the spec (plus its seed): re-running a spec
// reproduces each output byte for byte.

struct GenerateOutput {
  std::vector<std::filesystem::path> trajectory_files;
  std::filesystem::path manifest_file;
  std::size_t trajectories = 0;
  std::size_t absorbed = 0;
  std::uint64_t transitions = 0;
};

// Writes trajectory_NNNNN.jsonl files plus manifest.json into out_dir.
GenerateOutput run_generate(const GenerateSpec& spec, const std::filesystem::path& out_dir);

struct TrainOutput {
  TrainingResult training;
  ErrorReport model_report;
  std::optional<ErrorReport> counting_report;
  std::size_t parameter_count = 0;
  std::filesystem::path model_file;
  std::filesystem::path report_file;
  std::filesystem::path loss_file;
  std::optional<std::filesystem::path> counting_file;
};

// Fits the spec's model by exact-likelihood descent and reports its rate
// recovery against the closed-form system; optionally fits the counting
// estimator on the same data for comparison. Writes model.json,
// loss_history.csv, report.json (and counting_rates.csv).
TrainOutput run_train(const TrainSpec& spec, const std::filesystem::path& out_dir);

struct MleOutput {
  ErrorReport report;
  std::size_t cells = 0;
  std::filesystem::path table_file;
  std::filesystem::path report_file;
};

// Counting estimator alone. Writes counting_rates.csv and report.json.
MleOutput run_mle(const MleSpec& spec, const std::filesystem::path& out_dir);

struct EvaluateOutput {
  ErrorReport report;
  std::filesystem::path report_file;
};

// Scores a saved model against the closed-form rates over the states the
// data visit. Writes report.json.
EvaluateOutput run_evaluate(const EvaluateSpec& spec, const std::filesystem::path& out_dir);

// Writes scatter.csv (class,true_rate,pred_rate,weight) for a saved model.
std::filesystem::path run_export_scatter(const EvaluateSpec& spec,
                                         const std::filesystem::path& out_dir);

struct ControlDemoOutput {
  double baseline_endpoint = 0.0;
  double adjusted_endpoint = 0.0;
  double replicate_mean_endpoint = 0.0;
  double relative_gap = 0.0;  // |replicate mean - adjusted| / max(adjusted, 1)
  std::size_t flips = 0;
  std::size_t replicates = 0;
  std::filesystem::path series_file;
  std::filesystem::path summary_file;
};

// What-if workflow on the seasonal system: simulate a small population,
// rewrite a fraction of its birth events as deaths, refit the model on the
// altered series, and simulate the refit forward. Writes series.csv
// (series,t,population) and summary.json.
ControlDemoOutput run_control_demo(const ControlDemoSpec& spec,
                                   const std::filesystem::path& out_dir);

// --- shared pieces, exposed for reuse and tests ------------------------------

// Loads trajectory files; relative paths resolve against `base`.
std::vector<Trajectory> load_trajectories(const std::vector<std::string>& files,
                                          const std::filesystem::path& base);

// Files named directly plus those listed by a dataset manifest, whose
// entries resolve against the manifest's own directory.
std::vector<Trajectory> load_training_data(const std::vector<std::string>& data,
                                           const std::string& manifest,
                                           const std::filesystem::path& base);

// Untrained model per the spec: resolved input columns, standardization and
// output scales derived from the observed statistics.
NeuralPropensityModel make_model(const ModelSpec& model, const SystemConfig& system,
                                 const SufficientStats& stats,
                                 const EquivalenceClasses& classes);

// Rewrites a uniformly chosen fraction (without replacement) of the
// transitions that fired `from_reaction` so they fire `to_reaction`
// instead, keeping all event times, then replays the state changes from
// the initial state. Throws if the replay drives a count negative.
Trajectory reassign_events(const Trajectory& trajectory, const EquivalenceClasses& classes,
                           std::size_t from_reaction, std::size_t to_reaction, double fraction,
                           std::uint64_t seed);

}  // namespace nctmc
