// Command-line front end: every verb reads one JSON spec (or a named
// preset), runs deterministically from its seed, and writes artifacts into
// --out. Exit code 0 on success, 1 on any error.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nctmc/errors.hpp"
#include "nctmc/experiments/run.hpp"
#include "nctmc/experiments/spec.hpp"

namespace {

struct CommonArgs {
  std::string spec_file;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_seed = true) {
  cmd->add_option("--spec", args.spec_file, "JSON spec file for this verb")
      ->check(CLI::ExistingFile);
  cmd->add_option("--preset", args.preset, "named preset instead of a spec file");
  if (with_seed)
    cmd->add_option("--seed", args.seed, "override the spec's seed");
  cmd->add_option("--out", args.out_dir, "output directory (created if missing)");
}

// The parsers accept a JSON object with an optional "preset" key; a bare
// --preset becomes exactly that object.
std::stringstream spec_stream(const CommonArgs& args) {
  if (!args.spec_file.empty() && !args.preset.empty())
    throw nctmc::ConfigError("give either --spec or --preset, not both");
  std::stringstream buffer;
  if (!args.spec_file.empty()) {
    std::ifstream in(args.spec_file);
    if (!in) throw nctmc::ConfigError("cannot open spec file " + args.spec_file);
    buffer << in.rdbuf();
  } else if (!args.preset.empty()) {
    buffer << "{\"preset\": \"" << args.preset << "\"}";
  } else {
    throw nctmc::ConfigError("give --spec or --preset");
  }
  return buffer;
}

void print_report_line(const std::string& name, const nctmc::ErrorReport& report) {
  std::cout << "  " << name << ": W-MAE " << report.wmae << ", MAE " << report.mae << ", W-MSE "
            << report.wmse << ", coverage " << report.coverage() << "\n";
}

int cmd_simulate(const CommonArgs& args) {
  auto stream = spec_stream(args);
  auto spec = nctmc::parse_generate_spec(stream);
  if (args.seed) spec.seed = *args.seed;
  const auto output = nctmc::run_generate(spec, args.out_dir);
  std::cout << "wrote " << output.trajectories << " trajectories, " << output.transitions
            << " transitions (" << output.absorbed << " absorbed)\n"
            << "manifest: " << output.manifest_file.string() << "\n";
  return 0;
}

int cmd_train(const CommonArgs& args, const std::vector<std::string>& data,
              const std::string& manifest) {
  auto stream = spec_stream(args);
  auto spec = nctmc::parse_train_spec(stream);
  if (args.seed) spec.model.init_seed = *args.seed;
  if (!data.empty()) spec.data = data;
  if (!manifest.empty()) spec.manifest = manifest;
  const auto output = nctmc::run_train(spec, args.out_dir);
  std::cout << "trained " << output.parameter_count << " parameters: "
            << output.training.epochs << " epochs, final NLL " << output.training.final_nll
            << " (" << output.training.stop_reason << ")\n";
  print_report_line("model", output.model_report);
  if (output.counting_report) print_report_line("counting", *output.counting_report);
  std::cout << "model: " << output.model_file.string() << "\n"
            << "report: " << output.report_file.string() << "\n";
  return 0;
}

int cmd_mle(const CommonArgs& args, const std::vector<std::string>& data,
            const std::string& manifest) {
  auto stream = spec_stream(args);
  auto spec = nctmc::parse_mle_spec(stream);
  if (!data.empty()) spec.data = data;
  if (!manifest.empty()) spec.manifest = manifest;
  const auto output = nctmc::run_mle(spec, args.out_dir);
  std::cout << "fit " << output.cells << " cells\n";
  print_report_line("counting", output.report);
  std::cout << "rates: " << output.table_file.string() << "\n"
            << "report: " << output.report_file.string() << "\n";
  return 0;
}

int cmd_evaluate(const CommonArgs& args, const std::vector<std::string>& data,
                 const std::string& manifest, const std::string& model) {
  auto stream = spec_stream(args);
  auto spec = nctmc::parse_evaluate_spec(stream);
  if (!data.empty()) spec.data = data;
  if (!manifest.empty()) spec.manifest = manifest;
  if (!model.empty()) spec.model = model;
  const auto output = nctmc::run_evaluate(spec, args.out_dir);
  print_report_line("model", output.report);
  std::cout << "report: " << output.report_file.string() << "\n";
  return 0;
}

int cmd_export_scatter(const CommonArgs& args, const std::vector<std::string>& data,
                       const std::string& manifest, const std::string& model) {
  auto stream = spec_stream(args);
  auto spec = nctmc::parse_evaluate_spec(stream);
  if (!data.empty()) spec.data = data;
  if (!manifest.empty()) spec.manifest = manifest;
  if (!model.empty()) spec.model = model;
  const auto file = nctmc::run_export_scatter(spec, args.out_dir);
  std::cout << "scatter: " << file.string() << "\n";
  return 0;
}

int cmd_control_demo(const CommonArgs& args) {
  auto stream = spec_stream(args);
  auto spec = nctmc::parse_control_demo_spec(stream);
  if (args.seed) spec.seed = *args.seed;
  const auto output = nctmc::run_control_demo(spec, args.out_dir);
  std::cout << "flipped " << output.flips << " births to deaths\n"
            << "endpoints: baseline " << output.baseline_endpoint << ", adjusted "
            << output.adjusted_endpoint << ", fitted-model mean of " << output.replicates
            << " runs " << output.replicate_mean_endpoint << " (relative gap "
            << output.relative_gap << ")\n"
            << "series: " << output.series_file.string() << "\n"
            << "summary: " << output.summary_file.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Learns transition-rate functions of stochastic reaction networks from "
      "exactly observed event histories; also generates such histories and "
      "scores fitted models against the built-in closed-form systems."};
  app.require_subcommand(1);

  CommonArgs sim_args, train_args, mle_args, eval_args, scatter_args, control_args;
  std::vector<std::string> train_data, mle_data, eval_data, scatter_data;
  std::string train_manifest, mle_manifest, eval_manifest, scatter_manifest;
  std::string eval_model, scatter_model;

  auto* sim = app.add_subcommand("simulate", "generate trajectories with the exact sampler");
  add_common(sim, sim_args);

  auto* train = app.add_subcommand("train", "fit a model by exact-likelihood descent");
  add_common(train, train_args);
  train->add_option("--data", train_data, "trajectory files (adds to the spec's list)");
  train->add_option("--manifest", train_manifest, "dataset manifest to read files from");

  auto* mle = app.add_subcommand("mle", "fit the counting estimator");
  add_common(mle, mle_args, /*with_seed=*/false);
  mle->add_option("--data", mle_data, "trajectory files");
  mle->add_option("--manifest", mle_manifest, "dataset manifest");

  auto* eval = app.add_subcommand("evaluate", "score a saved model on a dataset");
  add_common(eval, eval_args, /*with_seed=*/false);
  eval->add_option("--data", eval_data, "trajectory files");
  eval->add_option("--manifest", eval_manifest, "dataset manifest");
  eval->add_option("--model", eval_model, "saved model file");

  auto* scatter =
      app.add_subcommand("export-scatter", "true-vs-predicted rates for a saved model");
  add_common(scatter, scatter_args, /*with_seed=*/false);
  scatter->add_option("--data", scatter_data, "trajectory files");
  scatter->add_option("--manifest", scatter_manifest, "dataset manifest");
  scatter->add_option("--model", scatter_model, "saved model file");

  auto* control =
      app.add_subcommand("control-demo", "what-if refit on an edited event history");
  add_common(control, control_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(sim_args);
    if (train->parsed()) return cmd_train(train_args, train_data, train_manifest);
    if (mle->parsed()) return cmd_mle(mle_args, mle_data, mle_manifest);
    if (eval->parsed()) return cmd_evaluate(eval_args, eval_data, eval_manifest, eval_model);
    if (scatter->parsed())
      return cmd_export_scatter(scatter_args, scatter_data, scatter_manifest, scatter_model);
    if (control->parsed()) return cmd_control_demo(control_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
