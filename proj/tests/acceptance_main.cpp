// End-to-end acceptance checks. Ten numbered criteria cover the likelihood
// identities, gradient correctness, the counting-estimator oracle, sampler
// statistics, the three study workflows, the intervention demo, and
// reproducibility. Each criterion prints exactly one [PASS]/[FAIL] line and
// the process exits with the number of failed criteria.
//
// Numerical criteria run in-process against the library; workflow criteria
// drive the command-line binary (its path is injected at build time) inside
// a scratch directory and reuse earlier runs' artifacts where possible.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "helpers.hpp"
#include "json.hpp"
#include "nctmc/core/network.hpp"
#include "nctmc/core/propensity.hpp"
#include "nctmc/core/trajectory.hpp"
#include "nctmc/errors.hpp"
#include "nctmc/estimators/counting.hpp"
#include "nctmc/experiments/systems.hpp"
#include "nctmc/likelihood/grouped.hpp"
#include "nctmc/likelihood/neural_model.hpp"
#include "nctmc/likelihood/nll.hpp"
#include "nctmc/nn/graph.hpp"
#include "nctmc/nn/network.hpp"
#include "nctmc/ssa/rng.hpp"
#include "nctmc/ssa/simulate.hpp"
#include "stats.hpp"

#ifndef NCTMC_CLI_PATH
#error "NCTMC_CLI_PATH must name the command-line binary"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const fs::path kWork = fs::temp_directory_path() / "nctmc-acceptance";

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

void run_cli(const std::string& args) {
  const std::string cmd = std::string(NCTMC_CLI_PATH) + " " + args + " >> " +
                          (kWork / "cli.log").string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  if (rc != 0)
    throw nctmc::Error("command failed with status " + std::to_string(rc) + ": " + cmd);
}

fs::path write_spec(const std::string& name, const std::string& body) {
  const fs::path p = kWork / name;
  std::ofstream out(p, std::ios::binary);
  out << body << "\n";
  if (!out) throw nctmc::Error("cannot write " + p.string());
  return p;
}

json load_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw nctmc::Error("missing file " + p.string());
  json j;
  in >> j;
  return j;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw nctmc::Error("missing file " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool same_file(const fs::path& a, const fs::path& b) { return slurp(a) == slurp(b); }

// Loss histories carry a wall-clock column that legitimately differs between
// runs; compare every line with its final column removed.
bool same_loss_history(const fs::path& a, const fs::path& b) {
  std::istringstream sa(slurp(a)), sb(slurp(b));
  std::string la, lb;
  while (true) {
    const bool ga = static_cast<bool>(std::getline(sa, la));
    const bool gb = static_cast<bool>(std::getline(sb, lb));
    if (ga != gb) return false;
    if (!ga) return true;
    if (la.substr(0, la.rfind(',')) != lb.substr(0, lb.rfind(','))) return false;
  }
}

// Generates a dataset once per name; later calls reuse the manifest.
fs::path dataset(const std::string& name, const std::string& spec) {
  const fs::path dir = kWork / ("data-" + name);
  if (!fs::exists(dir / "manifest.json")) {
    const fs::path spec_file = write_spec("gen-" + name + ".json", spec);
    run_cli("simulate --spec " + quoted(spec_file) + " --out " + quoted(dir));
  }
  return dir / "manifest.json";
}

// Trains once per name and returns the written report.
json train_report(const std::string& name, const std::string& spec, const fs::path& manifest) {
  const fs::path dir = kWork / ("train-" + name);
  if (!fs::exists(dir / "report.json")) {
    const fs::path spec_file = write_spec("train-" + name + ".json", spec);
    run_cli("train --spec " + quoted(spec_file) + " --manifest " + quoted(manifest) +
            " --out " + quoted(dir));
  }
  return load_json(dir / "report.json");
}

json control_summary(const std::string& name, const std::string& spec) {
  const fs::path dir = kWork / ("control-" + name);
  if (!fs::exists(dir / "summary.json")) {
    const fs::path spec_file = write_spec("control-" + name + ".json", spec);
    run_cli("control-demo --spec " + quoted(spec_file) + " --out " + quoted(dir));
  }
  return load_json(dir / "summary.json");
}

std::size_t pick(nctmc::rng::Xoshiro256StarStar& rng, std::size_t n) {
  const auto v = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(n));
  return std::min(v, n - 1);
}

// --- criterion 1 -----------------------------------------------------------
// Grouped (class-blocked) and sequential (record-by-record) likelihood
// evaluations must agree to 1e-10 relative on 100 sample paths of random
// small reaction systems under random positive rate functions.

nctmc::FunctionModel mass_action_model(std::vector<std::vector<std::int64_t>> phi,
                                       std::vector<double> k) {
  const std::size_t outputs = k.size();
  return nctmc::FunctionModel(
      nctmc::PropensityModel::Level::Reaction, outputs,
      [phi = std::move(phi), k = std::move(k)](const nctmc::State& s, const nctmc::Covariates&,
                                               std::span<double> out) {
        for (std::size_t j = 0; j < k.size(); ++j) {
          double rate = k[j];
          for (std::size_t i = 0; i < phi[j].size(); ++i)
            for (std::int64_t u = 0; u < phi[j][i]; ++u)
              rate *= std::max(0.0, static_cast<double>(s[i] - u));
          out[j] = rate;
        }
      });
}

Outcome criterion1() {
  nctmc::rng::Xoshiro256StarStar master(7001);
  double worst = 0.0;
  std::size_t total_paths = 0;

  for (int net_index = 0; net_index < 10; ++net_index) {
    const std::size_t species = 1 + pick(master, 3);
    const std::size_t reactions = 2 + pick(master, 4);

    std::vector<std::string> names;
    for (std::size_t i = 0; i < species; ++i) names.push_back("s" + std::to_string(i));
    std::vector<nctmc::ReactionNetwork::Reaction> defs;
    std::vector<std::vector<std::int64_t>> phis;
    for (std::size_t j = 0; j < reactions; ++j) {
      std::vector<std::int64_t> phi(species, 0), psi(species, 0);
      // Reaction 0 stays a pure production so the total rate never vanishes.
      if (j > 0)
        for (auto& v : phi) v = static_cast<std::int64_t>(pick(master, 3));
      do {
        for (auto& v : psi) v = static_cast<std::int64_t>(pick(master, 3));
      } while (psi == phi);
      defs.push_back({"r" + std::to_string(j), phi, psi});
      phis.push_back(std::move(phi));
    }
    const nctmc::ReactionNetwork network(names, defs);
    const auto classes = nctmc::build_equivalence_classes(network);

    std::vector<double> k_truth(reactions), k_eval(reactions);
    for (std::size_t j = 0; j < reactions; ++j) {
      k_truth[j] = 0.2 + 1.3 * master.uniform01();
      k_eval[j] = k_truth[j] * (0.5 + master.uniform01());
    }
    const auto truth = mass_action_model(phis, k_truth);
    const auto candidate = mass_action_model(phis, k_eval);

    std::vector<nctmc::Trajectory> paths;
    for (int p = 0; p < 10; ++p) {
      nctmc::SimulationConfig config;
      config.initial_state.assign(species, 0);
      for (auto& v : config.initial_state) v = 3 + static_cast<std::int64_t>(pick(master, 5));
      config.max_transitions = 200;
      config.rng_seed = nctmc::rng::derive_seed(9000 + static_cast<std::uint64_t>(net_index),
                                                static_cast<std::uint64_t>(p));
      paths.push_back(nctmc::simulate(network, classes, truth, config));
    }
    total_paths += paths.size();

    double sequential = 0.0;
    for (const auto& path : paths) sequential += nctmc::nll_sequential(candidate, path, classes);
    const double grouped = nctmc::nll(candidate, paths, classes);
    const double rel = std::abs(grouped - sequential) / std::max(std::abs(sequential), 1e-9);
    worst = std::max(worst, rel);
  }

  std::ostringstream d;
  d << total_paths << " paths over 10 random systems, worst relative gap " << worst
    << ", tolerance 1e-10";
  return {worst < 1e-10 && total_paths == 100, d.str()};
}

// --- criterion 2 -----------------------------------------------------------
// Backward-pass gradients must match central finite differences to 1e-5
// relative on every operation type and on complete training losses.

Outcome criterion2() {
  using nctmc::nn::Graph;
  using nctmc::nn::Tensor;
  nctmc::rng::Xoshiro256StarStar rng(5150);
  auto rand_tensor = [&rng](std::size_t rows, std::size_t cols, double scale) {
    Tensor t(rows, cols);
    for (auto& v : t.data) v = scale * (2.0 * rng.uniform01() - 1.0);
    return t;
  };

  double worst = 0.0;

  {  // dense stack: matmul, row bias, selu, softplus, exp, log, weighted sum
    Graph g;
    const auto x = g.input(4, 3);
    const auto w1 = g.parameter(rand_tensor(3, 5, 0.8));
    const auto b1 = g.parameter(rand_tensor(1, 5, 0.3));
    const auto h = g.selu(g.add_bias(g.matmul(x, w1), b1));
    const auto w2 = g.parameter(rand_tensor(5, 2, 0.8));
    const auto b2 = g.parameter(rand_tensor(1, 2, 0.3));
    const auto y = g.softplus(g.add_bias(g.matmul(h, w2), b2));
    const auto z = g.logarithm(g.exponential(y));
    const auto loss = g.weighted_sum(z, g.constant(rand_tensor(4, 2, 1.0)));
    g.set_input(x, rand_tensor(4, 3, 1.5));
    worst = std::max(worst, testutil::check_graph_gradients(g, loss, {w1, b1, w2, b2}));
  }

  {  // convolution stack: affine columns, conv1d, channel bias, add, subtract
    Graph g;
    const auto x = g.input(2, 24);  // 3 channels x length 8 per row
    std::vector<double> scale(24), shift(24);
    for (auto& v : scale) v = 0.5 + rng.uniform01();
    for (auto& v : shift) v = rng.uniform01() - 0.5;
    const auto xa = g.affine_columns(x, scale, shift);
    const auto kernels = g.parameter(rand_tensor(2, 12, 0.6));  // 2 out x (3 in x width 4)
    const auto conv = g.conv1d(xa, kernels, 3, 8, 4);           // -> 2 x (2 channels x 5)
    const auto channel_bias = g.parameter(rand_tensor(1, 2, 0.3));
    const auto act = g.selu(g.add_channel_bias(conv, channel_bias, 2, 5));
    const auto w = g.parameter(rand_tensor(10, 1, 0.7));
    const auto m = g.matmul(act, w);
    const auto moved = g.add(g.subtract(m, g.constant(rand_tensor(2, 1, 0.4))),
                             g.constant(rand_tensor(2, 1, 0.4)));
    const auto loss = g.weighted_sum(moved, g.constant(rand_tensor(2, 1, 1.0)));
    g.set_input(x, rand_tensor(2, 24, 1.0));
    worst = std::max(worst, testutil::check_graph_gradients(g, loss, {kernels, channel_bias, w}));
  }

  // Complete losses: the exact likelihood over deduplicated rows, once with a
  // dense body and once with the convolutional body.
  const auto network = testutil::toy_network();
  const auto classes = nctmc::build_equivalence_classes(network);
  const auto data = testutil::toy_trajectories(6, 303);
  const auto stats = nctmc::compress(data, classes);
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < classes.class_count(); ++k) labels.push_back(classes.label(k));

  const auto full_loss_check = [&](std::vector<nctmc::nn::Layer> body, std::uint64_t seed) {
    nctmc::nn::NetworkSpec arch;
    arch.input_width = 2;
    arch.layers = std::move(body);
    arch.layers.push_back(
        nctmc::nn::DenseLayer{classes.class_count(), nctmc::nn::Activation::Softplus});
    arch.validate();
    auto params = nctmc::nn::initialize_parameters(arch, seed);
    auto transform = nctmc::derive_input_transform(stats, {0, 1});
    auto scales = nctmc::derive_output_scale(stats);
    nctmc::NeuralPropensityModel model(arch, std::move(params), std::move(transform),
                                       std::move(scales), stats.state_width,
                                       stats.covariate_width, labels);
    auto lg = nctmc::build_loss_graph(model, stats);
    return testutil::check_graph_gradients(lg.graph, lg.loss, lg.parameter_nodes);
  };

  using nctmc::nn::Activation;
  worst = std::max(worst, full_loss_check({nctmc::nn::DenseLayer{8, Activation::Selu},
                                           nctmc::nn::DenseLayer{8, Activation::Selu}},
                                          5));
  worst = std::max(worst, full_loss_check({nctmc::nn::DenseLayer{12, Activation::Selu},
                                           nctmc::nn::ReshapeLayer{3, 4},
                                           nctmc::nn::Conv1dLayer{2, 2, Activation::Selu},
                                           nctmc::nn::FlattenLayer{},
                                           nctmc::nn::DenseLayer{6, Activation::Selu}},
                                          6));

  std::ostringstream d;
  d << "worst relative gradient error " << worst << ", tolerance 1e-5";
  return {worst < 1e-5, d.str()};
}

// --- criterion 3 -----------------------------------------------------------
// The counting estimator must reproduce a hand-countable fixture exactly
// (5 time units in a state with 2 exits -> rate 0.4) and its total exit rate
// must invert to the sample mean sojourn.

Outcome criterion3() {
  const nctmc::ReactionNetwork net({"A"}, {{"up", {0}, {1}}, {"down", {1}, {0}}});
  const auto classes = nctmc::build_equivalence_classes(net);

  nctmc::Trajectory fixture;
  fixture.observations = {
      {0.0, {3}, {}, 0},            // waits 2 in {3}, exits through "up"
      {2.0, {4}, {}, 1},            // waits 1 in {4}, exits through "down"
      {3.0, {3}, {}, 0},            // waits 3 in {3}, exits through "up"
      {6.0, {4}, {}, std::nullopt}  // terminal record
  };
  const std::vector<nctmc::Trajectory> fixed{fixture};
  const auto mle = nctmc::fit_counting_mle(fixed, classes, nctmc::CountingConfig{});

  const auto at3 = mle.rates({3}, {});
  const auto at4 = mle.rates({4}, {});
  const bool fixture_ok = at3[0] == 0.4 && at3[0] == 2.0 / 5.0 && at3[1] == 0.0 &&
                          at4[0] == 0.0 && at4[1] == 1.0;
  std::vector<double> probe(classes.class_count());
  const bool unvisited_undefined = !mle.try_rates({7}, {}, probe);

  // Inversion identity on simulated data: at any visited state, the summed
  // estimated exit rate is the reciprocal of the mean observed sojourn.
  const auto toy_net = testutil::toy_network();
  const auto toy_classes = nctmc::build_equivalence_classes(toy_net);
  const auto paths = testutil::toy_trajectories(50, 909);
  const auto toy_mle = nctmc::fit_counting_mle(paths, toy_classes, nctmc::CountingConfig{});

  const nctmc::State probe_state{20, 15};
  double wait = 0.0;
  std::size_t exits = 0;
  for (const auto& path : paths)
    for (std::size_t i = 0; i + 1 < path.observations.size(); ++i)
      if (path.observations[i].state == probe_state) {
        wait += path.observations[i + 1].time - path.observations[i].time;
        ++exits;
      }
  const double mean_sojourn = wait / static_cast<double>(exits);
  const auto rates = toy_mle.rates(probe_state, {});
  double total = 0.0;
  for (double r : rates) total += r;
  const double inversion_gap = std::abs(1.0 / total - mean_sojourn);
  const bool inversion_ok = inversion_gap <= 1e-12 * mean_sojourn;

  std::ostringstream d;
  d << "fixture rate " << at3[0] << ", inverse-rate vs mean sojourn gap " << inversion_gap
    << " over " << exits << " holding intervals";
  return {fixture_ok && unvisited_undefined && inversion_ok, d.str()};
}

// --- criterion 4 -----------------------------------------------------------
// At a fixed state and covariate, sampled sojourns must pass a KS test
// against the exponential law and sampled classes a chi-squared test against
// the rate proportions: significance 0.01, 5000 samples per repetition,
// at least 19 of 20 repetitions passing each test.

Outcome criterion4() {
  const nctmc::TemperatureCrnTruth truth;
  const nctmc::State state{3, 2};
  const nctmc::Covariates covariates{273.0};
  const auto rates = truth.rates(state, covariates);
  double total = 0.0;
  for (double r : rates) total += r;
  std::vector<double> proportions;
  for (double r : rates) proportions.push_back(r / total);

  constexpr std::size_t kSamples = 5000;
  constexpr int kReps = 20;
  int ks_passes = 0, chi_passes = 0;
  for (int rep = 0; rep < kReps; ++rep) {
    nctmc::rng::Xoshiro256StarStar rng(
        nctmc::rng::derive_seed(20240817, static_cast<std::uint64_t>(rep)));
    std::vector<double> sojourns;
    sojourns.reserve(kSamples);
    std::vector<std::size_t> counts(rates.size(), 0);
    for (std::size_t i = 0; i < kSamples; ++i) {
      const auto [tau, index] = nctmc::next_event(state, covariates, truth, rng);
      sojourns.push_back(tau);
      ++counts[index];
    }
    if (testutil::ks_statistic_exponential(sojourns, total) <
        testutil::ks_critical_value(0.01, kSamples))
      ++ks_passes;
    if (testutil::chi_squared_statistic(counts, proportions) <
        testutil::chi_squared_critical_value(0.01, rates.size() - 1))
      ++chi_passes;
  }

  std::ostringstream d;
  d << "KS " << ks_passes << "/20, chi-squared " << chi_passes
    << "/20 at significance 0.01 with " << kSamples << " samples each";
  return {ks_passes >= 19 && chi_passes >= 19, d.str()};
}

// --- criterion 5 -----------------------------------------------------------
// Seasonal one-species study: the learned model's per-season error must be
// within a factor of two of the counting baseline at 5k and 50k transitions,
// and the baseline's error must at least halve with the tenfold data.

Outcome criterion5() {
  const auto manifest_5k = dataset("bd-5k", R"({"preset": "bd-5k"})");
  const auto report_5k = train_report("bd-5k", R"({"preset": "bd-5k"})", manifest_5k);
  const auto manifest_50k = dataset("bd-50k", R"({"preset": "bd-50k"})");
  const auto report_50k = train_report("bd-50k", R"({"preset": "bd-50k"})", manifest_50k);

  const double n5 = report_5k.at("metrics").at("model").at("mae").get<double>();
  const double c5 = report_5k.at("metrics").at("counting").at("mae").get<double>();
  const double n50 = report_50k.at("metrics").at("model").at("mae").get<double>();
  const double c50 = report_50k.at("metrics").at("counting").at("mae").get<double>();

  const auto within_factor_2 = [](double a, double b) { return a <= 2.0 * b && b <= 2.0 * a; };
  const bool comparable = within_factor_2(n5, c5) && within_factor_2(n50, c50);
  const bool shrinks = c50 < 0.5 * c5;

  std::ostringstream d;
  d << "MAE learned/counting: 5k " << n5 << "/" << c5 << ", 50k " << n50 << "/" << c50;
  return {comparable && shrinks, d.str()};
}

// --- criterion 6 -----------------------------------------------------------
// Community study: the learned model's visit-weighted error must drop by at
// least 20% from 100 to 1000 paths, and the written five-by-128 architecture
// with nine outputs must count exactly 67,721 parameters.

Outcome criterion6() {
  const auto manifest_100 = dataset("pp-100", R"({"preset": "pp-100"})");
  const auto report_100 = train_report("pp-100", R"({"preset": "pp-100"})", manifest_100);
  const auto manifest_1000 = dataset("pp-1000", R"({"preset": "pp-1000"})");
  const auto report_1000 = train_report("pp-1000", R"({"preset": "pp-1000"})", manifest_1000);

  const double w100 = report_100.at("metrics").at("model").at("wmae").get<double>();
  const double w1000 = report_1000.at("metrics").at("model").at("wmae").get<double>();
  const bool improves = w1000 < w100 && (w100 - w1000) >= 0.20 * w100;

  nctmc::nn::NetworkSpec mlp;
  mlp.input_width = 3;
  for (int i = 0; i < 5; ++i)
    mlp.layers.push_back(nctmc::nn::DenseLayer{128, nctmc::nn::Activation::Selu});
  mlp.layers.push_back(nctmc::nn::DenseLayer{9, nctmc::nn::Activation::Softplus});
  const std::size_t audited = mlp.parameter_count();

  // The trained head merges the two indistinguishable reactions into one
  // class, so the fitted model carries one 129-parameter output unit less.
  const auto trained = report_1000.at("model").at("parameters").get<std::size_t>();
  const bool audit_ok = audited == 67721 && trained == 67592;

  std::ostringstream d;
  d << "weighted MAE " << w100 << " -> " << w1000 << " ("
    << 100.0 * (w100 - w1000) / w100 << "% drop); archived architecture " << audited
    << " parameters, fitted " << trained;
  return {improves && audit_ok, d.str()};
}

// --- criterion 7 -----------------------------------------------------------
// The deep model must beat the one-layer (generalized-linear) baseline by at
// least 2x visit-weighted error on the community and temperature studies.

Outcome criterion7() {
  const auto manifest_pp = dataset("pp-1000", R"({"preset": "pp-1000"})");
  const auto neural_pp = train_report("pp-1000", R"({"preset": "pp-1000"})", manifest_pp);
  const auto glm_pp = train_report("pp-1000-glm", R"({"preset": "pp-1000-glm"})", manifest_pp);

  const auto manifest_crn = dataset("crn-100", R"({"preset": "crn-100"})");
  const auto neural_crn = train_report("crn-100", R"({"preset": "crn-100"})", manifest_crn);
  const auto glm_crn = train_report("crn-100-glm", R"({"preset": "crn-100-glm"})", manifest_crn);

  const double npp = neural_pp.at("metrics").at("model").at("wmae").get<double>();
  const double gpp = glm_pp.at("metrics").at("model").at("wmae").get<double>();
  const double ncrn = neural_crn.at("metrics").at("model").at("wmae").get<double>();
  const double gcrn = glm_crn.at("metrics").at("model").at("wmae").get<double>();

  std::ostringstream d;
  d << "weighted MAE deep/one-layer: community " << npp << "/" << gpp << " ("
    << gpp / npp << "x), temperature " << ncrn << "/" << gcrn << " (" << gcrn / ncrn << "x)";
  return {gpp >= 2.0 * npp && gcrn >= 2.0 * ncrn, d.str()};
}

// --- criterion 8 -----------------------------------------------------------
// Temperature-law oracle: all four rate constants strictly increase over
// 271..275 K and spot values match independently computed references to six
// significant digits.

Outcome criterion8() {
  const nctmc::TemperatureCrnConfig config;
  bool increasing = true;
  for (std::size_t j = 0; j < config.prefactor.size(); ++j)
    for (double t = 271.0; t < 275.0; t += 1.0)
      increasing = increasing &&
                   nctmc::arrhenius_rate(config.prefactor[j], config.activation_energy[j], t) <
                       nctmc::arrhenius_rate(config.prefactor[j], config.activation_energy[j],
                                             t + 1.0);

  // References evaluated independently from A * exp(-E / (8.314 * T)).
  struct Spot {
    std::size_t j;
    double temperature;
    double reference;
  };
  const std::array<Spot, 4> spots{{{0, 273.0, 0.021725991779576487},
                                   {1, 275.0, 0.11175179808193408},
                                   {2, 271.0, 0.10485613656430677},
                                   {3, 274.0, 0.05302463847321566}}};
  double worst_rel = 0.0;
  for (const auto& s : spots) {
    const double k =
        nctmc::arrhenius_rate(config.prefactor[s.j], config.activation_energy[s.j],
                              s.temperature);
    worst_rel = std::max(worst_rel, std::abs(k - s.reference) / s.reference);
  }

  std::ostringstream d;
  d << "four constants increasing over 271..275 K; worst spot-value relative error "
    << worst_rel << " (tolerance 5e-7)";
  return {increasing && worst_rel < 5e-7, d.str()};
}

// --- criterion 9 -----------------------------------------------------------
// Intervention demo: after rewriting 1.5% of births into deaths and
// refitting, simulated endpoints must land within 25% of the edited
// history's endpoint; with nothing rewritten, within the same tolerance of
// the original history.

Outcome criterion9() {
  const auto flipped = control_summary("flip", R"({"preset": "bd-control"})");
  const auto baseline = control_summary("zero", R"({"preset": "bd-control", "flip_fraction": 0.0})");

  const auto flips = flipped.at("flips").get<std::size_t>();
  const double flip_gap = flipped.at("relative_gap").get<double>();

  const bool zero_flips = baseline.at("flips").get<std::size_t>() == 0;
  const bool endpoints_match = baseline.at("adjusted_endpoint").get<double>() ==
                               baseline.at("baseline_endpoint").get<double>();
  const double zero_gap = baseline.at("relative_gap").get<double>();

  std::ostringstream d;
  d << flips << " events rewritten, endpoint gap " << 100.0 * flip_gap
    << "%; untouched run gap " << 100.0 * zero_gap << "% (tolerance 25%)";
  return {flips > 0 && flip_gap <= 0.25 && zero_flips && endpoints_match && zero_gap <= 0.25,
          d.str()};
}

// --- criterion 10 ----------------------------------------------------------
// Re-running every verb with an identical spec and seed must reproduce every
// data artifact byte for byte and every metric file exactly (loss histories
// compared without their wall-clock column).

Outcome criterion10() {
  std::vector<std::string> issues;
  const auto require = [&issues](bool ok, const std::string& what) {
    if (!ok) issues.push_back(what);
  };

  const auto sim_spec =
      write_spec("det-sim.json", R"({"preset": "bd-5k", "max_transitions": 600, "seed": 7})");
  const fs::path sim_a = kWork / "det-sim-a", sim_b = kWork / "det-sim-b";
  run_cli("simulate --spec " + quoted(sim_spec) + " --out " + quoted(sim_a));
  run_cli("simulate --spec " + quoted(sim_spec) + " --out " + quoted(sim_b));
  require(same_file(sim_a / "manifest.json", sim_b / "manifest.json"),
          "simulate: manifest differs");
  require(same_file(sim_a / "trajectory_00000.jsonl", sim_b / "trajectory_00000.jsonl"),
          "simulate: trajectory differs");
  const fs::path det_manifest = sim_a / "manifest.json";

  const auto train_spec = write_spec(
      "det-train.json",
      R"({"preset": "bd-5k", "model": {"hidden": [8, 8]}, "training": {"max_epochs": 40}})");
  const fs::path train_a = kWork / "det-train-a", train_b = kWork / "det-train-b";
  run_cli("train --spec " + quoted(train_spec) + " --manifest " + quoted(det_manifest) +
          " --out " + quoted(train_a));
  run_cli("train --spec " + quoted(train_spec) + " --manifest " + quoted(det_manifest) +
          " --out " + quoted(train_b));
  require(same_file(train_a / "model.json", train_b / "model.json"), "train: model differs");
  require(same_file(train_a / "report.json", train_b / "report.json"),
          "train: report differs");
  require(same_file(train_a / "counting_rates.csv", train_b / "counting_rates.csv"),
          "train: baseline rates differ");
  require(same_loss_history(train_a / "loss_history.csv", train_b / "loss_history.csv"),
          "train: loss history differs");

  const auto mle_spec = write_spec("det-mle.json", R"({"preset": "bd-5k"})");
  const fs::path mle_a = kWork / "det-mle-a", mle_b = kWork / "det-mle-b";
  run_cli("mle --spec " + quoted(mle_spec) + " --manifest " + quoted(det_manifest) + " --out " +
          quoted(mle_a));
  run_cli("mle --spec " + quoted(mle_spec) + " --manifest " + quoted(det_manifest) + " --out " +
          quoted(mle_b));
  require(same_file(mle_a / "report.json", mle_b / "report.json"), "mle: report differs");
  require(same_file(mle_a / "counting_rates.csv", mle_b / "counting_rates.csv"),
          "mle: rate table differs");

  const auto eval_spec = write_spec("det-eval.json", R"({"preset": "bd-5k"})");
  const fs::path model_file = train_a / "model.json";
  const fs::path eval_a = kWork / "det-eval-a", eval_b = kWork / "det-eval-b";
  run_cli("evaluate --spec " + quoted(eval_spec) + " --manifest " + quoted(det_manifest) +
          " --model " + quoted(model_file) + " --out " + quoted(eval_a));
  run_cli("evaluate --spec " + quoted(eval_spec) + " --manifest " + quoted(det_manifest) +
          " --model " + quoted(model_file) + " --out " + quoted(eval_b));
  require(same_file(eval_a / "report.json", eval_b / "report.json"),
          "evaluate: report differs");

  const fs::path scatter_a = kWork / "det-scatter-a", scatter_b = kWork / "det-scatter-b";
  run_cli("export-scatter --spec " + quoted(eval_spec) + " --manifest " + quoted(det_manifest) +
          " --model " + quoted(model_file) + " --out " + quoted(scatter_a));
  run_cli("export-scatter --spec " + quoted(eval_spec) + " --manifest " + quoted(det_manifest) +
          " --model " + quoted(model_file) + " --out " + quoted(scatter_b));
  require(same_file(scatter_a / "scatter.csv", scatter_b / "scatter.csv"),
          "export-scatter: table differs");

  const auto control_spec = write_spec("det-control.json",
                                       R"({"preset": "bd-control", "horizon_days": 40.0,
    "flip_fraction": 0.05, "replicates": 4, "model": {"hidden": [16]},
    "training": {"max_epochs": 60}, "seed": 11})");
  const fs::path ctrl_a = kWork / "det-control-a", ctrl_b = kWork / "det-control-b";
  run_cli("control-demo --spec " + quoted(control_spec) + " --out " + quoted(ctrl_a));
  run_cli("control-demo --spec " + quoted(control_spec) + " --out " + quoted(ctrl_b));
  require(same_file(ctrl_a / "summary.json", ctrl_b / "summary.json"),
          "control-demo: summary differs");
  require(same_file(ctrl_a / "series.csv", ctrl_b / "series.csv"),
          "control-demo: series differs");

  if (issues.empty())
    return {true, "all six verbs byte-identical across repeated runs"};
  std::ostringstream d;
  for (std::size_t i = 0; i < issues.size(); ++i) d << (i ? "; " : "") << issues[i];
  return {false, d.str()};
}

}  // namespace

int main() {
  std::error_code ec;
  fs::remove_all(kWork, ec);
  fs::create_directories(kWork);
  std::cout << "workspace: " << kWork.string() << "\n" << std::flush;

  struct Entry {
    int id;
    const char* what;
    Outcome (*fn)();
  };
  const std::vector<Entry> entries{
      {1, "grouped and sequential likelihood evaluations agree on random systems", criterion1},
      {2, "analytic gradients match central finite differences", criterion2},
      {3, "counting estimator matches hand counts and inverts mean sojourns", criterion3},
      {4, "sampler passes sojourn KS and class-frequency chi-squared checks", criterion4},
      {5, "seasonal study: learned rates track the counting baseline and sharpen with data",
       criterion5},
      {6, "community study: weighted error drops >= 20% with 10x paths; parameter audit",
       criterion6},
      {7, "deep model beats the one-layer baseline by >= 2x on both studies", criterion7},
      {8, "temperature-law rates increase and match frozen references", criterion8},
      {9, "intervention demo tracks the edited history's endpoint", criterion9},
      {10, "repeated runs with identical specs and seeds are byte-identical", criterion10},
  };

  int failures = 0;
  for (const auto& entry : entries) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = entry.fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream line;
    line << (outcome.pass ? "[PASS]" : "[FAIL]") << " criterion " << entry.id << ": "
         << entry.what << " — " << outcome.detail << " [" << std::fixed << std::setprecision(1)
         << seconds << "s]";
    std::cout << line.str() << "\n" << std::flush;
    if (!outcome.pass) ++failures;
  }

  if (failures > 0)
    std::cout << failures << " criterion(s) failed; artifacts kept in " << kWork.string()
              << "\n";
  return failures;
}
