// Microbenchmarks for the hot paths: exact simulation, likelihood
// evaluation, loss-graph passes, and the optimizer update. Run the
// `nctmc_bench` binary directly; counters report throughput in events,
// transitions, rows, or parameters per second.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <utility>
#include <vector>

#include "nctmc/estimators/counting.hpp"
#include "nctmc/experiments/systems.hpp"
#include "nctmc/likelihood/grouped.hpp"
#include "nctmc/likelihood/neural_model.hpp"
#include "nctmc/likelihood/nll.hpp"
#include "nctmc/nn/network.hpp"
#include "nctmc/nn/optimizer.hpp"
#include "nctmc/ssa/rng.hpp"
#include "nctmc/ssa/simulate.hpp"

namespace {

using namespace nctmc;

constexpr std::uint64_t kTransitionsPerPath = 1000;

// Predator-prey data plus a mid-sized network over it: the fixture behind
// the likelihood, loss-graph, and counting benchmarks. Built once.
struct PredatorPreyFixture {
  ReactionNetwork network;
  EquivalenceClasses classes;
  PredatorPreyTruth truth;
  std::vector<Trajectory> trajectories;
  GroupedDataset grouped;
  SufficientStats stats;
  NeuralPropensityModel model;

  PredatorPreyFixture()
      : network(predator_prey_network()),
        classes(build_equivalence_classes(network)),
        truth(),
        trajectories(make_trajectories()),
        grouped(group_transitions(trajectories, classes)),
        stats(compress(trajectories, classes)),
        model(make_model()) {}

  std::vector<Trajectory> make_trajectories() const {
    std::vector<Trajectory> out;
    for (std::size_t i = 0; i < 10; ++i) {
      SimulationConfig config;
      config.initial_state = PredatorPreyConfig{}.initial_state;
      config.max_transitions = 200;
      config.rng_seed = rng::derive_seed(4242, i);
      out.push_back(simulate(network, classes, truth, config));
    }
    return out;
  }

  NeuralPropensityModel make_model() const {
    nn::NetworkSpec spec;
    spec.input_width = 3;
    spec.layers = {nn::DenseLayer{64, nn::Activation::Selu},
                   nn::DenseLayer{64, nn::Activation::Selu},
                   nn::DenseLayer{classes.class_count(), nn::Activation::Softplus}};
    return NeuralPropensityModel(spec, nn::initialize_parameters(spec, 1),
                                 derive_input_transform(stats, {0, 1, 2}),
                                 derive_output_scale(stats), stats.state_width,
                                 stats.covariate_width, {});
  }
};

const PredatorPreyFixture& pp() {
  static const PredatorPreyFixture fixture;
  return fixture;
}

void BM_SsaBirthDeath(benchmark::State& state) {
  const BirthDeathConfig config;
  const auto network = birth_death_network();
  const auto classes = build_equivalence_classes(network);
  const BirthDeathTruth truth(config);

  SimulationConfig sim;
  sim.initial_state = {config.initial_population};
  sim.max_transitions = kTransitionsPerPath;
  sim.schedule = birth_death_schedule(config);

  std::uint64_t run = 0;
  for (auto _ : state) {
    sim.rng_seed = rng::derive_seed(11, run++);
    benchmark::DoNotOptimize(simulate(network, classes, truth, sim));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kTransitionsPerPath));
}
BENCHMARK(BM_SsaBirthDeath)->Unit(benchmark::kMillisecond);

void BM_SsaPredatorPrey(benchmark::State& state) {
  const auto& fx = pp();
  SimulationConfig sim;
  sim.initial_state = PredatorPreyConfig{}.initial_state;
  sim.max_transitions = kTransitionsPerPath;

  std::uint64_t run = 0;
  for (auto _ : state) {
    sim.rng_seed = rng::derive_seed(13, run++);
    benchmark::DoNotOptimize(simulate(fx.network, fx.classes, fx.truth, sim));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * kTransitionsPerPath));
}
BENCHMARK(BM_SsaPredatorPrey)->Unit(benchmark::kMillisecond);

void BM_NllGrouped(benchmark::State& state) {
  const auto& fx = pp();
  for (auto _ : state) benchmark::DoNotOptimize(nll(fx.model, fx.grouped, fx.classes));
  state.SetItemsProcessed(
      static_cast<std::int64_t>(state.iterations() * fx.grouped.transition_count()));
}
BENCHMARK(BM_NllGrouped)->Unit(benchmark::kMillisecond);

void BM_NllCompressed(benchmark::State& state) {
  const auto& fx = pp();
  for (auto _ : state) benchmark::DoNotOptimize(nll_compressed(fx.model, fx.stats, fx.classes));
  state.SetItemsProcessed(
      static_cast<std::int64_t>(state.iterations() * fx.stats.transition_count));
}
BENCHMARK(BM_NllCompressed)->Unit(benchmark::kMillisecond);

// One training step's worth of graph work: load parameters, forward pass,
// backward pass. Matches what each epoch does per batch.
void BM_LossForwardBackward(benchmark::State& state) {
  const auto& fx = pp();
  LossGraph loss = build_loss_graph(fx.model, fx.stats);
  const auto& tensors = fx.model.parameters().tensors;
  for (auto _ : state) {
    for (std::size_t p = 0; p < tensors.size(); ++p)
      loss.graph.mutable_value(loss.parameter_nodes[p]) = tensors[p];
    loss.graph.forward();
    loss.graph.backward(loss.loss);
    benchmark::DoNotOptimize(loss.graph.value(loss.loss)(0, 0));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * fx.stats.row_count()));
}
BENCHMARK(BM_LossForwardBackward)->Unit(benchmark::kMillisecond);

// Adam update over a parameter set the size of the large experiment
// networks (5 hidden layers of 128 units).
void BM_AdamStep(benchmark::State& state) {
  nn::NetworkSpec spec;
  spec.input_width = 3;
  for (int i = 0; i < 5; ++i) spec.layers.push_back(nn::DenseLayer{128, nn::Activation::Selu});
  spec.layers.push_back(nn::DenseLayer{9, nn::Activation::Softplus});

  auto params = nn::initialize_parameters(spec, 2);
  std::vector<nn::Tensor> grads = params.tensors;

  nn::Adam adam(nn::AdamConfig{});
  for (auto _ : state) {
    adam.step(params.tensors, grads);
    benchmark::DoNotOptimize(params.tensors.front().data.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * params.count()));
}
BENCHMARK(BM_AdamStep)->Unit(benchmark::kMicrosecond);

void BM_CountingFit(benchmark::State& state) {
  const auto& fx = pp();
  for (auto _ : state)
    benchmark::DoNotOptimize(fit_counting_mle(fx.trajectories, fx.classes, CountingConfig{}));
  state.SetItemsProcessed(
      static_cast<std::int64_t>(state.iterations() * fx.grouped.transition_count()));
}
BENCHMARK(BM_CountingFit)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
