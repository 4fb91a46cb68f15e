#pragma once

// Shared fixtures and numerical utilities for the test suite.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "nctmc/core/network.hpp"
#include "nctmc/core/propensity.hpp"
#include "nctmc/core/trajectory.hpp"
#include "nctmc/likelihood/grouped.hpp"
#include "nctmc/nn/graph.hpp"
#include "nctmc/ssa/rng.hpp"
#include "nctmc/ssa/simulate.hpp"

namespace testutil {

// Two-species toy network with two distinguishable reactions plus a third
// sharing reaction 0's state change, so it exercises class merging:
//   r0: A -> 2A   (dS = +1, 0)
//   r1: A -> 0    (dS = -1, 0)
//   r2: B -> A+B  (dS = +1, 0)  -- same dS as r0, merged with it
//   r3: B -> 0    (dS =  0,-1)
inline nctmc::ReactionNetwork toy_network() {
  return nctmc::ReactionNetwork({"A", "B"}, {
                                                {"grow", {1, 0}, {2, 0}},
                                                {"decay", {1, 0}, {0, 0}},
                                                {"seed", {0, 1}, {1, 1}},
                                                {"drop", {0, 1}, {0, 0}},
                                            });
}

// Mass-action-ish rates for toy_network, strictly positive while A,B >= 1.
inline nctmc::FunctionModel toy_truth() {
  return nctmc::FunctionModel(
      nctmc::PropensityModel::Level::Reaction, 4,
      [](const nctmc::State& s, const nctmc::Covariates&, std::span<double> out) {
        const double a = static_cast<double>(s[0]);
        const double b = static_cast<double>(s[1]);
        out[0] = 0.7 * a;
        out[1] = 0.9 * a;
        out[2] = 1.3 * b;
        out[3] = 0.4 * b;
      });
}

// Short fully observed sample paths of the toy system.
inline std::vector<nctmc::Trajectory> toy_trajectories(std::size_t count,
                                                       std::uint64_t base_seed,
                                                       std::uint64_t transitions = 40) {
  const auto network = toy_network();
  const auto classes = nctmc::build_equivalence_classes(network);
  const auto truth = toy_truth();
  std::vector<nctmc::Trajectory> out;
  for (std::size_t i = 0; i < count; ++i) {
    nctmc::SimulationConfig config;
    config.initial_state = {20, 15};
    config.max_transitions = transitions;
    config.rng_seed = nctmc::rng::derive_seed(base_seed, i);
    out.push_back(nctmc::simulate(network, classes, truth, config));
  }
  return out;
}

// Fourth-order central-difference derivative of `loss_value()` with respect
// to one entry of a parameter tensor owned by the graph. The O(h^4) stencil
// keeps the probe's own truncation error near 1e-8, well below the 1e-5
// agreement the gradient checks demand.
template <typename LossFn>
double central_difference(nctmc::nn::Graph& graph, nctmc::nn::Graph::NodeId param,
                          std::size_t index, LossFn&& loss_value) {
  double& theta = graph.mutable_value(param).data[index];
  const double saved = theta;
  const double h = 1e-4 * std::max(1.0, std::abs(saved));
  const auto eval = [&](double value) {
    theta = value;
    return loss_value();
  };
  const double d = (eval(saved - 2.0 * h) - 8.0 * eval(saved - h) + 8.0 * eval(saved + h) -
                    eval(saved + 2.0 * h)) /
                   (12.0 * h);
  theta = saved;
  return d;
}

// Gradient-check discrepancy: relative where the magnitudes allow it,
// absolute for near-zero pairs. A check passes when this is < 1e-5.
inline double gradient_discrepancy(double analytic, double numeric) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  if (scale < 1e-6) return std::abs(analytic - numeric) < 1e-9 ? 0.0 : 1.0;
  return std::abs(analytic - numeric) / scale;
}

// Checks every parameter entry of a graph against central differences after
// a fresh forward/backward pass. Returns the worst discrepancy.
inline double check_graph_gradients(nctmc::nn::Graph& graph, nctmc::nn::Graph::NodeId loss,
                                    const std::vector<nctmc::nn::Graph::NodeId>& params) {
  graph.forward();
  graph.backward(loss);
  // Copy analytic gradients before finite differences disturb the graph.
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (auto id : params) analytic.push_back(graph.gradient(id).data);

  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const std::size_t n = graph.value(params[p]).size();
    for (std::size_t i = 0; i < n; ++i) {
      const double numeric = central_difference(graph, params[p], i, [&] {
        graph.forward();
        return graph.value(loss)(0, 0);
      });
      worst = std::max(worst, gradient_discrepancy(analytic[p][i], numeric));
    }
  }
  return worst;
}

}  // namespace testutil
