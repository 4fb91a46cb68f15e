#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "nctmc/errors.hpp"
#include "nctmc/nn/graph.hpp"
#include "nctmc/nn/network.hpp"
#include "nctmc/ssa/rng.hpp"

using namespace nctmc;
using nn::Graph;
using nn::Tensor;

namespace {

Tensor random_tensor(std::size_t rows, std::size_t cols, rng::Xoshiro256StarStar& gen,
                     double lo = -1.0, double hi = 1.0) {
  Tensor t(rows, cols);
  for (double& v : t.data) v = lo + (hi - lo) * gen.uniform01();
  return t;
}

}  // namespace

TEST_SUITE("autodiff") {

TEST_CASE("selu matches its closed form") {
  // lambda * x for x > 0, lambda * alpha * (e^x - 1) otherwise; frozen
  // values computed from an independent evaluation of that formula.
  CHECK(nn::selu_scalar(-10.0) == doctest::Approx(-1.7580195232607867).epsilon(1e-14));
  CHECK(nn::selu_scalar(-0.5) == doctest::Approx(-0.6917581878028713).epsilon(1e-14));
  CHECK(nn::selu_scalar(0.0) == doctest::Approx(0.0));
  CHECK(nn::selu_scalar(0.5) == doctest::Approx(0.5253504936777402).epsilon(1e-14));
  CHECK(nn::selu_scalar(2.0) == doctest::Approx(2.101401974710961).epsilon(1e-14));
}

TEST_CASE("softplus matches its closed form and underflows gracefully") {
  CHECK(nn::softplus_scalar(0.0) == doctest::Approx(0.6931471805599453).epsilon(1e-14));
  CHECK(nn::softplus_scalar(-10.0) == doctest::Approx(4.539889921686465e-05).epsilon(1e-12));
  CHECK(nn::softplus_scalar(10.0) == doctest::Approx(10.000045398899218).epsilon(1e-14));
  CHECK(nn::softplus_scalar(-800.0) >= 0.0);      // no underflow surprises
  CHECK(nn::softplus_scalar(800.0) == doctest::Approx(800.0));  // no overflow
}

TEST_CASE("conv1d is a true convolution, not a cross-correlation") {
  // Input row [1,2,3], kernel [1,-1]: reversing the kernel gives
  // y[0] = 2*1 + 1*(-1) = 1 and y[1] = 3*1 + 2*(-1) = 1. A cross-correlation
  // would give [-1,-1], so this pins the orientation.
  Graph g;
  const auto x = g.input(1, 3);
  const auto k = g.parameter(Tensor::row({1.0, -1.0}));
  const auto y = g.conv1d(x, k, 1, 3, 2);
  g.set_input(x, Tensor::row({1.0, 2.0, 3.0}));
  g.forward();
  CHECK(g.value(y).rows == 1);
  CHECK(g.value(y).cols == 2);
  CHECK(g.value(y)(0, 0) == doctest::Approx(1.0));
  CHECK(g.value(y)(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("matmul forward matches a hand product") {
  Graph g;
  const auto a = g.input(2, 3);
  Tensor weights(3, 2);
  weights.data = {1, 4, 2, 5, 3, 6};
  const auto w = g.parameter(weights);
  const auto y = g.matmul(a, w);
  Tensor in(2, 3);
  in.data = {1, 0, 2, 0, 1, 1};
  g.set_input(a, in);
  g.forward();
  // row0 = 1*(1,4) + 2*(3,6) = (7,16); row1 = (2,5) + (3,6) = (5,11).
  CHECK(g.value(y)(0, 0) == doctest::Approx(7.0));
  CHECK(g.value(y)(0, 1) == doctest::Approx(16.0));
  CHECK(g.value(y)(1, 0) == doctest::Approx(5.0));
  CHECK(g.value(y)(1, 1) == doctest::Approx(11.0));
}

// Every differentiable op, checked against central finite differences with
// a scalar loss built from a weighted sum. Discrepancy must stay under 1e-5.
TEST_CASE("gradients match finite differences per op") {
  rng::Xoshiro256StarStar gen(31415);

  SUBCASE("matmul + bias") {
    Graph g;
    const auto x = g.input(4, 3);
    const auto w = g.parameter(random_tensor(3, 5, gen));
    const auto b = g.parameter(random_tensor(1, 5, gen));
    const auto y = g.add_bias(g.matmul(x, w), b);
    const auto loss = g.weighted_sum(y, g.constant(random_tensor(4, 5, gen)));
    g.set_input(x, random_tensor(4, 3, gen));
    CHECK(testutil::check_graph_gradients(g, loss, g.parameters()) < 1e-5);
  }

  SUBCASE("selu") {
    Graph g;
    const auto w = g.parameter(random_tensor(3, 4, gen));
    const auto y = g.selu(w);
    const auto loss = g.weighted_sum(y, g.constant(random_tensor(3, 4, gen)));
    CHECK(testutil::check_graph_gradients(g, loss, g.parameters()) < 1e-5);
  }

  SUBCASE("softplus") {
    Graph g;
    const auto w = g.parameter(random_tensor(3, 4, gen, -3.0, 3.0));
    const auto loss = g.weighted_sum(g.softplus(w), g.constant(random_tensor(3, 4, gen)));
    CHECK(testutil::check_graph_gradients(g, loss, g.parameters()) < 1e-5);
  }

  SUBCASE("exp and log") {
    Graph g;
    const auto w = g.parameter(random_tensor(2, 3, gen, 0.5, 2.0));
    const auto y = g.logarithm(g.exponential(w));
    const auto loss = g.weighted_sum(y, g.constant(random_tensor(2, 3, gen)));
    CHECK(testutil::check_graph_gradients(g, loss, g.parameters()) < 1e-5);
  }

  SUBCASE("conv1d with channels") {
    Graph g;
    const std::size_t in_channels = 3, in_length = 8, width = 4, out_channels = 2;
    const auto x = g.input(5, in_channels * in_length);
    const auto k = g.parameter(random_tensor(out_channels, in_channels * width, gen));
    const auto y = g.conv1d(x, k, in_channels, in_length, width);
    const auto bias = g.parameter(random_tensor(1, out_channels, gen));
    const auto z = g.add_channel_bias(y, bias, out_channels, in_length - width + 1);
    const auto loss = g.weighted_sum(
        g.selu(z), g.constant(random_tensor(5, out_channels * (in_length - width + 1), gen)));
    g.set_input(x, random_tensor(5, in_channels * in_length, gen));
    CHECK(testutil::check_graph_gradients(g, loss, g.parameters()) < 1e-5);
  }

  SUBCASE("affine columns, add, subtract") {
    Graph g;
    const auto w = g.parameter(random_tensor(3, 4, gen));
    const auto u = g.parameter(random_tensor(3, 4, gen));
    const auto a = g.affine_columns(w, {2.0, -1.0, 0.5, 3.0}, {0.1, 0.2, -0.3, 0.0});
    const auto y = g.subtract(g.add(a, u), w);
    const auto loss = g.weighted_sum(y, g.constant(random_tensor(3, 4, gen)));
    CHECK(testutil::check_graph_gradients(g, loss, g.parameters()) < 1e-5);
  }
}

TEST_CASE("gradients accumulate over a full dense network") {
  rng::Xoshiro256StarStar gen(2718);
  Graph g;
  const auto x = g.input(6, 4);

  nn::NetworkSpec spec;
  spec.input_width = 4;
  spec.layers = {nn::DenseLayer{8, nn::Activation::Selu},
                 nn::DenseLayer{8, nn::Activation::Selu},
                 nn::DenseLayer{3, nn::Activation::Softplus}};
  const auto params = nn::initialize_parameters(spec, 7);
  const auto built = nn::build_network(g, x, spec, params);
  const auto loss = g.weighted_sum(built.output, g.constant(random_tensor(6, 3, gen)));
  g.set_input(x, random_tensor(6, 4, gen, -2.0, 2.0));
  CHECK(testutil::check_graph_gradients(g, loss, built.parameter_nodes) < 1e-5);
}

TEST_CASE("gradients accumulate over the convolutional architecture") {
  rng::Xoshiro256StarStar gen(1618);
  Graph g;
  const auto x = g.input(4, 3);

  nn::NetworkSpec spec;
  spec.input_width = 3;
  spec.layers = {nn::DenseLayer{24, nn::Activation::Selu}, nn::ReshapeLayer{3, 8},
                 nn::Conv1dLayer{5, 4, nn::Activation::Selu}, nn::FlattenLayer{},
                 nn::DenseLayer{6, nn::Activation::Selu},
                 nn::DenseLayer{2, nn::Activation::Softplus}};
  const auto params = nn::initialize_parameters(spec, 11);
  const auto built = nn::build_network(g, x, spec, params);
  const auto loss = g.weighted_sum(built.output, g.constant(random_tensor(4, 2, gen)));
  g.set_input(x, random_tensor(4, 3, gen, -2.0, 2.0));
  CHECK(testutil::check_graph_gradients(g, loss, built.parameter_nodes) < 1e-5);
}

TEST_CASE("backward rejects a non-scalar loss") {
  Graph g;
  const auto w = g.parameter(Tensor(2, 2, 1.0));
  g.forward();
  CHECK_THROWS_AS(g.backward(w), ShapeMismatch);
}

TEST_CASE("shape mismatches are rejected at graph build time") {
  Graph g;
  const auto a = g.input(2, 3);
  const auto b = g.parameter(Tensor(4, 2, 0.0));
  CHECK_THROWS_AS(g.matmul(a, b), ShapeMismatch);
  const auto bias = g.parameter(Tensor(1, 5, 0.0));
  CHECK_THROWS_AS(g.add_bias(a, bias), ShapeMismatch);
}

}
