#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nctmc/nn/graph.hpp"
#include "nctmc/nn/tensor.hpp"

namespace nctmc::nn {

enum class Activation { Identity, Selu, Softplus, Exp };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct DenseLayer {
  std::size_t units;
  Activation activation = Activation::Identity;
};

struct Conv1dLayer {
  std::size_t channels;
  std::size_t width;
  Activation activation = Activation::Identity;
};

// Reinterprets a flat row as `channels` blocks of `length` for a following
// convolution. Costless: the storage layout does not change.
struct ReshapeLayer {
  std::size_t channels;
  std::size_t length;
};

struct FlattenLayer {};

using Layer = std::variant<DenseLayer, Conv1dLayer, ReshapeLayer, FlattenLayer>;

// Feed-forward architecture description. Dense layers require a flat
// activation shape, convolutions a channeled one.
struct NetworkSpec {
  std::size_t input_width = 0;
  std::vector<Layer> layers;

  void validate() const;  // throws ConfigError on inconsistent shapes
  std::size_t output_width() const;
  std::size_t parameter_count() const;
};

// Weights and biases in layer order: dense and conv layers contribute a
// weight tensor followed by a bias tensor.
struct Parameters {
  std::vector<Tensor> tensors;
  std::size_t count() const;
};

// Weights drawn from U(-1/sqrt(fan_in), +1/sqrt(fan_in)), biases zero.
Parameters initialize_parameters(const NetworkSpec& spec, std::uint64_t seed);

struct BuiltNetwork {
  Graph::NodeId output;
  std::vector<Graph::NodeId> parameter_nodes;  // same order as Parameters::tensors
};

// Appends the network to `graph` on top of `input` (one batch row per matrix
// row) and registers each parameter tensor as a trainable graph node.
BuiltNetwork build_network(Graph& graph, Graph::NodeId input, const NetworkSpec& spec,
                           const Parameters& params);

// Stateless single-row forward pass; safe to call concurrently.
std::vector<double> evaluate(const NetworkSpec& spec, const Parameters& params,
                             std::span<const double> input);

// Layer-by-layer table with output shapes and parameter counts.
std::string summarize(const NetworkSpec& spec);

// Checkpoints round-trip exactly: doubles are written with shortest
// round-trip precision.
void save_checkpoint(std::ostream& out, const NetworkSpec& spec, const Parameters& params);
std::pair<NetworkSpec, Parameters> load_checkpoint(std::istream& in);

}  // namespace nctmc::nn
