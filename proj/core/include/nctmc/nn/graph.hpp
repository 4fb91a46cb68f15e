#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "nctmc/nn/tensor.hpp"

namespace nctmc::nn {

// Reverse-mode autodiff over a statically built computation graph.
//
// A graph is assembled once (nodes are appended in evaluation order) and then
// reused: callers overwrite the values of Input nodes, run forward(), and run
// backward(loss) to accumulate gradients into every Parameter node. Parameter
// values persist between passes, so an optimizer can update them in place
// through mutable_value().
class Graph {
 public:
  using NodeId = int;

  // Leaves.
  NodeId input(std::size_t rows, std::size_t cols);
  NodeId parameter(Tensor initial);
  NodeId constant(Tensor value);

  // out = a * b (matrix product).
  NodeId matmul(NodeId a, NodeId b);
  // out[i,j] = a[i,j] + bias[0,j]; bias is a 1 x cols row.
  NodeId add_bias(NodeId a, NodeId bias);
  // a holds `channels` blocks of length `length` per row; adds bias[0,c]
  // to every element of block c.
  NodeId add_channel_bias(NodeId a, NodeId bias, std::size_t channels, std::size_t length);

  // Elementwise nonlinearities.
  NodeId selu(NodeId a);
  NodeId softplus(NodeId a);
  NodeId exponential(NodeId a);
  NodeId logarithm(NodeId a);

  // True 1-d convolution (kernel reversed) applied independently to each row
  // of a. Rows of a are read as `in_channels` blocks of length `in_length`;
  // kernels has one row per output channel, laid out as in_channels x width
  // blocks. Output rows hold out_channels blocks of length
  // in_length - width + 1.
  NodeId conv1d(NodeId a, NodeId kernels, std::size_t in_channels, std::size_t in_length,
                std::size_t width);

  // out[i,j] = scale[j] * a[i,j] + shift[j]; the constants carry no gradient.
  NodeId affine_columns(NodeId a, std::vector<double> scale, std::vector<double> shift);

  // 1x1 scalar: sum of weights[i,j] * a[i,j] with constant weights.
  NodeId weighted_sum(NodeId a, NodeId weights);

  // Elementwise sum / difference of same-shape nodes.
  NodeId add(NodeId a, NodeId b);
  NodeId subtract(NodeId a, NodeId b);

  void set_input(NodeId id, const Tensor& value);
  const Tensor& value(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  const Tensor& gradient(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].grad; }
  Tensor& mutable_value(NodeId id) { return nodes_[static_cast<std::size_t>(id)].value; }
  Tensor& mutable_gradient(NodeId id) { return nodes_[static_cast<std::size_t>(id)].grad; }

  // Parameter node ids in creation order.
  const std::vector<NodeId>& parameters() const { return parameters_; }
  std::size_t parameter_count() const;

  void forward();
  // Zeroes all gradients, seeds d(loss)/d(loss) = 1 and back-propagates.
  // `loss` must be a 1x1 node.
  void backward(NodeId loss);

 private:
  enum class Op {
    Input,
    Parameter,
    Constant,
    MatMul,
    AddBias,
    AddChannelBias,
    Selu,
    Softplus,
    Exp,
    Log,
    Conv1d,
    AffineCols,
    WeightedSum,
    Add,
    Subtract,
  };

  struct Node {
    Op op;
    std::array<NodeId, 2> args{-1, -1};
    Tensor value;
    Tensor grad;
    // Conv1d / AddChannelBias geometry.
    std::size_t channels = 0;
    std::size_t length = 0;
    std::size_t width = 0;
    // AffineCols constants.
    std::vector<double> scale;
    std::vector<double> shift;
  };

  NodeId push(Node node);
  void eval(Node& node);
  void propagate(const Node& node);

  std::vector<Node> nodes_;
  std::vector<NodeId> parameters_;
};

// SELU constants (shared with tests and model summaries).
inline constexpr double kSeluLambda = 1.0507009873554804934193349852946;
inline constexpr double kSeluAlpha = 1.6732632423543772848170429916717;

double selu_scalar(double x);
double softplus_scalar(double x);

}  // namespace nctmc::nn
