#include "nctmc/nn/graph.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "nctmc/errors.hpp"

namespace nctmc::nn {

namespace {

using EigenMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Map = Eigen::Map<EigenMatrix>;
using ConstMap = Eigen::Map<const EigenMatrix>;

ConstMap map(const Tensor& t) {
  return ConstMap(t.data.data(), static_cast<Eigen::Index>(t.rows),
                  static_cast<Eigen::Index>(t.cols));
}

Map map(Tensor& t) {
  return Map(t.data.data(), static_cast<Eigen::Index>(t.rows),
             static_cast<Eigen::Index>(t.cols));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double selu_scalar(double x) {
  return x > 0.0 ? kSeluLambda * x : kSeluLambda * kSeluAlpha * std::expm1(x);
}

double softplus_scalar(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

Graph::NodeId Graph::push(Node node) {
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size() - 1);
}

Graph::NodeId Graph::input(std::size_t rows, std::size_t cols) {
  Node n;
  n.op = Op::Input;
  n.value = Tensor(rows, cols);
  n.grad = Tensor(rows, cols);
  return push(std::move(n));
}

Graph::NodeId Graph::parameter(Tensor initial) {
  Node n;
  n.op = Op::Parameter;
  n.grad = Tensor(initial.rows, initial.cols);
  n.value = std::move(initial);
  NodeId id = push(std::move(n));
  parameters_.push_back(id);
  return id;
}

Graph::NodeId Graph::constant(Tensor value) {
  Node n;
  n.op = Op::Constant;
  n.grad = Tensor(value.rows, value.cols);
  n.value = std::move(value);
  return push(std::move(n));
}

Graph::NodeId Graph::matmul(NodeId a, NodeId b) {
  const Tensor& va = value(a);
  const Tensor& vb = value(b);
  if (va.cols != vb.rows) throw ShapeMismatch("matmul: inner dimensions disagree");
  Node n;
  n.op = Op::MatMul;
  n.args = {a, b};
  n.value = Tensor(va.rows, vb.cols);
  n.grad = Tensor(va.rows, vb.cols);
  return push(std::move(n));
}

Graph::NodeId Graph::add_bias(NodeId a, NodeId bias) {
  const Tensor& va = value(a);
  const Tensor& vb = value(bias);
  if (vb.rows != 1 || vb.cols != va.cols) throw ShapeMismatch("add_bias: bias must be 1 x cols");
  Node n;
  n.op = Op::AddBias;
  n.args = {a, bias};
  n.value = Tensor(va.rows, va.cols);
  n.grad = Tensor(va.rows, va.cols);
  return push(std::move(n));
}

Graph::NodeId Graph::add_channel_bias(NodeId a, NodeId bias, std::size_t channels,
                                      std::size_t length) {
  const Tensor& va = value(a);
  const Tensor& vb = value(bias);
  if (va.cols != channels * length)
    throw ShapeMismatch("add_channel_bias: columns must be channels * length");
  if (vb.rows != 1 || vb.cols != channels)
    throw ShapeMismatch("add_channel_bias: bias must be 1 x channels");
  Node n;
  n.op = Op::AddChannelBias;
  n.args = {a, bias};
  n.channels = channels;
  n.length = length;
  n.value = Tensor(va.rows, va.cols);
  n.grad = Tensor(va.rows, va.cols);
  return push(std::move(n));
}

Graph::NodeId Graph::selu(NodeId a) {
  Node n;
  n.op = Op::Selu;
  n.args = {a, -1};
  n.value = Tensor(value(a).rows, value(a).cols);
  n.grad = n.value;
  return push(std::move(n));
}

Graph::NodeId Graph::softplus(NodeId a) {
  Node n;
  n.op = Op::Softplus;
  n.args = {a, -1};
  n.value = Tensor(value(a).rows, value(a).cols);
  n.grad = n.value;
  return push(std::move(n));
}

Graph::NodeId Graph::exponential(NodeId a) {
  Node n;
  n.op = Op::Exp;
  n.args = {a, -1};
  n.value = Tensor(value(a).rows, value(a).cols);
  n.grad = n.value;
  return push(std::move(n));
}

Graph::NodeId Graph::logarithm(NodeId a) {
  Node n;
  n.op = Op::Log;
  n.args = {a, -1};
  n.value = Tensor(value(a).rows, value(a).cols);
  n.grad = n.value;
  return push(std::move(n));
}

Graph::NodeId Graph::conv1d(NodeId a, NodeId kernels, std::size_t in_channels,
                            std::size_t in_length, std::size_t width) {
  const Tensor& va = value(a);
  const Tensor& vk = value(kernels);
  if (va.cols != in_channels * in_length)
    throw ShapeMismatch("conv1d: columns must be in_channels * in_length");
  if (vk.cols != in_channels * width)
    throw ShapeMismatch("conv1d: kernel columns must be in_channels * width");
  if (width > in_length) throw ShapeMismatch("conv1d: kernel wider than input");
  Node n;
  n.op = Op::Conv1d;
  n.args = {a, kernels};
  n.channels = in_channels;
  n.length = in_length;
  n.width = width;
  const std::size_t out_length = in_length - width + 1;
  n.value = Tensor(va.rows, vk.rows * out_length);
  n.grad = n.value;
  return push(std::move(n));
}

Graph::NodeId Graph::affine_columns(NodeId a, std::vector<double> scale,
                                    std::vector<double> shift) {
  const Tensor& va = value(a);
  if (scale.size() != va.cols || shift.size() != va.cols)
    throw ShapeMismatch("affine_columns: constants must match column count");
  Node n;
  n.op = Op::AffineCols;
  n.args = {a, -1};
  n.scale = std::move(scale);
  n.shift = std::move(shift);
  n.value = Tensor(va.rows, va.cols);
  n.grad = n.value;
  return push(std::move(n));
}

Graph::NodeId Graph::weighted_sum(NodeId a, NodeId weights) {
  if (!value(a).same_shape(value(weights)))
    throw ShapeMismatch("weighted_sum: weights must match operand shape");
  Node n;
  n.op = Op::WeightedSum;
  n.args = {a, weights};
  n.value = Tensor(1, 1);
  n.grad = Tensor(1, 1);
  return push(std::move(n));
}

Graph::NodeId Graph::add(NodeId a, NodeId b) {
  if (!value(a).same_shape(value(b))) throw ShapeMismatch("add: operands differ in shape");
  Node n;
  n.op = Op::Add;
  n.args = {a, b};
  n.value = Tensor(value(a).rows, value(a).cols);
  n.grad = n.value;
  return push(std::move(n));
}

Graph::NodeId Graph::subtract(NodeId a, NodeId b) {
  if (!value(a).same_shape(value(b))) throw ShapeMismatch("subtract: operands differ in shape");
  Node n;
  n.op = Op::Subtract;
  n.args = {a, b};
  n.value = Tensor(value(a).rows, value(a).cols);
  n.grad = n.value;
  return push(std::move(n));
}

void Graph::set_input(NodeId id, const Tensor& v) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.op != Op::Input) throw Error("set_input: node is not an input");
  if (!n.value.same_shape(v)) throw ShapeMismatch("set_input: shape differs from declaration");
  n.value = v;
}

std::size_t Graph::parameter_count() const {
  std::size_t total = 0;
  for (NodeId id : parameters_) total += value(id).size();
  return total;
}

void Graph::eval(Node& n) {
  const auto& A = n.args[0] >= 0 ? nodes_[static_cast<std::size_t>(n.args[0])].value : n.value;
  const auto& B = n.args[1] >= 0 ? nodes_[static_cast<std::size_t>(n.args[1])].value : n.value;
  switch (n.op) {
    case Op::Input:
    case Op::Parameter:
    case Op::Constant:
      break;
    case Op::MatMul:
      map(n.value).noalias() = map(A) * map(B);
      break;
    case Op::AddBias:
      for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t j = 0; j < A.cols; ++j) n.value(i, j) = A(i, j) + B(0, j);
      break;
    case Op::AddChannelBias:
      for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t c = 0; c < n.channels; ++c)
          for (std::size_t k = 0; k < n.length; ++k)
            n.value(i, c * n.length + k) = A(i, c * n.length + k) + B(0, c);
      break;
    case Op::Selu:
      for (std::size_t i = 0; i < A.size(); ++i) n.value.data[i] = selu_scalar(A.data[i]);
      break;
    case Op::Softplus:
      for (std::size_t i = 0; i < A.size(); ++i) n.value.data[i] = softplus_scalar(A.data[i]);
      break;
    case Op::Exp:
      for (std::size_t i = 0; i < A.size(); ++i) n.value.data[i] = std::exp(A.data[i]);
      break;
    case Op::Log:
      for (std::size_t i = 0; i < A.size(); ++i) n.value.data[i] = std::log(A.data[i]);
      break;
    case Op::Conv1d: {
      const std::size_t out_channels = B.rows;
      const std::size_t out_length = n.length - n.width + 1;
      for (std::size_t r = 0; r < A.rows; ++r)
        for (std::size_t co = 0; co < out_channels; ++co)
          for (std::size_t i = 0; i < out_length; ++i) {
            double acc = 0.0;
            for (std::size_t ci = 0; ci < n.channels; ++ci)
              for (std::size_t j = 0; j < n.width; ++j)
                acc += B(co, ci * n.width + j) * A(r, ci * n.length + i + n.width - 1 - j);
            n.value(r, co * out_length + i) = acc;
          }
      break;
    }
    case Op::AffineCols:
      for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t j = 0; j < A.cols; ++j)
          n.value(i, j) = n.scale[j] * A(i, j) + n.shift[j];
      break;
    case Op::WeightedSum: {
      // Compensated sum keeps the scalar loss stable across large batches.
      double sum = 0.0, comp = 0.0;
      for (std::size_t i = 0; i < A.size(); ++i) {
        const double term = A.data[i] * B.data[i] - comp;
        const double next = sum + term;
        comp = (next - sum) - term;
        sum = next;
      }
      n.value(0, 0) = sum;
      break;
    }
    case Op::Add:
      for (std::size_t i = 0; i < A.size(); ++i) n.value.data[i] = A.data[i] + B.data[i];
      break;
    case Op::Subtract:
      for (std::size_t i = 0; i < A.size(); ++i) n.value.data[i] = A.data[i] - B.data[i];
      break;
  }
}

void Graph::forward() {
  for (Node& n : nodes_) eval(n);
}

void Graph::propagate(const Node& n) {
  auto& dOut = const_cast<Tensor&>(n.grad);
  Tensor* dA = n.args[0] >= 0 ? &nodes_[static_cast<std::size_t>(n.args[0])].grad : nullptr;
  Tensor* dB = n.args[1] >= 0 ? &nodes_[static_cast<std::size_t>(n.args[1])].grad : nullptr;
  const Tensor* A = n.args[0] >= 0 ? &nodes_[static_cast<std::size_t>(n.args[0])].value : nullptr;
  const Tensor* B = n.args[1] >= 0 ? &nodes_[static_cast<std::size_t>(n.args[1])].value : nullptr;
  switch (n.op) {
    case Op::Input:
    case Op::Parameter:
    case Op::Constant:
      break;
    case Op::MatMul:
      map(*dA).noalias() += map(dOut) * map(*B).transpose();
      map(*dB).noalias() += map(*A).transpose() * map(dOut);
      break;
    case Op::AddBias:
      for (std::size_t i = 0; i < dOut.rows; ++i)
        for (std::size_t j = 0; j < dOut.cols; ++j) {
          (*dA)(i, j) += dOut(i, j);
          (*dB)(0, j) += dOut(i, j);
        }
      break;
    case Op::AddChannelBias:
      for (std::size_t i = 0; i < dOut.rows; ++i)
        for (std::size_t c = 0; c < n.channels; ++c)
          for (std::size_t k = 0; k < n.length; ++k) {
            (*dA)(i, c * n.length + k) += dOut(i, c * n.length + k);
            (*dB)(0, c) += dOut(i, c * n.length + k);
          }
      break;
    case Op::Selu:
      for (std::size_t i = 0; i < dOut.size(); ++i) {
        const double x = A->data[i];
        const double d = x > 0.0 ? kSeluLambda : kSeluLambda * kSeluAlpha * std::exp(x);
        dA->data[i] += d * dOut.data[i];
      }
      break;
    case Op::Softplus:
      for (std::size_t i = 0; i < dOut.size(); ++i)
        dA->data[i] += sigmoid(A->data[i]) * dOut.data[i];
      break;
    case Op::Exp:
      for (std::size_t i = 0; i < dOut.size(); ++i)
        dA->data[i] += n.value.data[i] * dOut.data[i];
      break;
    case Op::Log:
      for (std::size_t i = 0; i < dOut.size(); ++i)
        dA->data[i] += dOut.data[i] / A->data[i];
      break;
    case Op::Conv1d: {
      const std::size_t out_channels = B->rows;
      const std::size_t out_length = n.length - n.width + 1;
      for (std::size_t r = 0; r < A->rows; ++r)
        for (std::size_t co = 0; co < out_channels; ++co)
          for (std::size_t i = 0; i < out_length; ++i) {
            const double g = dOut(r, co * out_length + i);
            if (g == 0.0) continue;
            for (std::size_t ci = 0; ci < n.channels; ++ci)
              for (std::size_t j = 0; j < n.width; ++j) {
                (*dA)(r, ci * n.length + i + n.width - 1 - j) += g * (*B)(co, ci * n.width + j);
                (*dB)(co, ci * n.width + j) += g * (*A)(r, ci * n.length + i + n.width - 1 - j);
              }
          }
      break;
    }
    case Op::AffineCols:
      for (std::size_t i = 0; i < dOut.rows; ++i)
        for (std::size_t j = 0; j < dOut.cols; ++j) (*dA)(i, j) += n.scale[j] * dOut(i, j);
      break;
    case Op::WeightedSum: {
      const double g = dOut(0, 0);
      for (std::size_t i = 0; i < A->size(); ++i) dA->data[i] += g * B->data[i];
      break;
    }
    case Op::Add:
      for (std::size_t i = 0; i < dOut.size(); ++i) {
        dA->data[i] += dOut.data[i];
        dB->data[i] += dOut.data[i];
      }
      break;
    case Op::Subtract:
      for (std::size_t i = 0; i < dOut.size(); ++i) {
        dA->data[i] += dOut.data[i];
        dB->data[i] -= dOut.data[i];
      }
      break;
  }
}

void Graph::backward(NodeId loss) {
  Node& target = nodes_[static_cast<std::size_t>(loss)];
  if (target.value.rows != 1 || target.value.cols != 1)
    throw ShapeMismatch("backward: loss node must be 1x1");
  for (Node& n : nodes_) n.grad.fill(0.0);
  target.grad(0, 0) = 1.0;
  for (std::size_t i = nodes_.size(); i-- > 0;) propagate(nodes_[i]);
}

}  // namespace nctmc::nn
