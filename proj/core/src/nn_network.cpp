#include "nctmc/nn/network.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "nctmc/errors.hpp"
#include "nctmc/ssa/rng.hpp"
#include "nn_json.hpp"

namespace nctmc::nn {

namespace {

// Activation shape while walking the layer list: either a flat row of
// `width` values or `channels` blocks of `length`.
struct Shape {
  bool flat = true;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::size_t length = 0;

  std::size_t total() const { return flat ? width : channels * length; }
};

struct TensorPlan {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t fan_in = 0;  // zero for biases
};

Shape advance(const Shape& in, const Layer& layer, std::size_t index,
              std::vector<TensorPlan>* plans) {
  Shape out;
  if (const auto* dense = std::get_if<DenseLayer>(&layer)) {
    if (!in.flat)
      throw ConfigError("layer " + std::to_string(index) + ": dense needs a flat input");
    if (dense->units == 0)
      throw ConfigError("layer " + std::to_string(index) + ": dense needs at least one unit");
    if (plans) {
      plans->push_back({in.width, dense->units, in.width});
      plans->push_back({1, dense->units, 0});
    }
    out.flat = true;
    out.width = dense->units;
  } else if (const auto* conv = std::get_if<Conv1dLayer>(&layer)) {
    if (in.flat)
      throw ConfigError("layer " + std::to_string(index) + ": conv1d needs a reshaped input");
    if (conv->channels == 0 || conv->width == 0)
      throw ConfigError("layer " + std::to_string(index) + ": conv1d needs channels and width");
    if (conv->width > in.length)
      throw ConfigError("layer " + std::to_string(index) + ": kernel wider than input");
    if (plans) {
      plans->push_back({conv->channels, in.channels * conv->width, in.channels * conv->width});
      plans->push_back({1, conv->channels, 0});
    }
    out.flat = false;
    out.channels = conv->channels;
    out.length = in.length - conv->width + 1;
  } else if (const auto* reshape = std::get_if<ReshapeLayer>(&layer)) {
    if (!in.flat)
      throw ConfigError("layer " + std::to_string(index) + ": reshape needs a flat input");
    if (reshape->channels * reshape->length != in.width)
      throw ConfigError("layer " + std::to_string(index) + ": reshape does not cover the input");
    out.flat = false;
    out.channels = reshape->channels;
    out.length = reshape->length;
  } else {
    if (in.flat)
      throw ConfigError("layer " + std::to_string(index) + ": flatten needs a reshaped input");
    out.flat = true;
    out.width = in.channels * in.length;
  }
  return out;
}

std::vector<TensorPlan> plan_parameters(const NetworkSpec& spec) {
  if (spec.input_width == 0) throw ConfigError("network needs a positive input width");
  std::vector<TensorPlan> plans;
  Shape shape{true, spec.input_width, 0, 0};
  for (std::size_t i = 0; i < spec.layers.size(); ++i)
    shape = advance(shape, spec.layers[i], i, &plans);
  return plans;
}

double activate(Activation a, double x) {
  switch (a) {
    case Activation::Identity: return x;
    case Activation::Selu: return selu_scalar(x);
    case Activation::Softplus: return softplus_scalar(x);
    case Activation::Exp: return std::exp(x);
  }
  return x;
}

}  // namespace

nlohmann::json layer_to_json(const Layer& layer) {
  nlohmann::json j;
  if (const auto* dense = std::get_if<DenseLayer>(&layer)) {
    j["kind"] = "dense";
    j["units"] = dense->units;
    j["activation"] = activation_name(dense->activation);
  } else if (const auto* conv = std::get_if<Conv1dLayer>(&layer)) {
    j["kind"] = "conv1d";
    j["channels"] = conv->channels;
    j["width"] = conv->width;
    j["activation"] = activation_name(conv->activation);
  } else if (const auto* reshape = std::get_if<ReshapeLayer>(&layer)) {
    j["kind"] = "reshape";
    j["channels"] = reshape->channels;
    j["length"] = reshape->length;
  } else {
    j["kind"] = "flatten";
  }
  return j;
}

Layer layer_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const auto activation = [&j] {
    return activation_from_name(j.value("activation", "identity"));
  };
  if (kind == "dense") return DenseLayer{j.at("units").get<std::size_t>(), activation()};
  if (kind == "conv1d")
    return Conv1dLayer{j.at("channels").get<std::size_t>(), j.at("width").get<std::size_t>(),
                       activation()};
  if (kind == "reshape")
    return ReshapeLayer{j.at("channels").get<std::size_t>(), j.at("length").get<std::size_t>()};
  if (kind == "flatten") return FlattenLayer{};
  throw ConfigError("unknown layer kind '" + kind + "'");
}

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Selu: return "selu";
    case Activation::Softplus: return "softplus";
    case Activation::Exp: return "exp";
  }
  return "identity";
}

Activation activation_from_name(const std::string& name) {
  if (name == "identity") return Activation::Identity;
  if (name == "selu") return Activation::Selu;
  if (name == "softplus") return Activation::Softplus;
  if (name == "exp") return Activation::Exp;
  throw ConfigError("unknown activation '" + name + "'");
}

void NetworkSpec::validate() const { plan_parameters(*this); }

std::size_t NetworkSpec::output_width() const {
  Shape shape{true, input_width, 0, 0};
  for (std::size_t i = 0; i < layers.size(); ++i) shape = advance(shape, layers[i], i, nullptr);
  return shape.total();
}

std::size_t NetworkSpec::parameter_count() const {
  std::size_t total = 0;
  for (const TensorPlan& p : plan_parameters(*this)) total += p.rows * p.cols;
  return total;
}

std::size_t Parameters::count() const {
  std::size_t total = 0;
  for (const Tensor& t : tensors) total += t.size();
  return total;
}

Parameters initialize_parameters(const NetworkSpec& spec, std::uint64_t seed) {
  rng::Xoshiro256StarStar gen(seed);
  Parameters params;
  for (const TensorPlan& p : plan_parameters(spec)) {
    Tensor t(p.rows, p.cols);
    if (p.fan_in > 0) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(p.fan_in));
      for (double& v : t.data) v = (2.0 * gen.uniform01() - 1.0) * bound;
    }
    params.tensors.push_back(std::move(t));
  }
  return params;
}

BuiltNetwork build_network(Graph& graph, Graph::NodeId input, const NetworkSpec& spec,
                           const Parameters& params) {
  const auto plans = plan_parameters(spec);
  if (params.tensors.size() != plans.size())
    throw ConfigError("parameter list does not match the architecture");
  for (std::size_t i = 0; i < plans.size(); ++i)
    if (params.tensors[i].rows != plans[i].rows || params.tensors[i].cols != plans[i].cols)
      throw ConfigError("parameter tensor " + std::to_string(i) + " has the wrong shape");
  if (graph.value(input).cols != spec.input_width)
    throw ShapeMismatch("input node width does not match the architecture");

  BuiltNetwork built;
  Graph::NodeId cur = input;
  Shape shape{true, spec.input_width, 0, 0};
  std::size_t next_param = 0;
  auto take = [&] {
    Graph::NodeId id = graph.parameter(params.tensors[next_param++]);
    built.parameter_nodes.push_back(id);
    return id;
  };
  auto nonlinearity = [&](Activation a, Graph::NodeId x) {
    switch (a) {
      case Activation::Identity: return x;
      case Activation::Selu: return graph.selu(x);
      case Activation::Softplus: return graph.softplus(x);
      case Activation::Exp: return graph.exponential(x);
    }
    return x;
  };

  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const Layer& layer = spec.layers[i];
    if (const auto* dense = std::get_if<DenseLayer>(&layer)) {
      Graph::NodeId w = take();
      Graph::NodeId b = take();
      cur = graph.add_bias(graph.matmul(cur, w), b);
      cur = nonlinearity(dense->activation, cur);
    } else if (const auto* conv = std::get_if<Conv1dLayer>(&layer)) {
      Graph::NodeId k = take();
      Graph::NodeId b = take();
      const std::size_t out_length = shape.length - conv->width + 1;
      cur = graph.conv1d(cur, k, shape.channels, shape.length, conv->width);
      cur = graph.add_channel_bias(cur, b, conv->channels, out_length);
      cur = nonlinearity(conv->activation, cur);
    }
    // Reshape and flatten only change the interpretation tracked in `shape`.
    shape = advance(shape, layer, i, nullptr);
  }
  built.output = cur;
  return built;
}

std::vector<double> evaluate(const NetworkSpec& spec, const Parameters& params,
                             std::span<const double> input) {
  if (input.size() != spec.input_width) throw ShapeMismatch("input width mismatch");
  const auto plans = plan_parameters(spec);
  if (params.tensors.size() != plans.size())
    throw ConfigError("parameter list does not match the architecture");

  std::vector<double> cur(input.begin(), input.end());
  Shape shape{true, spec.input_width, 0, 0};
  std::size_t next_param = 0;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const Layer& layer = spec.layers[i];
    if (const auto* dense = std::get_if<DenseLayer>(&layer)) {
      const Tensor& w = params.tensors[next_param++];
      const Tensor& b = params.tensors[next_param++];
      std::vector<double> out(dense->units);
      for (std::size_t u = 0; u < dense->units; ++u) {
        double acc = b(0, u);
        for (std::size_t j = 0; j < cur.size(); ++j) acc += cur[j] * w(j, u);
        out[u] = activate(dense->activation, acc);
      }
      cur = std::move(out);
    } else if (const auto* conv = std::get_if<Conv1dLayer>(&layer)) {
      const Tensor& k = params.tensors[next_param++];
      const Tensor& b = params.tensors[next_param++];
      const std::size_t out_length = shape.length - conv->width + 1;
      std::vector<double> out(conv->channels * out_length);
      for (std::size_t co = 0; co < conv->channels; ++co)
        for (std::size_t t = 0; t < out_length; ++t) {
          double acc = b(0, co);
          for (std::size_t ci = 0; ci < shape.channels; ++ci)
            for (std::size_t j = 0; j < conv->width; ++j)
              acc += k(co, ci * conv->width + j) *
                     cur[ci * shape.length + t + conv->width - 1 - j];
          out[co * out_length + t] = activate(conv->activation, acc);
        }
      cur = std::move(out);
    }
    shape = advance(shape, layer, i, nullptr);
  }
  return cur;
}

std::string summarize(const NetworkSpec& spec) {
  std::ostringstream os;
  os << std::left << std::setw(28) << "layer" << std::setw(14) << "output" << "params\n";
  os << std::left << std::setw(28) << "input" << std::setw(14) << spec.input_width << "0\n";

  Shape shape{true, spec.input_width, 0, 0};
  std::size_t total = 0;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const Layer& layer = spec.layers[i];
    std::string name;
    std::size_t count = 0;
    if (const auto* dense = std::get_if<DenseLayer>(&layer)) {
      name = "dense(" + std::to_string(dense->units) + ", " +
             activation_name(dense->activation) + ")";
      count = shape.width * dense->units + dense->units;
    } else if (const auto* conv = std::get_if<Conv1dLayer>(&layer)) {
      name = "conv1d(" + std::to_string(conv->channels) + "x" + std::to_string(conv->width) +
             ", " + activation_name(conv->activation) + ")";
      count = conv->channels * shape.channels * conv->width + conv->channels;
    } else if (const auto* reshape = std::get_if<ReshapeLayer>(&layer)) {
      name = "reshape(" + std::to_string(reshape->channels) + "x" +
             std::to_string(reshape->length) + ")";
    } else {
      name = "flatten";
    }
    shape = advance(shape, layer, i, nullptr);
    std::string dims = shape.flat ? std::to_string(shape.width)
                                  : std::to_string(shape.channels) + "x" +
                                        std::to_string(shape.length);
    os << std::left << std::setw(28) << name << std::setw(14) << dims << count << "\n";
    total += count;
  }
  os << "total parameters: " << total << "\n";
  return os.str();
}

void save_checkpoint(std::ostream& out, const NetworkSpec& spec, const Parameters& params) {
  nlohmann::json j;
  j["format"] = "nctmc.network.v1";
  j["input_width"] = spec.input_width;
  j["layers"] = nlohmann::json::array();
  for (const Layer& layer : spec.layers) j["layers"].push_back(layer_to_json(layer));
  j["parameters"] = nlohmann::json::array();
  for (const Tensor& t : params.tensors) {
    nlohmann::json p;
    p["rows"] = t.rows;
    p["cols"] = t.cols;
    p["data"] = t.data;
    j["parameters"].push_back(std::move(p));
  }
  out << j.dump(2) << "\n";
}

std::pair<NetworkSpec, Parameters> load_checkpoint(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("unreadable checkpoint: ") + e.what());
  }
  if (j.value("format", std::string{}) != "nctmc.network.v1")
    throw ConfigError("not a network checkpoint");

  NetworkSpec spec;
  spec.input_width = j.at("input_width").get<std::size_t>();
  for (const auto& lj : j.at("layers")) spec.layers.push_back(layer_from_json(lj));
  spec.validate();

  Parameters params;
  for (const auto& pj : j.at("parameters")) {
    Tensor t(pj.at("rows").get<std::size_t>(), pj.at("cols").get<std::size_t>());
    t.data = pj.at("data").get<std::vector<double>>();
    if (t.data.size() != t.rows * t.cols) throw ConfigError("parameter tensor size mismatch");
    params.tensors.push_back(std::move(t));
  }

  const auto plans = plan_parameters(spec);
  if (params.tensors.size() != plans.size())
    throw ConfigError("checkpoint parameters do not match the architecture");
  for (std::size_t i = 0; i < plans.size(); ++i)
    if (params.tensors[i].rows != plans[i].rows || params.tensors[i].cols != plans[i].cols)
      throw ConfigError("checkpoint tensor " + std::to_string(i) + " has the wrong shape");
  return {std::move(spec), std::move(params)};
}

}  // namespace nctmc::nn
