#include "nctmc/likelihood/neural_model.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "json.hpp"
#include "nctmc/errors.hpp"

namespace nctmc {

void InputTransform::validate(std::size_t packed_width) const {
  if (columns.empty()) throw ConfigError("input transform selects no columns");
  if (scale.size() != columns.size() || shift.size() != columns.size())
    throw ConfigError("input transform constants do not match the column list");
  for (std::size_t c : columns)
    if (c >= packed_width)
      throw ConfigError("input transform selects column " + std::to_string(c) +
                        " beyond the packed row width " + std::to_string(packed_width));
}

NeuralPropensityModel::NeuralPropensityModel(nn::NetworkSpec architecture,
                                             nn::Parameters parameters, InputTransform transform,
                                             std::vector<double> output_scale,
                                             std::size_t state_width, std::size_t covariate_width,
                                             std::vector<std::string> class_labels)
    : architecture_(std::move(architecture)),
      parameters_(std::move(parameters)),
      transform_(std::move(transform)),
      output_scale_(std::move(output_scale)),
      state_width_(state_width),
      covariate_width_(covariate_width),
      class_labels_(std::move(class_labels)) {
  architecture_.validate();
  transform_.validate(state_width_ + covariate_width_);
  if (architecture_.input_width != transform_.columns.size())
    throw ConfigError("network input width does not match the selected columns");
  if (architecture_.output_width() != output_scale_.size())
    throw ConfigError("network output width does not match the class count");
  if (!class_labels_.empty() && class_labels_.size() != output_scale_.size())
    throw ConfigError("class labels do not match the class count");
  for (double c : output_scale_)
    if (!(c > 0.0)) throw ConfigError("output scales must be positive");
}

bool NeuralPropensityModel::try_rates(const State& state, const Covariates& covariates,
                                      std::span<double> out) const {
  if (state.size() != state_width_ || covariates.size() != covariate_width_)
    throw ShapeMismatch("state or covariate width does not match the model");
  if (out.size() != output_scale_.size())
    throw ShapeMismatch("output span does not match the class count");

  std::vector<double> z(transform_.columns.size());
  for (std::size_t j = 0; j < transform_.columns.size(); ++j) {
    const std::size_t c = transform_.columns[j];
    const double raw = c < state_width_ ? static_cast<double>(state[c])
                                        : covariates[c - state_width_];
    z[j] = transform_.scale[j] * raw + transform_.shift[j];
  }
  const std::vector<double> head = nn::evaluate(architecture_, parameters_, z);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = output_scale_[k] * head[k];
  return true;
}

void NeuralPropensityModel::save(std::ostream& out) const {
  std::ostringstream net;
  nn::save_checkpoint(net, architecture_, parameters_);
  nlohmann::json j;
  j["format"] = "nctmc.model.v1";
  j["state_width"] = state_width_;
  j["covariate_width"] = covariate_width_;
  j["class_labels"] = class_labels_;
  j["input_columns"] = transform_.columns;
  j["input_scale"] = transform_.scale;
  j["input_shift"] = transform_.shift;
  j["output_scale"] = output_scale_;
  std::istringstream reparse(net.str());
  reparse >> j["network"];
  out << j.dump(2) << "\n";
}

NeuralPropensityModel NeuralPropensityModel::load(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("unreadable model file: ") + e.what());
  }
  if (j.value("format", std::string{}) != "nctmc.model.v1")
    throw ConfigError("not a propensity model file");

  std::istringstream net(j.at("network").dump());
  auto [architecture, parameters] = nn::load_checkpoint(net);

  InputTransform transform;
  transform.columns = j.at("input_columns").get<std::vector<std::size_t>>();
  transform.scale = j.at("input_scale").get<std::vector<double>>();
  transform.shift = j.at("input_shift").get<std::vector<double>>();

  return NeuralPropensityModel(
      std::move(architecture), std::move(parameters), std::move(transform),
      j.at("output_scale").get<std::vector<double>>(), j.at("state_width").get<std::size_t>(),
      j.at("covariate_width").get<std::size_t>(),
      j.at("class_labels").get<std::vector<std::string>>());
}

InputTransform derive_input_transform(const SufficientStats& stats,
                                      std::vector<std::size_t> columns) {
  if (stats.row_count() == 0 || !(stats.total_wait > 0.0))
    throw ConfigError("cannot derive an input transform from empty statistics");
  InputTransform t;
  t.columns = std::move(columns);
  t.scale.resize(t.columns.size());
  t.shift.resize(t.columns.size());
  t.validate(stats.input_width());

  for (std::size_t j = 0; j < t.columns.size(); ++j) {
    const std::size_t c = t.columns[j];
    double mean = 0.0;
    for (std::size_t r = 0; r < stats.rows.rows; ++r)
      mean += stats.waits[r] * stats.rows(r, c);
    mean /= stats.total_wait;
    double var = 0.0;
    for (std::size_t r = 0; r < stats.rows.rows; ++r) {
      const double d = stats.rows(r, c) - mean;
      var += stats.waits[r] * d * d;
    }
    var /= stats.total_wait;
    const double spread = std::sqrt(var);
    if (spread < 1e-12) {
      t.scale[j] = 1.0;
      t.shift[j] = -mean;
    } else {
      t.scale[j] = 1.0 / spread;
      t.shift[j] = -mean / spread;
    }
  }
  return t;
}

std::vector<double> derive_output_scale(const SufficientStats& stats) {
  if (!(stats.total_wait > 0.0))
    throw ConfigError("cannot derive output scales from empty statistics");
  std::vector<double> scale(stats.counts.cols, 1.0);
  for (std::size_t k = 0; k < stats.counts.cols; ++k) {
    double events = 0.0;
    for (std::size_t r = 0; r < stats.counts.rows; ++r) events += stats.counts(r, k);
    if (events > 0.0) scale[k] = events / stats.total_wait;
  }
  return scale;
}

LossGraph build_loss_graph(const NeuralPropensityModel& model, const SufficientStats& stats) {
  if (stats.row_count() == 0) throw ConfigError("no transitions to build a loss over");
  if (stats.input_width() != model.state_width() + model.covariate_width())
    throw ShapeMismatch("statistics row width does not match the model");
  if (stats.counts.cols != model.output_count())
    throw ShapeMismatch("statistics class count does not match the model");

  const InputTransform& t = model.transform();
  const std::size_t width = t.columns.size();
  const std::size_t class_count = model.output_count();

  // The loss only sees the selected columns, so rows that collide after
  // selection regroup exactly once more. When a model ignores the state
  // (e.g. covariate-only rates) this collapses the dataset to a handful of
  // rows regardless of trajectory length.
  std::map<std::vector<double>, std::size_t> index;
  std::vector<std::vector<double>> unique_rows;
  std::vector<double> waits;
  std::vector<std::vector<double>> counts;
  std::vector<double> key(width);
  for (std::size_t r = 0; r < stats.row_count(); ++r) {
    for (std::size_t j = 0; j < width; ++j) key[j] = stats.rows(r, t.columns[j]);
    auto [it, inserted] = index.try_emplace(key, unique_rows.size());
    if (inserted) {
      unique_rows.push_back(key);
      waits.push_back(0.0);
      counts.emplace_back(class_count, 0.0);
    }
    waits[it->second] += stats.waits[r];
    for (std::size_t k = 0; k < class_count; ++k) counts[it->second][k] += stats.counts(r, k);
  }

  const std::size_t rows = unique_rows.size();
  nn::Tensor selected(rows, width);
  nn::Tensor wait_weights(rows, class_count);
  nn::Tensor count_weights(rows, class_count);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < width; ++j) selected(r, j) = unique_rows[r][j];
    for (std::size_t k = 0; k < class_count; ++k) {
      wait_weights(r, k) = waits[r];
      count_weights(r, k) = counts[r][k];
    }
  }

  LossGraph out;
  nn::Graph& g = out.graph;
  const auto x = g.constant(std::move(selected));
  const auto z = g.affine_columns(x, t.scale, t.shift);
  const nn::BuiltNetwork net = nn::build_network(g, z, model.architecture(), model.parameters());
  out.parameter_nodes = net.parameter_nodes;
  const auto alpha =
      g.affine_columns(net.output, model.output_scale(), std::vector<double>(class_count, 0.0));
  const auto sojourn_term = g.weighted_sum(alpha, g.constant(std::move(wait_weights)));
  const auto log_term = g.weighted_sum(g.logarithm(alpha), g.constant(std::move(count_weights)));
  out.loss = g.subtract(sojourn_term, log_term);
  return out;
}

}  // namespace nctmc
