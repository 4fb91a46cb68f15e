#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nctmc/core/propensity.hpp"
#include "nctmc/likelihood/grouped.hpp"
#include "nctmc/nn/graph.hpp"
#include "nctmc/nn/network.hpp"

namespace nctmc {

// Selects network inputs from a packed row [state..., covariates...] and
// standardizes them: z_j = scale_j * x[columns_j] + shift_j.
struct InputTransform {
  std::vector<std::size_t> columns;
  std::vector<double> scale;
  std::vector<double> shift;

  void validate(std::size_t packed_width) const;
};

// Learned class-level propensity function: a feed-forward network over
// standardized inputs whose k-th output is multiplied by a fixed positive
// scale. With a softplus (or exp) head the predicted rates stay positive,
// and the scales put them on the magnitude of the observed mean class
// rates, which keeps raw-count species like 1e5 predators trainable.
class NeuralPropensityModel final : public PropensityModel {
 public:
  NeuralPropensityModel(nn::NetworkSpec architecture, nn::Parameters parameters,
                        InputTransform transform, std::vector<double> output_scale,
                        std::size_t state_width, std::size_t covariate_width,
                        std::vector<std::string> class_labels);

  Level level() const override { return Level::Class; }
  std::size_t output_count() const override { return output_scale_.size(); }
  // Stateless; safe to call from several threads at once.
  bool try_rates(const State& state, const Covariates& covariates,
                 std::span<double> out) const override;

  const nn::NetworkSpec& architecture() const { return architecture_; }
  nn::Parameters& parameters() { return parameters_; }
  const nn::Parameters& parameters() const { return parameters_; }
  const InputTransform& transform() const { return transform_; }
  const std::vector<double>& output_scale() const { return output_scale_; }
  std::size_t state_width() const { return state_width_; }
  std::size_t covariate_width() const { return covariate_width_; }
  const std::vector<std::string>& class_labels() const { return class_labels_; }

  void save(std::ostream& out) const;
  static NeuralPropensityModel load(std::istream& in);

 private:
  nn::NetworkSpec architecture_;
  nn::Parameters parameters_;
  InputTransform transform_;
  std::vector<double> output_scale_;
  std::size_t state_width_;
  std::size_t covariate_width_;
  std::vector<std::string> class_labels_;
};

// Sojourn-weighted column moments over the observed rows; a spread under
// 1e-12 falls back to identity scaling.
InputTransform derive_input_transform(const SufficientStats& stats,
                                      std::vector<std::size_t> columns);

// Mean observed class rates N_k / W; a class never observed gets scale 1.
std::vector<double> derive_output_scale(const SufficientStats& stats);

// Differentiable loss over deduplicated rows:
//   sum_x W_x * sum_k alpha_k(x) - sum_{x,k} N_{x,k} * log alpha_k(x).
// Data enter as graph constants; the caller loads parameter values into
// `parameter_nodes` before each forward/backward pass.
struct LossGraph {
  nn::Graph graph;
  std::vector<nn::Graph::NodeId> parameter_nodes;  // order of Parameters::tensors
  nn::Graph::NodeId loss = -1;
};

LossGraph build_loss_graph(const NeuralPropensityModel& model, const SufficientStats& stats);

}  // namespace nctmc
