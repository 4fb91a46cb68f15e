#include "nctmc/estimators/glm.hpp"

namespace nctmc {

NeuralPropensityModel make_glm(const SufficientStats& stats,
                               std::vector<std::size_t> input_columns, GlmLink link,
                               std::uint64_t seed, std::vector<std::string> class_labels) {
  InputTransform transform = derive_input_transform(stats, input_columns);
  std::vector<double> output_scale = derive_output_scale(stats);

  nn::NetworkSpec architecture;
  architecture.input_width = transform.columns.size();
  architecture.layers.push_back(nn::DenseLayer{
      output_scale.size(),
      link == GlmLink::Softplus ? nn::Activation::Softplus : nn::Activation::Exp});

  nn::Parameters parameters = nn::initialize_parameters(architecture, seed);
  return NeuralPropensityModel(std::move(architecture), std::move(parameters),
                               std::move(transform), std::move(output_scale), stats.state_width,
                               stats.covariate_width, std::move(class_labels));
}

TrainingResult fit_glm(NeuralPropensityModel& model, std::span<const Trajectory> trajectories,
                       const EquivalenceClasses& classes, const TrainingConfig& config) {
  return train_model(model, trajectories, classes, config);
}

}  // namespace nctmc
