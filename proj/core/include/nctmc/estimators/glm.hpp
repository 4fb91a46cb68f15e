#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nctmc/likelihood/neural_model.hpp"
#include "nctmc/likelihood/train.hpp"

namespace nctmc {

enum class GlmLink { Softplus, Exp };

// Generalized linear baseline: alpha_k(x) = c_k * link(w_k . z + b_k) over
// the same standardized inputs and output scales as the neural model. It is
// a one-layer NeuralPropensityModel, so fitting shares the exact-NLL
// training stack.
NeuralPropensityModel make_glm(const SufficientStats& stats,
                               std::vector<std::size_t> input_columns, GlmLink link,
                               std::uint64_t seed, std::vector<std::string> class_labels = {});

TrainingResult fit_glm(NeuralPropensityModel& model, std::span<const Trajectory> trajectories,
                       const EquivalenceClasses& classes, const TrainingConfig& config);

}  // namespace nctmc
