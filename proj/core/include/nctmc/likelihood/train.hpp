#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nctmc/core/trajectory.hpp"
#include "nctmc/likelihood/grouped.hpp"
#include "nctmc/likelihood/neural_model.hpp"
#include "nctmc/nn/optimizer.hpp"

namespace nctmc {

enum class StoppingKind {
  DeltaLoss,  // stop when |NLL_prev - NLL| < threshold
  GradNorm,   // stop when the full-dataset gradient norm < threshold
  Plateau,    // stop when the best NLL has not improved for `window` epochs
};

struct StoppingRule {
  StoppingKind kind = StoppingKind::DeltaLoss;
  double threshold = 1e-6;
  std::size_t window = 200;
};

enum class Batching {
  FullDataset,    // one step per epoch over all transitions
  PerTrajectory,  // one step per trajectory, fixed order
};

struct TrainingConfig {
  enum class OptimizerKind { Adam, Sgd };

  std::size_t max_epochs = 20000;
  StoppingRule stopping;
  Batching batching = Batching::FullDataset;
  OptimizerKind optimizer = OptimizerKind::Adam;
  nn::AdamConfig adam;
  nn::SgdConfig sgd;
};

// Convergence is always judged on the full-dataset NLL, measured once per
// epoch after all of the epoch's steps.
struct EpochRecord {
  std::size_t epoch = 0;
  double nll = 0.0;
  double grad_norm = 0.0;
  double wall_seconds = 0.0;  // cumulative since training started
};

struct TrainingResult {
  std::vector<EpochRecord> history;
  double final_nll = 0.0;
  std::size_t epochs = 0;
  std::string stop_reason;  // delta_loss | grad_norm | plateau | max_epochs
};

// Minimizes the exact path NLL in place over the model's parameters.
TrainingResult train_model(NeuralPropensityModel& model,
                           std::span<const Trajectory> trajectories,
                           const EquivalenceClasses& classes, const TrainingConfig& config);

// Same loop over precompressed statistics; `batches` may be empty to train
// full-dataset only.
TrainingResult train_model(NeuralPropensityModel& model, const SufficientStats& full,
                           std::span<const SufficientStats> batches,
                           const TrainingConfig& config);

// Columns: epoch,nll,grad_norm,wall_time
void write_loss_history_csv(std::ostream& out, const std::vector<EpochRecord>& history);

}  // namespace nctmc
