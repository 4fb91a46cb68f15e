#include "nctmc/likelihood/train.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>

#include "nctmc/errors.hpp"

namespace nctmc {

namespace {

void load_parameters(LossGraph& lg, const nn::Parameters& params) {
  for (std::size_t i = 0; i < lg.parameter_nodes.size(); ++i)
    lg.graph.mutable_value(lg.parameter_nodes[i]) = params.tensors[i];
}

void collect_gradients(const LossGraph& lg, std::vector<nn::Tensor>& grads) {
  grads.resize(lg.parameter_nodes.size());
  for (std::size_t i = 0; i < lg.parameter_nodes.size(); ++i)
    grads[i] = lg.graph.gradient(lg.parameter_nodes[i]);
}

void check_finite(const std::vector<nn::Tensor>& grads) {
  for (const nn::Tensor& g : grads)
    for (double v : g.data)
      if (!std::isfinite(v)) throw NonFiniteGradient("gradient is not finite");
}

}  // namespace

TrainingResult train_model(NeuralPropensityModel& model,
                           std::span<const Trajectory> trajectories,
                           const EquivalenceClasses& classes, const TrainingConfig& config) {
  const SufficientStats full = compress(trajectories, classes);
  std::vector<SufficientStats> batches;
  if (config.batching == Batching::PerTrajectory) {
    for (const Trajectory& trajectory : trajectories) {
      if (trajectory.transition_count() == 0) continue;
      batches.push_back(compress({&trajectory, 1}, classes));
    }
  }
  return train_model(model, full, batches, config);
}

TrainingResult train_model(NeuralPropensityModel& model, const SufficientStats& full,
                           std::span<const SufficientStats> batches,
                           const TrainingConfig& config) {
  if (config.max_epochs == 0) throw ConfigError("training needs at least one epoch");

  // In full-dataset mode the monitor graph doubles as the step graph; with
  // batches, each gets its own graph and the monitor covers everything.
  LossGraph monitor = build_loss_graph(model, full);
  std::vector<LossGraph> steps;
  steps.reserve(batches.size());
  for (const SufficientStats& b : batches) steps.push_back(build_loss_graph(model, b));

  std::unique_ptr<nn::Optimizer> optimizer;
  if (config.optimizer == TrainingConfig::OptimizerKind::Adam)
    optimizer = std::make_unique<nn::Adam>(config.adam);
  else
    optimizer = std::make_unique<nn::Sgd>(config.sgd);

  TrainingResult result;
  std::vector<nn::Tensor> grads;
  double previous_nll = std::numeric_limits<double>::quiet_NaN();
  double best_nll = std::numeric_limits<double>::infinity();
  std::size_t epochs_since_best = 0;
  const auto start = std::chrono::steady_clock::now();

  auto step_on = [&](LossGraph& step) {
    load_parameters(step, model.parameters());
    step.graph.forward();
    const double loss = step.graph.value(step.loss)(0, 0);
    if (!std::isfinite(loss)) throw NonFiniteLoss("training loss is not finite");
    step.graph.backward(step.loss);
    collect_gradients(step, grads);
    check_finite(grads);
    optimizer->step(model.parameters().tensors, grads);
  };

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    if (steps.empty())
      step_on(monitor);
    else
      for (LossGraph& step : steps) step_on(step);

    load_parameters(monitor, model.parameters());
    monitor.graph.forward();
    const double nll = monitor.graph.value(monitor.loss)(0, 0);
    if (!std::isfinite(nll)) throw NonFiniteLoss("training loss is not finite");
    monitor.graph.backward(monitor.loss);
    collect_gradients(monitor, grads);
    check_finite(grads);
    const double grad_norm = nn::gradient_norm(grads);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.history.push_back(EpochRecord{epoch, nll, grad_norm, wall});

    if (nll < best_nll) {
      best_nll = nll;
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
    }

    bool stop = false;
    switch (config.stopping.kind) {
      case StoppingKind::DeltaLoss:
        stop = std::isfinite(previous_nll) &&
               std::abs(previous_nll - nll) < config.stopping.threshold;
        if (stop) result.stop_reason = "delta_loss";
        break;
      case StoppingKind::GradNorm:
        stop = grad_norm < config.stopping.threshold;
        if (stop) result.stop_reason = "grad_norm";
        break;
      case StoppingKind::Plateau:
        stop = epochs_since_best >= config.stopping.window;
        if (stop) result.stop_reason = "plateau";
        break;
    }
    previous_nll = nll;
    if (stop) break;
  }

  if (result.stop_reason.empty()) result.stop_reason = "max_epochs";
  result.epochs = result.history.size();
  result.final_nll = result.history.empty() ? 0.0 : result.history.back().nll;
  return result;
}

void write_loss_history_csv(std::ostream& out, const std::vector<EpochRecord>& history) {
  out << "epoch,nll,grad_norm,wall_time\n";
  out << std::setprecision(17);
  for (const EpochRecord& r : history)
    out << r.epoch << ',' << r.nll << ',' << r.grad_norm << ',' << r.wall_seconds << '\n';
}

}  // namespace nctmc
