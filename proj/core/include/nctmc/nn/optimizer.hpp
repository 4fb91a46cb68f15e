#pragma once

#include <cstdint>
#include <vector>

#include "nctmc/nn/tensor.hpp"

namespace nctmc::nn {

// First-order updates over a model's parameter tensors. Parameters live
// outside any computation graph so that one optimizer can drive training
// through several per-batch graphs.
class Optimizer {
 public:
  virtual ~Optimizer() = default;
  // `gradients` is parallel to `values` and shape-compatible entry by entry.
  virtual void step(std::vector<Tensor>& values, const std::vector<Tensor>& gradients) = 0;
  virtual void reset() = 0;
};

struct SgdConfig {
  double learning_rate = 1e-3;
};

class Sgd final : public Optimizer {
 public:
  explicit Sgd(SgdConfig config) : config_(config) {}
  void step(std::vector<Tensor>& values, const std::vector<Tensor>& gradients) override;
  void reset() override {}

 private:
  SgdConfig config_;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias-corrected moment estimates; moments are sized lazily on the
// first step and dropped by reset().
class Adam final : public Optimizer {
 public:
  explicit Adam(AdamConfig config) : config_(config) {}
  void step(std::vector<Tensor>& values, const std::vector<Tensor>& gradients) override;
  void reset() override;

 private:
  AdamConfig config_;
  std::vector<Tensor> first_;
  std::vector<Tensor> second_;
  std::uint64_t steps_ = 0;
};

// Euclidean norm across a gradient list.
double gradient_norm(const std::vector<Tensor>& gradients);

}  // namespace nctmc::nn
