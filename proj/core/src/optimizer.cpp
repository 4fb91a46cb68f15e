#include "nctmc/nn/optimizer.hpp"

#include <cmath>

#include "nctmc/errors.hpp"

namespace nctmc::nn {

namespace {

void check_shapes(const std::vector<Tensor>& values, const std::vector<Tensor>& gradients) {
  if (values.size() != gradients.size())
    throw ShapeMismatch("optimizer: gradient list does not match parameters");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!values[i].same_shape(gradients[i]))
      throw ShapeMismatch("optimizer: gradient tensor shape mismatch");
}

}  // namespace

void Sgd::step(std::vector<Tensor>& values, const std::vector<Tensor>& gradients) {
  check_shapes(values, gradients);
  for (std::size_t p = 0; p < values.size(); ++p)
    for (std::size_t i = 0; i < values[p].size(); ++i)
      values[p].data[i] -= config_.learning_rate * gradients[p].data[i];
}

void Adam::step(std::vector<Tensor>& values, const std::vector<Tensor>& gradients) {
  check_shapes(values, gradients);
  if (first_.empty()) {
    for (const Tensor& t : values) {
      first_.emplace_back(t.rows, t.cols);
      second_.emplace_back(t.rows, t.cols);
    }
  }
  if (first_.size() != values.size())
    throw Error("optimizer state does not match the parameter list");

  ++steps_;
  const double correct1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
  const double correct2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
  for (std::size_t p = 0; p < values.size(); ++p) {
    Tensor& value = values[p];
    const Tensor& grad = gradients[p];
    Tensor& m = first_[p];
    Tensor& v = second_[p];
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = grad.data[i];
      m.data[i] = config_.beta1 * m.data[i] + (1.0 - config_.beta1) * g;
      v.data[i] = config_.beta2 * v.data[i] + (1.0 - config_.beta2) * g * g;
      const double m_hat = m.data[i] / correct1;
      const double v_hat = v.data[i] / correct2;
      value.data[i] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

void Adam::reset() {
  first_.clear();
  second_.clear();
  steps_ = 0;
}

double gradient_norm(const std::vector<Tensor>& gradients) {
  double sum = 0.0;
  for (const Tensor& g : gradients)
    for (double v : g.data) sum += v * v;
  return std::sqrt(sum);
}

}  // namespace nctmc::nn
