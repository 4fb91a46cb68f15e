#pragma once

#include <cstddef>
#include <vector>

namespace nctmc::nn {

// Dense row-major matrix of doubles. Row vectors double as biases and
// per-column constants; a 1x1 tensor carries scalar losses.
struct Tensor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::size_t size() const { return data.size(); }
  bool same_shape(const Tensor& other) const { return rows == other.rows && cols == other.cols; }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }

  static Tensor row(std::vector<double> values) {
    Tensor t;
    t.rows = 1;
    t.cols = values.size();
    t.data = std::move(values);
    return t;
  }
};

}  // namespace nctmc::nn
