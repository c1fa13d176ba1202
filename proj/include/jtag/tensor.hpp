#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "jtag/errors.hpp"
#include "jtag/rng.hpp"

namespace jtag {

// Dense row-major tensor. Also serves as a node in the computation graph:
// ops allocate fresh Tensors for outputs and the tape keeps the producing
// closure alive. `grad` stays empty until the backward pass first touches it.
struct Tensor {
  std::vector<int64_t> shape;
  std::vector<double> data;
  std::vector<double> grad;
  bool requires_grad = false;

  Tensor() = default;
  Tensor(std::vector<int64_t> s, bool rg) : shape(std::move(s)), requires_grad(rg) {
    data.assign(static_cast<size_t>(numel_of(shape)), 0.0);
  }

  int64_t numel() const { return static_cast<int64_t>(data.size()); }

  static int64_t numel_of(const std::vector<int64_t>& s) {
    int64_t n = 1;
    for (int64_t d : s) n *= d;
    return n;
  }

  void ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
  }

  void zero_grad() {
    if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
  }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  double& at(int64_t i) { return data[static_cast<size_t>(i)]; }
  double at(int64_t i) const { return data[static_cast<size_t>(i)]; }
};

using TensorPtr = std::shared_ptr<Tensor>;

inline TensorPtr make_tensor(std::vector<int64_t> shape, bool requires_grad = false) {
  return std::make_shared<Tensor>(std::move(shape), requires_grad);
}

inline TensorPtr make_scalar(double v, bool requires_grad = false) {
  auto t = make_tensor({1}, requires_grad);
  t->data[0] = v;
  return t;
}

inline TensorPtr tensor_from(std::vector<int64_t> shape, std::vector<double> values,
                             bool requires_grad = false) {
  if (Tensor::numel_of(shape) != static_cast<int64_t>(values.size()))
    throw UsageError("tensor_from: shape does not match value count");
  auto t = std::make_shared<Tensor>();
  t->shape = std::move(shape);
  t->data = std::move(values);
  t->requires_grad = requires_grad;
  return t;
}

// Glorot-style uniform init over (-sqrt(6/(fan_in+fan_out)), +...).
inline TensorPtr glorot_matrix(int64_t rows, int64_t cols, Rng& rng, bool requires_grad = true) {
  auto t = make_tensor({rows, cols}, requires_grad);
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  for (double& v : t->data) v = rng.uniform(-bound, bound);
  return t;
}

}  // namespace jtag
