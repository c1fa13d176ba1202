#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "jtag/tensor.hpp"

namespace jtag {

// Ordered, named collection of trainable tensors. Order is fixed at
// construction and shared by checkpoints and optimizer state.
class ParameterSet {
 public:
  void add(const std::string& name, TensorPtr t);
  TensorPtr find(const std::string& name) const;

  const std::vector<std::pair<std::string, TensorPtr>>& items() const { return items_; }
  size_t size() const { return items_.size(); }
  int64_t total_params() const;
  int64_t total_params_with_prefix(const std::string& prefix) const;

  void zero_grads();

  // Deep copy of the current values (shapes and names preserved).
  std::vector<std::vector<double>> snapshot_values() const;
  void restore_values(const std::vector<std::vector<double>>& snapshot);

 private:
  std::vector<std::pair<std::string, TensorPtr>> items_;
};

// sqrt(sum of squared gradient entries) across the whole set.
double global_grad_norm(const ParameterSet& params);

// Scales all gradients so the global norm does not exceed max_norm.
void clip_gradients(ParameterSet& params, double max_norm);

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias-corrected first/second moments, one slot pair per parameter.
class Adam {
 public:
  Adam(const ParameterSet& params, AdamConfig cfg = {});

  // Applies one update from the accumulated gradients. A non-finite gradient
  // aborts with a diagnostic naming the parameter.
  void step(ParameterSet& params);

  int64_t step_count() const { return step_count_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  int64_t step_count_ = 0;
  std::vector<std::vector<double>> first_moment_;
  std::vector<std::vector<double>> second_moment_;
};

}  // namespace jtag
