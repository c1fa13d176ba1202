#include "jtag/optim.hpp"

#include <cmath>

#include "jtag/errors.hpp"

namespace jtag {

void ParameterSet::add(const std::string& name, TensorPtr t) {
  for (const auto& [existing, _] : items_)
    if (existing == name) throw UsageError("ParameterSet: duplicate name " + name);
  items_.emplace_back(name, std::move(t));
}

TensorPtr ParameterSet::find(const std::string& name) const {
  for (const auto& [n, t] : items_)
    if (n == name) return t;
  return nullptr;
}

int64_t ParameterSet::total_params() const {
  int64_t n = 0;
  for (const auto& [_, t] : items_) n += t->numel();
  return n;
}

int64_t ParameterSet::total_params_with_prefix(const std::string& prefix) const {
  int64_t n = 0;
  for (const auto& [name, t] : items_)
    if (name.rfind(prefix, 0) == 0) n += t->numel();
  return n;
}

void ParameterSet::zero_grads() {
  for (const auto& [_, t] : items_) t->zero_grad();
}

std::vector<std::vector<double>> ParameterSet::snapshot_values() const {
  std::vector<std::vector<double>> snap;
  snap.reserve(items_.size());
  for (const auto& [_, t] : items_) snap.push_back(t->data);
  return snap;
}

void ParameterSet::restore_values(const std::vector<std::vector<double>>& snapshot) {
  if (snapshot.size() != items_.size())
    throw UsageError("ParameterSet: snapshot size mismatch");
  for (size_t i = 0; i < items_.size(); ++i) {
    if (snapshot[i].size() != items_[i].second->data.size())
      throw UsageError("ParameterSet: snapshot tensor size mismatch at " + items_[i].first);
    items_[i].second->data = snapshot[i];
  }
}

double global_grad_norm(const ParameterSet& params) {
  double sq = 0.0;
  for (const auto& [_, t] : params.items())
    for (double gv : t->grad) sq += gv * gv;
  return std::sqrt(sq);
}

void clip_gradients(ParameterSet& params, double max_norm) {
  const double norm = global_grad_norm(params);
  if (norm <= max_norm || norm == 0.0) return;
  const double factor = max_norm / norm;
  for (const auto& [_, t] : params.items())
    for (double& gv : t->grad) gv *= factor;
}

Adam::Adam(const ParameterSet& params, AdamConfig cfg) : cfg_(cfg) {
  first_moment_.reserve(params.size());
  second_moment_.reserve(params.size());
  for (const auto& [_, t] : params.items()) {
    first_moment_.emplace_back(t->data.size(), 0.0);
    second_moment_.emplace_back(t->data.size(), 0.0);
  }
}

void Adam::step(ParameterSet& params) {
  if (params.size() != first_moment_.size())
    throw UsageError("Adam: parameter set does not match optimizer state");
  ++step_count_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_count_));
  for (size_t p = 0; p < params.size(); ++p) {
    const auto& [name, t] = params.items()[p];
    if (t->grad.empty()) continue;  // untouched this step
    auto& m = first_moment_[p];
    auto& v = second_moment_[p];
    for (size_t i = 0; i < t->data.size(); ++i) {
      const double grad = t->grad[i];
      if (!std::isfinite(grad))
        throw NumericError("Adam: non-finite gradient in parameter '" + name + "' at index " +
                           std::to_string(i));
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * grad;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * grad * grad;
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      t->data[i] -= cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
    }
  }
}

}  // namespace jtag
