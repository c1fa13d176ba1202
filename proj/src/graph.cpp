#include "jtag/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "jtag/lstm.hpp"

namespace jtag {

namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Gradient pointer of a tensor, or nullptr when no downstream op touched it.
inline const double* grad_or_null(const TensorPtr& t) {
  return t->grad.empty() ? nullptr : t->grad.data();
}

inline void check_same_shape(const TensorPtr& a, const TensorPtr& b, const char* op) {
  if (a->shape != b->shape) throw UsageError(std::string(op) + ": shape mismatch");
}

}  // namespace

TensorPtr matvec(Graph& g, const TensorPtr& W, const TensorPtr& x) {
  if (W->shape.size() != 2 || x->shape.size() != 1 || W->shape[1] != x->shape[0])
    throw UsageError("matvec: expected W[m,n] and x[n]");
  const int64_t m = W->shape[0], n = W->shape[1];
  auto y = make_tensor({m});
  const double* wp = W->data.data();
  const double* xp = x->data.data();
  for (int64_t i = 0; i < m; ++i) {
    const double* row = wp + i * n;
    double acc = 0.0;
    for (int64_t j = 0; j < n; ++j) acc += row[j] * xp[j];
    y->data[static_cast<size_t>(i)] = acc;
  }
  if (g.should_record(W, x)) {
    y->requires_grad = true;
    g.tape.record([W, x, y, m, n]() {
      const double* dy = grad_or_null(y);
      if (!dy) return;
      if (W->requires_grad) {
        W->ensure_grad();
        const double* xp = x->data.data();
        for (int64_t i = 0; i < m; ++i) {
          double* drow = W->grad.data() + i * n;
          const double d = dy[i];
          for (int64_t j = 0; j < n; ++j) drow[j] += d * xp[j];
        }
      }
      if (x->requires_grad) {
        x->ensure_grad();
        const double* wp = W->data.data();
        double* dx = x->grad.data();
        for (int64_t i = 0; i < m; ++i) {
          const double* row = wp + i * n;
          const double d = dy[i];
          for (int64_t j = 0; j < n; ++j) dx[j] += d * row[j];
        }
      }
    });
  }
  return y;
}

TensorPtr affine(Graph& g, const TensorPtr& W, const TensorPtr& x, const TensorPtr& b) {
  auto y = matvec(g, W, x);
  return add(g, y, b);
}

TensorPtr add(Graph& g, const TensorPtr& a, const TensorPtr& b) {
  check_same_shape(a, b, "add");
  auto y = make_tensor(a->shape);
  for (size_t i = 0; i < y->data.size(); ++i) y->data[i] = a->data[i] + b->data[i];
  if (g.should_record(a, b)) {
    y->requires_grad = true;
    g.tape.record([a, b, y]() {
      const double* dy = grad_or_null(y);
      if (!dy) return;
      for (const TensorPtr& t : {a, b}) {
        if (!t->requires_grad) continue;
        t->ensure_grad();
        for (size_t i = 0; i < t->grad.size(); ++i) t->grad[i] += dy[i];
      }
    });
  }
  return y;
}

TensorPtr add_many(Graph& g, const std::vector<TensorPtr>& xs) {
  if (xs.empty()) throw UsageError("add_many: empty input");
  auto y = make_tensor(xs[0]->shape);
  bool any_grad = false;
  for (const auto& x : xs) {
    check_same_shape(xs[0], x, "add_many");
    for (size_t i = 0; i < y->data.size(); ++i) y->data[i] += x->data[i];
    any_grad = any_grad || x->requires_grad;
  }
  if (g.grad_enabled && any_grad) {
    y->requires_grad = true;
    g.tape.record([xs, y]() {
      const double* dy = grad_or_null(y);
      if (!dy) return;
      for (const auto& x : xs) {
        if (!x->requires_grad) continue;
        x->ensure_grad();
        for (size_t i = 0; i < x->grad.size(); ++i) x->grad[i] += dy[i];
      }
    });
  }
  return y;
}

TensorPtr mul(Graph& g, const TensorPtr& a, const TensorPtr& b) {
  check_same_shape(a, b, "mul");
  auto y = make_tensor(a->shape);
  for (size_t i = 0; i < y->data.size(); ++i) y->data[i] = a->data[i] * b->data[i];
  if (g.should_record(a, b)) {
    y->requires_grad = true;
    g.tape.record([a, b, y]() {
      const double* dy = grad_or_null(y);
      if (!dy) return;
      if (a->requires_grad) {
        a->ensure_grad();
        for (size_t i = 0; i < a->grad.size(); ++i) a->grad[i] += dy[i] * b->data[i];
      }
      if (b->requires_grad) {
        b->ensure_grad();
        for (size_t i = 0; i < b->grad.size(); ++i) b->grad[i] += dy[i] * a->data[i];
      }
    });
  }
  return y;
}

TensorPtr concat(Graph& g, const std::vector<TensorPtr>& parts) {
  if (parts.empty()) throw UsageError("concat: empty input");
  int64_t total = 0;
  bool any_grad = false;
  for (const auto& p : parts) {
    if (p->shape.size() != 1) throw UsageError("concat: expects 1-D parts");
    total += p->shape[0];
    any_grad = any_grad || p->requires_grad;
  }
  auto y = make_tensor({total});
  int64_t off = 0;
  for (const auto& p : parts) {
    std::memcpy(y->data.data() + off, p->data.data(), p->data.size() * sizeof(double));
    off += p->numel();
  }
  if (g.grad_enabled && any_grad) {
    y->requires_grad = true;
    g.tape.record([parts, y]() {
      const double* dy = grad_or_null(y);
      if (!dy) return;
      int64_t off = 0;
      for (const auto& p : parts) {
        if (p->requires_grad) {
          p->ensure_grad();
          for (int64_t i = 0; i < p->numel(); ++i) p->grad[static_cast<size_t>(i)] += dy[off + i];
        }
        off += p->numel();
      }
    });
  }
  return y;
}

TensorPtr embed(Graph& g, const TensorPtr& table, int64_t row) {
  if (table->shape.size() != 2) throw UsageError("embed: table must be [V,d]");
  if (row < 0 || row >= table->shape[0]) throw DataError("embed: row index out of range");
  const int64_t d = table->shape[1];
  auto y = make_tensor({d});
  std::memcpy(y->data.data(), table->data.data() + row * d, static_cast<size_t>(d) * sizeof(double));
  if (g.should_record(table)) {
    y->requires_grad = true;
    g.tape.record([table, y, row, d]() {
      const double* dy = grad_or_null(y);
      if (!dy) return;
      table->ensure_grad();
      double* dt = table->grad.data() + row * d;
      for (int64_t i = 0; i < d; ++i) dt[i] += dy[i];
    });
  }
  return y;
}

TensorPtr softmax(Graph& g, const TensorPtr& logits) {
  if (logits->shape.size() != 1 || logits->shape[0] < 1)
    throw UsageError("softmax: expects a non-empty 1-D tensor");
  const size_t k = logits->data.size();
  auto y = make_tensor(logits->shape);
  const double mx = *std::max_element(logits->data.begin(), logits->data.end());
  double z = 0.0;
  for (size_t i = 0; i < k; ++i) {
    y->data[i] = std::exp(logits->data[i] - mx);
    z += y->data[i];
  }
  for (size_t i = 0; i < k; ++i) y->data[i] /= z;
  if (g.should_record(logits)) {
    y->requires_grad = true;
    g.tape.record([logits, y]() {
      const double* dy = grad_or_null(y);
      if (!dy) return;
      logits->ensure_grad();
      double inner = 0.0;
      for (size_t i = 0; i < y->data.size(); ++i) inner += dy[i] * y->data[i];
      for (size_t i = 0; i < y->data.size(); ++i)
        logits->grad[i] += y->data[i] * (dy[i] - inner);
    });
  }
  return y;
}

TensorPtr cross_entropy(Graph& g, const TensorPtr& probs, int64_t gold) {
  if (probs->shape.size() != 1) throw UsageError("cross_entropy: expects 1-D probs");
  if (gold < 0 || gold >= probs->shape[0])
    throw DataError("cross_entropy: gold index " + std::to_string(gold) + " out of range [0," +
                    std::to_string(probs->shape[0]) + ")");
  // Clamp keeps the loss and its gradient finite even for a vanishing
  // gold probability.
  const double p = std::max(probs->data[static_cast<size_t>(gold)], 1e-290);
  auto loss = make_scalar(-std::log(p));
  if (g.should_record(probs)) {
    loss->requires_grad = true;
    g.tape.record([probs, loss, gold, p]() {
      const double* dl = grad_or_null(loss);
      if (!dl) return;
      probs->ensure_grad();
      probs->grad[static_cast<size_t>(gold)] += dl[0] * (-1.0 / p);
    });
  }
  return loss;
}

TensorPtr dropout(Graph& g, const TensorPtr& x, double rate, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) throw UsageError("dropout: rate must be in [0,1)");
  if (!g.training || rate == 0.0) return x;
  const double scale = 1.0 / (1.0 - rate);
  auto y = make_tensor(x->shape);
  std::vector<double> mask(x->data.size());
  for (size_t i = 0; i < mask.size(); ++i) {
    mask[i] = rng.bernoulli(rate) ? 0.0 : scale;
    y->data[i] = x->data[i] * mask[i];
  }
  if (g.should_record(x)) {
    y->requires_grad = true;
    g.tape.record([x, y, mask = std::move(mask)]() {
      const double* dy = grad_or_null(y);
      if (!dy) return;
      x->ensure_grad();
      for (size_t i = 0; i < mask.size(); ++i) x->grad[i] += dy[i] * mask[i];
    });
  }
  return y;
}

TensorPtr sum(Graph& g, const TensorPtr& x) {
  auto y = make_scalar(0.0);
  for (double v : x->data) y->data[0] += v;
  if (g.should_record(x)) {
    y->requires_grad = true;
    g.tape.record([x, y]() {
      const double* dy = grad_or_null(y);
      if (!dy) return;
      x->ensure_grad();
      for (size_t i = 0; i < x->grad.size(); ++i) x->grad[i] += dy[0];
    });
  }
  return y;
}

TensorPtr dot(Graph& g, const TensorPtr& a, const TensorPtr& b) {
  check_same_shape(a, b, "dot");
  auto y = make_scalar(0.0);
  for (size_t i = 0; i < a->data.size(); ++i) y->data[0] += a->data[i] * b->data[i];
  if (g.should_record(a, b)) {
    y->requires_grad = true;
    g.tape.record([a, b, y]() {
      const double* dy = grad_or_null(y);
      if (!dy) return;
      if (a->requires_grad) {
        a->ensure_grad();
        for (size_t i = 0; i < a->grad.size(); ++i) a->grad[i] += dy[0] * b->data[i];
      }
      if (b->requires_grad) {
        b->ensure_grad();
        for (size_t i = 0; i < b->grad.size(); ++i) b->grad[i] += dy[0] * a->data[i];
      }
    });
  }
  return y;
}

TensorPtr scale(Graph& g, const TensorPtr& x, double c) {
  auto y = make_tensor(x->shape);
  for (size_t i = 0; i < y->data.size(); ++i) y->data[i] = c * x->data[i];
  if (g.should_record(x)) {
    y->requires_grad = true;
    g.tape.record([x, y, c]() {
      const double* dy = grad_or_null(y);
      if (!dy) return;
      x->ensure_grad();
      for (size_t i = 0; i < x->grad.size(); ++i) x->grad[i] += c * dy[i];
    });
  }
  return y;
}

TensorPtr detach(Graph&, const TensorPtr& x) {
  auto y = make_tensor(x->shape);
  y->data = x->data;
  return y;
}

std::pair<TensorPtr, TensorPtr> lstm_step(Graph& g, const LstmCellParams& params,
                                          const TensorPtr& x, const TensorPtr& h_prev,
                                          const TensorPtr& c_prev) {
  const int64_t H = params.hidden_size, D = params.input_size;
  if (params.input_weights->shape != std::vector<int64_t>{4 * H, D} ||
      params.recurrent_weights->shape != std::vector<int64_t>{4 * H, H} ||
      params.bias->shape != std::vector<int64_t>{4 * H})
    throw UsageError("lstm_step: parameter shapes do not match H/D");
  if (x->shape != std::vector<int64_t>{D} || h_prev->shape != std::vector<int64_t>{H} ||
      c_prev->shape != std::vector<int64_t>{H})
    throw UsageError("lstm_step: input shapes do not match H/D");

  // pre = Wx x + Wh h_prev + b, rows blocked as [i | f | g | o].
  std::vector<double> pre(params.bias->data);
  {
    const double* wx = params.input_weights->data.data();
    const double* wh = params.recurrent_weights->data.data();
    const double* xp = x->data.data();
    const double* hp = h_prev->data.data();
    for (int64_t r = 0; r < 4 * H; ++r) {
      const double* xrow = wx + r * D;
      double acc = 0.0;
      for (int64_t j = 0; j < D; ++j) acc += xrow[j] * xp[j];
      const double* hrow = wh + r * H;
      for (int64_t j = 0; j < H; ++j) acc += hrow[j] * hp[j];
      pre[static_cast<size_t>(r)] += acc;
    }
  }

  std::vector<double> gate_i(H), gate_f(H), gate_g(H), gate_o(H), tanh_c(H);
  auto h = make_tensor({H});
  auto c = make_tensor({H});
  for (int64_t k = 0; k < H; ++k) {
    gate_i[k] = sigmoid(pre[static_cast<size_t>(k)]);
    gate_f[k] = sigmoid(pre[static_cast<size_t>(H + k)]);
    gate_g[k] = std::tanh(pre[static_cast<size_t>(2 * H + k)]);
    gate_o[k] = sigmoid(pre[static_cast<size_t>(3 * H + k)]);
    c->data[static_cast<size_t>(k)] = gate_f[k] * c_prev->data[static_cast<size_t>(k)] +
                                      gate_i[k] * gate_g[k];
    tanh_c[k] = std::tanh(c->data[static_cast<size_t>(k)]);
    h->data[static_cast<size_t>(k)] = gate_o[k] * tanh_c[k];
  }

  const bool rec = g.grad_enabled &&
                   (params.input_weights->requires_grad || params.recurrent_weights->requires_grad ||
                    params.bias->requires_grad || x->requires_grad || h_prev->requires_grad ||
                    c_prev->requires_grad);
  if (rec) {
    h->requires_grad = true;
    c->requires_grad = true;
    TensorPtr Wx = params.input_weights, Wh = params.recurrent_weights, b = params.bias;
    g.tape.record([Wx, Wh, b, x, h_prev, c_prev, h, c, H, D, gate_i = std::move(gate_i),
                   gate_f = std::move(gate_f), gate_g = std::move(gate_g),
                   gate_o = std::move(gate_o), tanh_c = std::move(tanh_c)]() {
      const double* dh = grad_or_null(h);
      const double* dc_out = grad_or_null(c);
      if (!dh && !dc_out) return;

      std::vector<double> dpre(static_cast<size_t>(4 * H));
      std::vector<double> dc(static_cast<size_t>(H));
      for (int64_t k = 0; k < H; ++k) {
        const double dh_k = dh ? dh[k] : 0.0;
        const double dc_k = (dc_out ? dc_out[k] : 0.0) +
                            dh_k * gate_o[k] * (1.0 - tanh_c[k] * tanh_c[k]);
        dc[static_cast<size_t>(k)] = dc_k;
        const double di = dc_k * gate_g[k];
        const double df = dc_k * c_prev->data[static_cast<size_t>(k)];
        const double dg = dc_k * gate_i[k];
        const double do_ = dh_k * tanh_c[k];
        dpre[static_cast<size_t>(k)] = di * gate_i[k] * (1.0 - gate_i[k]);
        dpre[static_cast<size_t>(H + k)] = df * gate_f[k] * (1.0 - gate_f[k]);
        dpre[static_cast<size_t>(2 * H + k)] = dg * (1.0 - gate_g[k] * gate_g[k]);
        dpre[static_cast<size_t>(3 * H + k)] = do_ * gate_o[k] * (1.0 - gate_o[k]);
      }

      if (b->requires_grad) {
        b->ensure_grad();
        for (int64_t r = 0; r < 4 * H; ++r) b->grad[static_cast<size_t>(r)] += dpre[static_cast<size_t>(r)];
      }
      if (Wx->requires_grad) {
        Wx->ensure_grad();
        const double* xp = x->data.data();
        for (int64_t r = 0; r < 4 * H; ++r) {
          double* row = Wx->grad.data() + r * D;
          const double d = dpre[static_cast<size_t>(r)];
          for (int64_t j = 0; j < D; ++j) row[j] += d * xp[j];
        }
      }
      if (Wh->requires_grad) {
        Wh->ensure_grad();
        const double* hp = h_prev->data.data();
        for (int64_t r = 0; r < 4 * H; ++r) {
          double* row = Wh->grad.data() + r * H;
          const double d = dpre[static_cast<size_t>(r)];
          for (int64_t j = 0; j < H; ++j) row[j] += d * hp[j];
        }
      }
      if (x->requires_grad) {
        x->ensure_grad();
        const double* wx = Wx->data.data();
        double* dx = x->grad.data();
        for (int64_t r = 0; r < 4 * H; ++r) {
          const double* row = wx + r * D;
          const double d = dpre[static_cast<size_t>(r)];
          for (int64_t j = 0; j < D; ++j) dx[j] += d * row[j];
        }
      }
      if (h_prev->requires_grad) {
        h_prev->ensure_grad();
        const double* wh = Wh->data.data();
        double* dhp = h_prev->grad.data();
        for (int64_t r = 0; r < 4 * H; ++r) {
          const double* row = wh + r * H;
          const double d = dpre[static_cast<size_t>(r)];
          for (int64_t j = 0; j < H; ++j) dhp[j] += d * row[j];
        }
      }
      if (c_prev->requires_grad) {
        c_prev->ensure_grad();
        for (int64_t k = 0; k < H; ++k)
          c_prev->grad[static_cast<size_t>(k)] += dc[static_cast<size_t>(k)] * gate_f[k];
      }
    });
  }
  return {h, c};
}

}  // namespace jtag
