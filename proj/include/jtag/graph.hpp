#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "jtag/tensor.hpp"

namespace jtag {

// Ordered record of executed ops. Ops push their backward closure at
// execution time, so reverse iteration is a valid reverse topological order.
class Tape {
 public:
  void record(std::function<void()> backward) { ops_.push_back(std::move(backward)); }

  size_t size() const { return ops_.size(); }

  void clear() { ops_.clear(); }

  // Seeds d(loss)/d(loss) = 1 and replays the tape in reverse. Gradients
  // accumulate (+=) into every recorded input, so reusing a tensor in two
  // places yields the sum of both path gradients.
  void backward_from(const TensorPtr& loss) {
    if (loss->numel() != 1) throw UsageError("backward: loss must be a scalar");
    loss->ensure_grad();
    loss->grad[0] += 1.0;
    for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
  }

 private:
  std::vector<std::function<void()>> ops_;
};

// Execution context for one forward/backward pass. `training` switches
// dropout on; `grad_enabled` switches tape recording off for pure inference.
struct Graph {
  Tape tape;
  bool training = false;
  bool grad_enabled = true;

  bool should_record(const TensorPtr& a) const { return grad_enabled && a->requires_grad; }
  bool should_record(const TensorPtr& a, const TensorPtr& b) const {
    return grad_enabled && (a->requires_grad || b->requires_grad);
  }
};

struct LstmCellParams;  // lstm.hpp

// y = W x  with W [m,n], x [n].
TensorPtr matvec(Graph& g, const TensorPtr& W, const TensorPtr& x);
// y = W x + b  with b [m].
TensorPtr affine(Graph& g, const TensorPtr& W, const TensorPtr& x, const TensorPtr& b);
// Elementwise sum of two same-shape tensors.
TensorPtr add(Graph& g, const TensorPtr& a, const TensorPtr& b);
// Sum of one or more same-shape tensors in one node.
TensorPtr add_many(Graph& g, const std::vector<TensorPtr>& xs);
// Elementwise product.
TensorPtr mul(Graph& g, const TensorPtr& a, const TensorPtr& b);
// Concatenation of 1-D tensors.
TensorPtr concat(Graph& g, const std::vector<TensorPtr>& parts);
// Row lookup in an embedding table [V, d].
TensorPtr embed(Graph& g, const TensorPtr& table, int64_t row);
// Numerically stabilized softmax over a 1-D tensor.
TensorPtr softmax(Graph& g, const TensorPtr& logits);
// -log(probs[gold]); composed with softmax its gradient w.r.t. the logits is
// probs - one_hot(gold).
TensorPtr cross_entropy(Graph& g, const TensorPtr& probs, int64_t gold);
// Inverted dropout: in training mode masks with prob `rate` and scales the
// survivors by 1/(1-rate); in inference mode returns the input unchanged.
TensorPtr dropout(Graph& g, const TensorPtr& x, double rate, Rng& rng);
// Scalar sum of all entries.
TensorPtr sum(Graph& g, const TensorPtr& x);
// Scalar dot product.
TensorPtr dot(Graph& g, const TensorPtr& a, const TensorPtr& b);
// y = c * x.
TensorPtr scale(Graph& g, const TensorPtr& x, double c);
// Value copy with the gradient path cut.
TensorPtr detach(Graph& g, const TensorPtr& x);
// One LSTM cell update; returns (h, c). Gate block order: input, forget,
// cell-candidate, output.
std::pair<TensorPtr, TensorPtr> lstm_step(Graph& g, const LstmCellParams& params,
                                          const TensorPtr& x, const TensorPtr& h_prev,
                                          const TensorPtr& c_prev);

}  // namespace jtag
