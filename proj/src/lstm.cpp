#include "jtag/lstm.hpp"

namespace jtag {

LstmCellParams LstmCellParams::create(int64_t input_size, int64_t hidden_size, Rng& rng,
                                      bool requires_grad) {
  if (input_size <= 0 || hidden_size <= 0)
    throw UsageError("LstmCellParams: sizes must be positive");
  LstmCellParams p;
  p.input_size = input_size;
  p.hidden_size = hidden_size;
  p.input_weights = glorot_matrix(4 * hidden_size, input_size, rng, requires_grad);
  p.recurrent_weights = glorot_matrix(4 * hidden_size, hidden_size, rng, requires_grad);
  p.bias = make_tensor({4 * hidden_size}, requires_grad);
  // Forget-gate block starts open so long-range signal survives early training.
  for (int64_t k = 0; k < hidden_size; ++k) p.bias->data[static_cast<size_t>(hidden_size + k)] = 1.0;
  return p;
}

}  // namespace jtag
