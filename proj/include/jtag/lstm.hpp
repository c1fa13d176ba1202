#pragma once

#include <cstdint>

#include "jtag/tensor.hpp"

namespace jtag {

// Parameters of one directional LSTM cell. The 4H rows of the weight
// matrices are laid out in fixed gate blocks: input, forget, cell-candidate,
// output. The forget-gate bias block is initialized to 1.0.
struct LstmCellParams {
  TensorPtr input_weights;      // [4H, D]
  TensorPtr recurrent_weights;  // [4H, H]
  TensorPtr bias;               // [4H]
  int64_t hidden_size = 0;      // H
  int64_t input_size = 0;       // D

  static LstmCellParams create(int64_t input_size, int64_t hidden_size, Rng& rng,
                               bool requires_grad = true);
};

}  // namespace jtag
