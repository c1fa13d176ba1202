#pragma once

#include <cstdint>
#include <string>

#include "jtag/errors.hpp"

namespace jtag {

enum class Variant : uint8_t {
  IndependentNer = 0,
  IndependentNegation = 1,
  TwoDecoder = 2,
  SharedDecoder = 3,
  ConditionalSoftmax = 4,
};

const char* variant_name(Variant v);
Variant parse_variant(const std::string& name);  // UsageError on unknown

inline bool has_entity_task(Variant v) { return v != Variant::IndependentNegation; }
inline bool has_negation_task(Variant v) { return v != Variant::IndependentNer; }
// Shared and conditional run one tagger LSTM; the others one per task.
inline bool single_tagger(Variant v) {
  return v == Variant::SharedDecoder || v == Variant::ConditionalSoftmax;
}

struct ModelConfig {
  int64_t word_emb_dim = 100;
  int64_t char_emb_dim = 25;
  int64_t tag_emb_dim = 50;
  int64_t char_hidden = 50;
  int64_t word_hidden = 100;
  int64_t tagger_hidden = 50;
  double dropout_rate = 0.5;
  // Per-site dropout toggles: char-LSTM output, combined word input m_t,
  // word-LSTM output o_t.
  bool dropout_on_char = true;
  bool dropout_on_input = true;
  bool dropout_on_word = true;
  // Ablations: feed softmax heads from the encoder state instead of the
  // tagger LSTM; cut the gradient through the conditional entity input.
  bool heads_on_encoder = false;
  bool stop_entity_gradient = false;
  Variant variant = Variant::ConditionalSoftmax;

  int64_t encoder_output_dim() const { return 2 * word_hidden; }

  void validate() const {
    if (word_emb_dim <= 0 || char_emb_dim <= 0 || tag_emb_dim <= 0 || char_hidden <= 0 ||
        word_hidden <= 0 || tagger_hidden <= 0)
      throw UsageError("model config: all dimensions must be positive");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0)
      throw UsageError("model config: dropout_rate must be in [0,1)");
  }
};

}  // namespace jtag
