#pragma once

#include <memory>
#include <utility>

#include "jtag/decoder.hpp"
#include "jtag/encoder.hpp"
#include "jtag/model_config.hpp"

namespace jtag {

// Shared encoder plus the configured decoder variant, with all trainable
// tensors registered in a stable name order.
class JointModel {
 public:
  JointModel(const ModelConfig& cfg, Vocab vocab, uint64_t seed);

  JointModel(const JointModel&) = delete;
  JointModel& operator=(const JointModel&) = delete;

  const ModelConfig& config() const { return cfg_; }
  const Vocab& vocab() const { return vocab_; }
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }
  const Encoder& encoder() const { return *encoder_; }
  const Decoder& decoder() const { return *decoder_; }

  int64_t param_count() const { return params_.total_params(); }
  int64_t decoder_param_count() const { return params_.total_params_with_prefix("decoder."); }

  // Per-step probability sequences under teacher forcing (gold previous
  // tags). Inactive tasks come back empty.
  struct ForwardResult {
    std::vector<TensorPtr> entity_probs;
    std::vector<TensorPtr> negation_probs;
  };
  ForwardResult forward_teacher_forced(Graph& g, const Sentence& sentence,
                                       Rng* dropout_rng) const;

  EncodedSentence encode(Graph& g, const Sentence& sentence, Rng* dropout_rng) const;

  // Greedy feedback decoding: argmax at each step fed back as the previous
  // tag, ties broken by the lowest tag id. The tag vector of an inactive
  // task stays empty.
  std::pair<std::vector<std::string>, std::vector<std::string>> greedy_decode(
      const Sentence& sentence) const;

 private:
  ModelConfig cfg_;
  Vocab vocab_;
  std::unique_ptr<Encoder> encoder_;
  std::unique_ptr<Decoder> decoder_;
  ParameterSet params_;
};

// Lowest-index argmax.
int64_t argmax_lowest(const TensorPtr& probs);

}  // namespace jtag
