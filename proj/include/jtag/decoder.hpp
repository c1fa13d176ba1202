#pragma once

#include "jtag/graph.hpp"
#include "jtag/lstm.hpp"
#include "jtag/model_config.hpp"
#include "jtag/optim.hpp"

namespace jtag {

// Affine softmax head.
struct HeadParams {
  TensorPtr W;  // [K, d_in]
  TensorPtr b;  // [K]
};

// Hidden state of the active tagger LSTM(s). For the shared and conditional
// variants only the entity slot is used.
struct DecoderState {
  TensorPtr ent_h, ent_c;
  TensorPtr neg_h, neg_c;
};

struct DecoderStepOutput {
  TensorPtr entity_probs;    // null when the variant has no entity task
  TensorPtr negation_probs;  // null when the variant has no negation task
};

// The tagging heads over the shared encoding. One step consumes the encoder
// state at t plus the previous tag ids (gold under teacher forcing,
// predicted at inference) and produces per-task distributions.
class Decoder {
 public:
  Decoder(const ModelConfig& cfg, int64_t k_ent, int64_t k_neg, int64_t ent_go, int64_t neg_go,
          Rng& init_rng);

  void register_params(ParameterSet& params) const;

  DecoderState initial_state() const;

  DecoderStepOutput step(Graph& g, DecoderState& state, const TensorPtr& enc_t,
                         int64_t prev_entity_tag, int64_t prev_negation_tag) const;

  int64_t entity_go() const { return ent_go_; }
  int64_t negation_go() const { return neg_go_; }

 private:
  TensorPtr head_input(Graph& g, const TensorPtr& hidden, const TensorPtr& enc_t) const;

  const ModelConfig* cfg_;
  int64_t k_ent_, k_neg_, ent_go_, neg_go_;
  TensorPtr tag_emb_ent_;  // [k_ent+1, tag_emb_dim], GO row last
  TensorPtr tag_emb_neg_;  // [k_neg+1, tag_emb_dim]
  LstmCellParams tagger_;      // single tagger (shared/conditional) or entity tagger
  LstmCellParams tagger_neg_;  // negation tagger (two-decoder / independent negation)
  HeadParams head_ent_, head_neg_;
};

}  // namespace jtag
