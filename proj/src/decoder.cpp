#include "jtag/decoder.hpp"

namespace jtag {

Decoder::Decoder(const ModelConfig& cfg, int64_t k_ent, int64_t k_neg, int64_t ent_go,
                 int64_t neg_go, Rng& init_rng)
    : cfg_(&cfg), k_ent_(k_ent), k_neg_(k_neg), ent_go_(ent_go), neg_go_(neg_go) {
  const Variant v = cfg.variant;
  const int64_t enc_dim = cfg.encoder_output_dim();
  const int64_t head_dim = cfg.heads_on_encoder ? enc_dim : cfg.tagger_hidden;

  // Construction order keeps the entity path identical between the shared
  // and conditional variants for a fixed seed: the conditional model only
  // appends columns to the negation head.
  if (has_entity_task(v))
    tag_emb_ent_ = glorot_matrix(k_ent + 1, cfg.tag_emb_dim, init_rng);
  if (has_negation_task(v))
    tag_emb_neg_ = glorot_matrix(k_neg + 1, cfg.tag_emb_dim, init_rng);

  if (single_tagger(v)) {
    tagger_ = LstmCellParams::create(enc_dim + 2 * cfg.tag_emb_dim, cfg.tagger_hidden, init_rng);
  } else {
    if (has_entity_task(v))
      tagger_ = LstmCellParams::create(enc_dim + cfg.tag_emb_dim, cfg.tagger_hidden, init_rng);
    if (has_negation_task(v))
      tagger_neg_ = LstmCellParams::create(enc_dim + cfg.tag_emb_dim, cfg.tagger_hidden, init_rng);
  }

  if (has_entity_task(v)) {
    head_ent_.W = glorot_matrix(k_ent, head_dim, init_rng);
    head_ent_.b = make_tensor({k_ent}, true);
  }
  if (has_negation_task(v)) {
    const int64_t neg_in =
        head_dim + (v == Variant::ConditionalSoftmax ? k_ent : 0);
    head_neg_.W = glorot_matrix(k_neg, neg_in, init_rng);
    head_neg_.b = make_tensor({k_neg}, true);
  }
}

void Decoder::register_params(ParameterSet& params) const {
  auto add_cell = [&](const std::string& prefix, const LstmCellParams& cell) {
    params.add(prefix + ".input_weights", cell.input_weights);
    params.add(prefix + ".recurrent_weights", cell.recurrent_weights);
    params.add(prefix + ".bias", cell.bias);
  };
  const Variant v = cfg_->variant;
  if (tag_emb_ent_) params.add("decoder.tag_emb_ent", tag_emb_ent_);
  if (tag_emb_neg_) params.add("decoder.tag_emb_neg", tag_emb_neg_);
  if (single_tagger(v)) {
    add_cell("decoder.tagger", tagger_);
  } else {
    if (tagger_.input_weights) add_cell("decoder.tagger_ent", tagger_);
    if (tagger_neg_.input_weights) add_cell("decoder.tagger_neg", tagger_neg_);
  }
  if (head_ent_.W) {
    params.add("decoder.head_ent.W", head_ent_.W);
    params.add("decoder.head_ent.b", head_ent_.b);
  }
  if (head_neg_.W) {
    params.add("decoder.head_neg.W", head_neg_.W);
    params.add("decoder.head_neg.b", head_neg_.b);
  }
}

DecoderState Decoder::initial_state() const {
  DecoderState s;
  s.ent_h = make_tensor({cfg_->tagger_hidden});
  s.ent_c = make_tensor({cfg_->tagger_hidden});
  s.neg_h = make_tensor({cfg_->tagger_hidden});
  s.neg_c = make_tensor({cfg_->tagger_hidden});
  return s;
}

TensorPtr Decoder::head_input(Graph&, const TensorPtr& hidden, const TensorPtr& enc_t) const {
  return cfg_->heads_on_encoder ? enc_t : hidden;
}

DecoderStepOutput Decoder::step(Graph& g, DecoderState& state, const TensorPtr& enc_t,
                                int64_t prev_entity_tag, int64_t prev_negation_tag) const {
  DecoderStepOutput out;
  const Variant v = cfg_->variant;

  if (single_tagger(v)) {
    auto x = concat(g, {enc_t, embed(g, tag_emb_ent_, prev_entity_tag),
                        embed(g, tag_emb_neg_, prev_negation_tag)});
    std::tie(state.ent_h, state.ent_c) = lstm_step(g, tagger_, x, state.ent_h, state.ent_c);
    auto h = head_input(g, state.ent_h, enc_t);
    out.entity_probs = softmax(g, affine(g, head_ent_.W, h, head_ent_.b));
    if (v == Variant::ConditionalSoftmax) {
      auto ent_in = cfg_->stop_entity_gradient ? detach(g, out.entity_probs) : out.entity_probs;
      auto neg_in = concat(g, {h, ent_in});
      out.negation_probs = softmax(g, affine(g, head_neg_.W, neg_in, head_neg_.b));
    } else {
      out.negation_probs = softmax(g, affine(g, head_neg_.W, h, head_neg_.b));
    }
    return out;
  }

  if (has_entity_task(v)) {
    auto x = concat(g, {enc_t, embed(g, tag_emb_ent_, prev_entity_tag)});
    std::tie(state.ent_h, state.ent_c) = lstm_step(g, tagger_, x, state.ent_h, state.ent_c);
    auto h = head_input(g, state.ent_h, enc_t);
    out.entity_probs = softmax(g, affine(g, head_ent_.W, h, head_ent_.b));
  }
  if (has_negation_task(v)) {
    auto x = concat(g, {enc_t, embed(g, tag_emb_neg_, prev_negation_tag)});
    std::tie(state.neg_h, state.neg_c) = lstm_step(g, tagger_neg_, x, state.neg_h, state.neg_c);
    auto h = head_input(g, state.neg_h, enc_t);
    out.negation_probs = softmax(g, affine(g, head_neg_.W, h, head_neg_.b));
  }
  return out;
}

}  // namespace jtag
