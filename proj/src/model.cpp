#include "jtag/model.hpp"

namespace jtag {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::IndependentNer: return "independent_ner";
    case Variant::IndependentNegation: return "independent_negation";
    case Variant::TwoDecoder: return "two";
    case Variant::SharedDecoder: return "shared";
    case Variant::ConditionalSoftmax: return "conditional";
  }
  throw UsageError("unknown variant id");
}

Variant parse_variant(const std::string& name) {
  if (name == "independent_ner") return Variant::IndependentNer;
  if (name == "independent_negation") return Variant::IndependentNegation;
  if (name == "two") return Variant::TwoDecoder;
  if (name == "shared") return Variant::SharedDecoder;
  if (name == "conditional") return Variant::ConditionalSoftmax;
  throw UsageError("unknown variant '" + name +
                   "' (expected independent_ner|independent_negation|two|shared|conditional)");
}

JointModel::JointModel(const ModelConfig& cfg, Vocab vocab, uint64_t seed)
    : cfg_(cfg), vocab_(std::move(vocab)) {
  cfg_.validate();
  Rng init(seed);
  Rng enc_rng = init.fork("encoder");
  Rng dec_rng = init.fork("decoder");
  encoder_ = std::make_unique<Encoder>(cfg_, vocab_, enc_rng);
  decoder_ = std::make_unique<Decoder>(cfg_, vocab_.entity_tag_count(), vocab_.negation_tag_count(),
                                       vocab_.entity_go_id(), vocab_.negation_go_id(), dec_rng);
  encoder_->register_params(params_);
  decoder_->register_params(params_);
}

EncodedSentence JointModel::encode(Graph& g, const Sentence& sentence, Rng* dropout_rng) const {
  return encoder_->encode(g, sentence, dropout_rng);
}

JointModel::ForwardResult JointModel::forward_teacher_forced(Graph& g, const Sentence& sentence,
                                                             Rng* dropout_rng) const {
  const size_t T = sentence.size();
  if (sentence.entity_tags.size() != T || sentence.negation_tags.size() != T)
    throw DataError("forward: sentence tag rows misaligned");
  const EncodedSentence enc = encode(g, sentence, dropout_rng);
  DecoderState state = decoder_->initial_state();
  ForwardResult out;
  int64_t prev_ent = decoder_->entity_go();
  int64_t prev_neg = decoder_->negation_go();
  for (size_t t = 0; t < T; ++t) {
    const DecoderStepOutput step = decoder_->step(g, state, enc.states[t], prev_ent, prev_neg);
    if (step.entity_probs) out.entity_probs.push_back(step.entity_probs);
    if (step.negation_probs) out.negation_probs.push_back(step.negation_probs);
    prev_ent = vocab_.entity_tag_id(sentence.entity_tags[t]);
    prev_neg = vocab_.negation_tag_id(sentence.negation_tags[t]);
  }
  return out;
}

int64_t argmax_lowest(const TensorPtr& probs) {
  int64_t best = 0;
  for (int64_t i = 1; i < probs->numel(); ++i)
    if (probs->data[static_cast<size_t>(i)] > probs->data[static_cast<size_t>(best)]) best = i;
  return best;
}

std::pair<std::vector<std::string>, std::vector<std::string>> JointModel::greedy_decode(
    const Sentence& sentence) const {
  Graph g;
  g.training = false;
  g.grad_enabled = false;
  const EncodedSentence enc = encode(g, sentence, nullptr);
  DecoderState state = decoder_->initial_state();
  std::vector<std::string> entity, negation;
  int64_t prev_ent = decoder_->entity_go();
  int64_t prev_neg = decoder_->negation_go();
  for (size_t t = 0; t < sentence.size(); ++t) {
    const DecoderStepOutput step = decoder_->step(g, state, enc.states[t], prev_ent, prev_neg);
    if (step.entity_probs) {
      prev_ent = argmax_lowest(step.entity_probs);
      entity.push_back(vocab_.entity_tag(prev_ent));
    }
    if (step.negation_probs) {
      prev_neg = argmax_lowest(step.negation_probs);
      negation.push_back(vocab_.negation_tag(prev_neg));
    }
  }
  return {std::move(entity), std::move(negation)};
}

}  // namespace jtag
