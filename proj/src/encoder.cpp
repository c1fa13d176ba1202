#include "jtag/encoder.hpp"

namespace jtag {

Encoder::Encoder(const ModelConfig& cfg, const Vocab& vocab, Rng& init_rng)
    : cfg_(&cfg), vocab_(&vocab) {
  char_emb_ = glorot_matrix(vocab.char_count(), cfg.char_emb_dim, init_rng);
  word_emb_ = glorot_matrix(vocab.word_count(), cfg.word_emb_dim, init_rng);
  char_fwd_ = LstmCellParams::create(cfg.char_emb_dim, cfg.char_hidden, init_rng);
  char_bwd_ = LstmCellParams::create(cfg.char_emb_dim, cfg.char_hidden, init_rng);
  const int64_t word_input = 2 * cfg.char_hidden + cfg.word_emb_dim;
  word_fwd_ = LstmCellParams::create(word_input, cfg.word_hidden, init_rng);
  word_bwd_ = LstmCellParams::create(word_input, cfg.word_hidden, init_rng);
}

void Encoder::register_params(ParameterSet& params) const {
  params.add("encoder.char_emb", char_emb_);
  params.add("encoder.word_emb", word_emb_);
  auto add_cell = [&](const std::string& prefix, const LstmCellParams& cell) {
    params.add(prefix + ".input_weights", cell.input_weights);
    params.add(prefix + ".recurrent_weights", cell.recurrent_weights);
    params.add(prefix + ".bias", cell.bias);
  };
  add_cell("encoder.char_fwd", char_fwd_);
  add_cell("encoder.char_bwd", char_bwd_);
  add_cell("encoder.word_fwd", word_fwd_);
  add_cell("encoder.word_bwd", word_bwd_);
}

TensorPtr Encoder::maybe_dropout(Graph& g, const TensorPtr& x, bool enabled, Rng* rng) const {
  if (!enabled || !g.training || cfg_->dropout_rate == 0.0) return x;
  if (!rng) throw UsageError("encoder: training-mode dropout needs an RNG");
  return dropout(g, x, cfg_->dropout_rate, *rng);
}

TensorPtr Encoder::char_encode(Graph& g, const std::string& word, Rng* dropout_rng) const {
  if (word.empty()) throw DataError("char_encode: empty word");
  const int64_t H = cfg_->char_hidden;
  std::vector<TensorPtr> embs;
  embs.reserve(word.size());
  for (char c : word) embs.push_back(embed(g, char_emb_, vocab_->char_id(c)));

  TensorPtr h = make_tensor({H}), c = make_tensor({H});
  for (const auto& e : embs) std::tie(h, c) = lstm_step(g, char_fwd_, e, h, c);
  TensorPtr hb = make_tensor({H}), cb = make_tensor({H});
  for (auto it = embs.rbegin(); it != embs.rend(); ++it)
    std::tie(hb, cb) = lstm_step(g, char_bwd_, *it, hb, cb);

  return maybe_dropout(g, concat(g, {h, hb}), cfg_->dropout_on_char, dropout_rng);
}

EncodedSentence Encoder::encode(Graph& g, const Sentence& sentence, Rng* dropout_rng) const {
  const size_t T = sentence.size();
  if (T == 0) throw DataError("encode: empty sentence");
  EncodedSentence out;
  out.char_vectors.reserve(T);
  out.combined.reserve(T);
  out.states.reserve(T);

  for (size_t t = 0; t < T; ++t) {
    auto hc = char_encode(g, sentence.tokens[t], dropout_rng);
    out.char_vectors.push_back(hc);
    auto we = embed(g, word_emb_, vocab_->word_id(sentence.tokens[t]));
    out.combined.push_back(
        maybe_dropout(g, concat(g, {hc, we}), cfg_->dropout_on_input, dropout_rng));
  }

  const int64_t H = cfg_->word_hidden;
  std::vector<TensorPtr> fwd(T), bwd(T);
  TensorPtr h = make_tensor({H}), c = make_tensor({H});
  for (size_t t = 0; t < T; ++t) {
    std::tie(h, c) = lstm_step(g, word_fwd_, out.combined[t], h, c);
    fwd[t] = h;
  }
  h = make_tensor({H});
  c = make_tensor({H});
  for (size_t t = T; t-- > 0;) {
    std::tie(h, c) = lstm_step(g, word_bwd_, out.combined[t], h, c);
    bwd[t] = h;
  }
  for (size_t t = 0; t < T; ++t)
    out.states.push_back(
        maybe_dropout(g, concat(g, {fwd[t], bwd[t]}), cfg_->dropout_on_word, dropout_rng));
  return out;
}

}  // namespace jtag
