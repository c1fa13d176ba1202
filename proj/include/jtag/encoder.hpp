#pragma once

#include <vector>

#include "jtag/data.hpp"
#include "jtag/graph.hpp"
#include "jtag/lstm.hpp"
#include "jtag/model_config.hpp"
#include "jtag/optim.hpp"
#include "jtag/vocab.hpp"

namespace jtag {

// Per-sentence encoder output. All vectors have length T.
struct EncodedSentence {
  std::vector<TensorPtr> states;        // o_t, [2 * word_hidden]
  std::vector<TensorPtr> char_vectors;  // h_c(t), [2 * char_hidden]
  std::vector<TensorPtr> combined;      // m_t = [h_c(t) || word_emb], [2*char_hidden + word_emb_dim]

  size_t size() const { return states.size(); }
};

// Shared hierarchical encoder: a character BiLSTM per word concatenated with
// the word embedding, then a word-level BiLSTM over the sequence.
class Encoder {
 public:
  Encoder(const ModelConfig& cfg, const Vocab& vocab, Rng& init_rng);

  void register_params(ParameterSet& params) const;

  // [fwd final state || bwd final state] over the word's characters; the
  // backward half is the backward LSTM's state after consuming the first
  // character. Unseen characters map to the UNK id.
  TensorPtr char_encode(Graph& g, const std::string& word, Rng* dropout_rng) const;

  EncodedSentence encode(Graph& g, const Sentence& sentence, Rng* dropout_rng) const;

  const TensorPtr& word_embeddings() const { return word_emb_; }

 private:
  TensorPtr maybe_dropout(Graph& g, const TensorPtr& x, bool enabled, Rng* rng) const;

  const ModelConfig* cfg_;
  const Vocab* vocab_;
  TensorPtr char_emb_;  // [C, char_emb_dim]
  TensorPtr word_emb_;  // [V, word_emb_dim]
  LstmCellParams char_fwd_, char_bwd_;
  LstmCellParams word_fwd_, word_bwd_;
};

}  // namespace jtag
