#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "jtag/data.hpp"
#include "jtag/tensor.hpp"

namespace jtag {

// Index maps for words, characters, and the two tag alphabets.
// Word ids: 0 = PAD, 1 = UNK, then kept train words sorted lexicographically
// (lookups lowercase the token; characters preserve case). Tag maps are the
// fixed alphabets with a trailing GO id used only as the t=0 label feedback.
class Vocab {
 public:
  static constexpr int64_t kPad = 0;
  static constexpr int64_t kUnk = 1;

  static Vocab build(const Dataset& train, int min_word_freq = 1);

  int64_t word_id(const std::string& token) const;
  int64_t char_id(char c) const;
  int64_t entity_tag_id(const std::string& tag) const;  // DataError on unknown
  int64_t negation_tag_id(const std::string& tag) const;

  const std::string& entity_tag(int64_t id) const { return entity_tags_.at(static_cast<size_t>(id)); }
  const std::string& negation_tag(int64_t id) const { return negation_tags_.at(static_cast<size_t>(id)); }

  int64_t word_count() const { return static_cast<int64_t>(words_.size()); }
  int64_t char_count() const { return static_cast<int64_t>(chars_.size()); }
  // Predictable tags (GO excluded).
  int64_t entity_tag_count() const { return static_cast<int64_t>(entity_tags_.size()) - 1; }
  int64_t negation_tag_count() const { return static_cast<int64_t>(negation_tags_.size()) - 1; }
  int64_t entity_go_id() const { return entity_tag_count(); }
  int64_t negation_go_id() const { return negation_tag_count(); }

  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::string>& chars() const { return chars_; }  // one-char strings

  bool has_word(const std::string& lowercased) const {
    return word_ids_.count(lowercased) > 0;
  }

  // Text block used inside checkpoints; round-trips exactly.
  std::string serialize() const;
  static Vocab deserialize(const std::string& block);

 private:
  std::vector<std::string> words_;  // includes PAD/UNK sentinels
  std::vector<std::string> chars_;
  std::vector<std::string> entity_tags_;    // alphabet + GO
  std::vector<std::string> negation_tags_;  // alphabet + GO
  std::unordered_map<std::string, int64_t> word_ids_;
  std::unordered_map<char, int64_t> char_ids_;

  void rebuild_maps();
};

// Loads GloVe-layout text vectors (`word v1 .. vd`) into the word embedding
// rows of known words; unknown words keep their random init. Returns the
// number of rows initialized.
int64_t load_pretrained_embeddings(const std::string& path, const Vocab& vocab,
                                   Tensor& word_embeddings);

}  // namespace jtag
