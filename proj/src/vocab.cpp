#include "jtag/vocab.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "jtag/io.hpp"

namespace jtag {

Vocab Vocab::build(const Dataset& train, int min_word_freq) {
  if (train.sentences.empty()) throw DataError("build_vocab: empty training set");
  // std::map keeps iteration order deterministic across platforms.
  std::map<std::string, int> word_freq;
  std::map<char, bool> seen_chars;
  for (const Sentence& s : train.sentences) {
    for (const std::string& tok : s.tokens) {
      ++word_freq[lowercase(tok)];
      for (char c : tok) seen_chars[c] = true;  // case preserved
    }
  }
  Vocab v;
  v.words_ = {"<pad>", "<unk>"};
  for (const auto& [word, freq] : word_freq)
    if (freq >= min_word_freq) v.words_.push_back(word);
  v.chars_ = {"<pad>", "<unk>"};
  for (const auto& [c, _] : seen_chars) v.chars_.push_back(std::string(1, c));
  v.entity_tags_ = entity_tag_alphabet();
  v.entity_tags_.push_back("<go>");
  v.negation_tags_ = negation_tag_alphabet();
  v.negation_tags_.push_back("<go>");
  v.rebuild_maps();
  return v;
}

void Vocab::rebuild_maps() {
  word_ids_.clear();
  char_ids_.clear();
  for (size_t i = 2; i < words_.size(); ++i) word_ids_[words_[i]] = static_cast<int64_t>(i);
  for (size_t i = 2; i < chars_.size(); ++i) char_ids_[chars_[i][0]] = static_cast<int64_t>(i);
}

int64_t Vocab::word_id(const std::string& token) const {
  auto it = word_ids_.find(lowercase(token));
  return it == word_ids_.end() ? kUnk : it->second;
}

int64_t Vocab::char_id(char c) const {
  auto it = char_ids_.find(c);
  return it == char_ids_.end() ? kUnk : it->second;
}

int64_t Vocab::entity_tag_id(const std::string& tag) const {
  for (size_t i = 0; i < entity_tags_.size(); ++i)
    if (entity_tags_[i] == tag) return static_cast<int64_t>(i);
  throw DataError("unknown entity tag '" + tag + "'");
}

int64_t Vocab::negation_tag_id(const std::string& tag) const {
  for (size_t i = 0; i < negation_tags_.size(); ++i)
    if (negation_tags_[i] == tag) return static_cast<int64_t>(i);
  throw DataError("unknown negation tag '" + tag + "'");
}

std::string Vocab::serialize() const {
  std::string out;
  auto section = [&](const char* name, const std::vector<std::string>& items) {
    out += "[";
    out += name;
    out += "]\n";
    for (const auto& item : items) {
      out += item;
      out += '\n';
    }
  };
  section("words", words_);
  section("chars", chars_);
  section("entity_tags", entity_tags_);
  section("negation_tags", negation_tags_);
  return out;
}

Vocab Vocab::deserialize(const std::string& block) {
  Vocab v;
  std::vector<std::string>* target = nullptr;
  std::istringstream in(block);
  std::string line;
  while (std::getline(in, line)) {
    if (line == "[words]") target = &v.words_;
    else if (line == "[chars]") target = &v.chars_;
    else if (line == "[entity_tags]") target = &v.entity_tags_;
    else if (line == "[negation_tags]") target = &v.negation_tags_;
    else if (target) target->push_back(line);
    else throw DataError("vocab block: content before first section");
  }
  if (v.words_.size() < 2 || v.chars_.size() < 2 || v.entity_tags_.size() < 2 ||
      v.negation_tags_.size() < 2)
    throw DataError("vocab block: missing sections");
  v.rebuild_maps();
  return v;
}

int64_t load_pretrained_embeddings(const std::string& path, const Vocab& vocab,
                                   Tensor& word_embeddings) {
  const std::string text = read_file(path);
  if (word_embeddings.shape.size() != 2 || word_embeddings.shape[0] != vocab.word_count())
    throw UsageError("load_pretrained_embeddings: embedding table does not match vocab");
  const int64_t dim = word_embeddings.shape[1];
  std::istringstream in(text);
  std::string line;
  int64_t loaded = 0;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    const int64_t id = vocab.word_id(word);
    std::vector<double> vec;
    vec.reserve(static_cast<size_t>(dim));
    double value;
    while (ls >> value) vec.push_back(value);
    if (static_cast<int64_t>(vec.size()) != dim)
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                      " values, got " + std::to_string(vec.size()));
    if (id == Vocab::kUnk && word != "<unk>") continue;  // unknown word: keep random init
    for (int64_t j = 0; j < dim; ++j)
      word_embeddings.data[static_cast<size_t>(id * dim + j)] = vec[static_cast<size_t>(j)];
    ++loaded;
  }
  return loaded;
}

}  // namespace jtag
