#pragma once

#include <string>
#include <vector>

#include "jtag/errors.hpp"

namespace jtag {

// One tokenized sentence with aligned BIO tags. Entity tags range over
// {PROBLEM, TEST, TREATMENT}; negation tags over {NEG}.
struct Sentence {
  std::vector<std::string> tokens;
  std::vector<std::string> entity_tags;
  std::vector<std::string> negation_tags;

  size_t size() const { return tokens.size(); }
};

struct Dataset {
  std::vector<Sentence> sentences;
  std::string split;  // train|dev|test

  size_t size() const { return sentences.size(); }
};

// Canonical alphabets, B-/I- pairs in declaration order with O first.
const std::vector<std::string>& entity_tag_alphabet();
const std::vector<std::string>& negation_tag_alphabet();

bool is_valid_entity_tag(const std::string& tag);
bool is_valid_negation_tag(const std::string& tag);

// Corpus format: one `token<TAB>entity<TAB>negation` line per token,
// sentences separated by exactly one blank line.
Dataset parse_conll(const std::string& text, const std::string& origin);
Dataset load_conll(const std::string& path);
std::string to_conll(const Dataset& dataset);
void write_conll(const Dataset& dataset, const std::string& path);

}  // namespace jtag
