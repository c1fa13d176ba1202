#include "jtag/data.hpp"

#include "jtag/io.hpp"

namespace jtag {

const std::vector<std::string>& entity_tag_alphabet() {
  static const std::vector<std::string> tags = {
      "O",      "B-PROBLEM",   "I-PROBLEM", "B-TEST",
      "I-TEST", "B-TREATMENT", "I-TREATMENT"};
  return tags;
}

const std::vector<std::string>& negation_tag_alphabet() {
  static const std::vector<std::string> tags = {"O", "B-NEG", "I-NEG"};
  return tags;
}

bool is_valid_entity_tag(const std::string& tag) {
  for (const auto& t : entity_tag_alphabet())
    if (t == tag) return true;
  return false;
}

bool is_valid_negation_tag(const std::string& tag) {
  for (const auto& t : negation_tag_alphabet())
    if (t == tag) return true;
  return false;
}

Dataset parse_conll(const std::string& text, const std::string& origin) {
  Dataset ds;
  Sentence cur;
  size_t line_no = 0;
  size_t start = 0;
  auto flush = [&]() {
    if (!cur.tokens.empty()) {
      ds.sentences.push_back(std::move(cur));
      cur = Sentence{};
    }
  };
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    const bool last = end == std::string::npos;
    std::string line = text.substr(start, last ? std::string::npos : end - start);
    start = last ? text.size() + 1 : end + 1;
    ++line_no;
    if (line.empty()) {
      flush();
      continue;
    }
    auto cols = split(line, '\t');
    if (cols.size() != 3)
      throw DataError(origin + ":" + std::to_string(line_no) + ": expected 3 tab-separated columns, got " +
                      std::to_string(cols.size()));
    if (cols[0].empty())
      throw DataError(origin + ":" + std::to_string(line_no) + ": empty token");
    if (!is_valid_entity_tag(cols[1]))
      throw DataError(origin + ":" + std::to_string(line_no) + ": invalid entity tag '" + cols[1] + "'");
    if (!is_valid_negation_tag(cols[2]))
      throw DataError(origin + ":" + std::to_string(line_no) + ": invalid negation tag '" + cols[2] + "'");
    cur.tokens.push_back(cols[0]);
    cur.entity_tags.push_back(cols[1]);
    cur.negation_tags.push_back(cols[2]);
  }
  flush();
  if (ds.sentences.empty()) throw DataError(origin + ": no sentences found");
  return ds;
}

Dataset load_conll(const std::string& path) {
  Dataset ds = parse_conll(read_file(path), path);
  ds.split = path;
  return ds;
}

std::string to_conll(const Dataset& dataset) {
  std::string out;
  for (size_t s = 0; s < dataset.sentences.size(); ++s) {
    if (s) out += "\n";
    const Sentence& sent = dataset.sentences[s];
    for (size_t t = 0; t < sent.size(); ++t) {
      out += sent.tokens[t];
      out += '\t';
      out += sent.entity_tags[t];
      out += '\t';
      out += sent.negation_tags[t];
      out += '\n';
    }
  }
  return out;
}

void write_conll(const Dataset& dataset, const std::string& path) {
  atomic_write_file(path, to_conll(dataset));
}

}  // namespace jtag
