#include "jtag/negex.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "jtag/io.hpp"

namespace jtag {

namespace {

enum class Category { Pre, Post, Pseudo, Term };

struct CueMatch {
  int start = 0;
  int end = 0;  // exclusive
  Category category;
};

const char* category_name(Category c) {
  switch (c) {
    case Category::Pre: return "PRE";
    case Category::Post: return "POST";
    case Category::Pseudo: return "PSEUDO";
    case Category::Term: return "TERM";
  }
  return "?";
}

bool phrase_at(const std::vector<std::string>& tokens, size_t pos,
               const std::vector<std::string>& phrase) {
  if (pos + phrase.size() > tokens.size()) return false;
  for (size_t i = 0; i < phrase.size(); ++i)
    if (tokens[pos + i] != phrase[i]) return false;
  return true;
}

}  // namespace

CueLexicon CueLexicon::builtin() {
  static const char* kDefault =
      "# default cue lexicon\n"
      "PRE\tno\n"
      "PRE\tnot\n"
      "PRE\tdenies\n"
      "PRE\tdenied\n"
      "PRE\tdeny\n"
      "PRE\twithout\n"
      "PRE\tw/o\n"
      "PRE\tno evidence of\n"
      "PRE\tno sign of\n"
      "PRE\tno signs of\n"
      "PRE\tnegative for\n"
      "PRE\tnever had\n"
      "PRE\tfree of\n"
      "PRE\tabsence of\n"
      "PRE\trules out\n"
      "PRE\truled out\n"
      "PRE\tunremarkable for\n"
      "POST\twas ruled out\n"
      "POST\tis ruled out\n"
      "POST\twere ruled out\n"
      "POST\tunlikely\n"
      "POST\tis unlikely\n"
      "POST\tnot present\n"
      "POST\twas negative\n"
      "POST\tis negative\n"
      "PSEUDO\tno increase\n"
      "PSEUDO\tno increase in\n"
      "PSEUDO\tno change\n"
      "PSEUDO\tno change in\n"
      "PSEUDO\tno significant change\n"
      "PSEUDO\tno further\n"
      "PSEUDO\tnot only\n"
      "PSEUDO\tnot necessarily\n"
      "PSEUDO\tnot certain if\n"
      "PSEUDO\tnot certain whether\n"
      "PSEUDO\tcannot be ruled out\n"
      "PSEUDO\tcould not be ruled out\n"
      "PSEUDO\tnot ruled out\n"
      "TERM\tbut\n"
      "TERM\thowever\n"
      "TERM\talthough\n"
      "TERM\tthough\n"
      "TERM\tyet\n"
      "TERM\texcept\n"
      "TERM\tnevertheless\n"
      "TERM\taside from\n"
      "TERM\tapart from\n";
  return parse(kDefault, "<builtin>");
}

CueLexicon CueLexicon::parse(const std::string& text, const std::string& origin) {
  CueLexicon lex;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 2 || cols[1].empty())
      throw DataError(origin + ":" + std::to_string(line_no) +
                      ": expected `category<TAB>cue phrase`");
    const std::string phrase = lowercase(cols[1]);
    if (!seen.insert(phrase).second)
      throw DataError(origin + ":" + std::to_string(line_no) + ": duplicate cue phrase '" +
                      phrase + "'");
    const auto words = split(phrase, ' ');
    if (cols[0] == "PRE") lex.pre_cues.push_back(words);
    else if (cols[0] == "POST") lex.post_cues.push_back(words);
    else if (cols[0] == "PSEUDO") lex.pseudo_cues.push_back(words);
    else if (cols[0] == "TERM") lex.termination_terms.push_back(words);
    else
      throw DataError(origin + ":" + std::to_string(line_no) + ": unknown category '" + cols[0] +
                      "'");
  }
  if (lex.pre_cues.empty() && lex.post_cues.empty())
    throw DataError(origin + ": lexicon has no PRE or POST cues");
  return lex;
}

CueLexicon CueLexicon::load(const std::string& path) { return parse(read_file(path), path); }

std::string CueLexicon::serialize() const {
  std::string out;
  auto emit = [&](const char* cat, const std::vector<std::vector<std::string>>& cues) {
    for (const auto& phrase : cues) {
      out += cat;
      out += '\t';
      out += join(phrase, " ");
      out += '\n';
    }
  };
  emit("PRE", pre_cues);
  emit("POST", post_cues);
  emit("PSEUDO", pseudo_cues);
  emit("TERM", termination_terms);
  return out;
}

std::vector<bool> negex_predict(const std::vector<std::string>& tokens,
                                const std::vector<Span>& entity_spans,
                                const CueLexicon& lexicon, const ScopeConfig& config) {
  if (config.window < 1) throw UsageError("negex: window must be >= 1");
  std::vector<std::string> lower;
  lower.reserve(tokens.size());
  for (const auto& t : tokens) lower.push_back(lowercase(t));

  // Longest-match scan, left to right; matched tokens are consumed so a
  // pseudo cue blocks the pre/post cue it overlaps.
  std::vector<CueMatch> matches;
  size_t pos = 0;
  while (pos < lower.size()) {
    size_t best_len = 0;
    Category best_cat = Category::Pre;
    auto consider = [&](const std::vector<std::vector<std::string>>& cues, Category cat) {
      for (const auto& phrase : cues)
        if (phrase.size() > best_len && phrase_at(lower, pos, phrase)) {
          best_len = phrase.size();
          best_cat = cat;
        }
    };
    consider(lexicon.pseudo_cues, Category::Pseudo);
    consider(lexicon.pre_cues, Category::Pre);
    consider(lexicon.post_cues, Category::Post);
    consider(lexicon.termination_terms, Category::Term);
    if (best_len == 0) {
      ++pos;
      continue;
    }
    matches.push_back({static_cast<int>(pos), static_cast<int>(pos + best_len), best_cat});
    pos += best_len;
  }

  const int n = static_cast<int>(tokens.size());
  std::vector<std::pair<int, int>> scopes;  // [a, b)
  for (const CueMatch& m : matches) {
    if (m.category == Category::Pre) {
      int b = std::min(n, m.end + config.window);
      for (const CueMatch& t : matches)
        if (t.category == Category::Term && t.start >= m.end) b = std::min(b, t.start);
      if (m.end < b) scopes.emplace_back(m.end, b);
    } else if (m.category == Category::Post) {
      int a = std::max(0, m.start - config.window);
      for (const CueMatch& t : matches)
        if (t.category == Category::Term && t.end <= m.start) a = std::max(a, t.end);
      if (a < m.start) scopes.emplace_back(a, m.start);
    }
  }

  std::vector<bool> negated(entity_spans.size(), false);
  for (size_t i = 0; i < entity_spans.size(); ++i) {
    const Span& sp = entity_spans[i];
    for (const auto& [a, b] : scopes)
      if (sp.start < b && a < sp.end) {
        negated[i] = true;
        break;
      }
  }
  return negated;
}

}  // namespace jtag
