#pragma once

#include <string>
#include <vector>

#include "jtag/eval.hpp"

namespace jtag {

// Cue phrases as lowercase token sequences. Pseudo cues are matched first
// and block any pre/post cue they overlap; the four sets must be disjoint.
struct CueLexicon {
  std::vector<std::vector<std::string>> pre_cues;
  std::vector<std::vector<std::string>> post_cues;
  std::vector<std::vector<std::string>> pseudo_cues;
  std::vector<std::vector<std::string>> termination_terms;

  // Curated default set (~40 cues).
  static CueLexicon builtin();
  // File format: `category<TAB>cue phrase`, category PRE|POST|PSEUDO|TERM,
  // `#` comments and blank lines allowed.
  static CueLexicon parse(const std::string& text, const std::string& origin);
  static CueLexicon load(const std::string& path);
  std::string serialize() const;
};

struct ScopeConfig {
  // Tokens following a pre-cue / preceding a post-cue that fall in scope.
  int window = 6;
};

// Flags each entity span as negated iff it intersects the scope of a
// non-pseudo cue. Pre-cue scope runs forward up to `window` tokens,
// truncated at termination terms and sentence end; post-cue scope runs
// backward symmetrically. Cues are matched longest-first, left to right.
std::vector<bool> negex_predict(const std::vector<std::string>& tokens,
                                const std::vector<Span>& entity_spans,
                                const CueLexicon& lexicon, const ScopeConfig& config);

}  // namespace jtag
