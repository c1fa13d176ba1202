#pragma once

#include <cstdint>
#include <string>

#include "jtag/data.hpp"

namespace jtag {

struct SynthConfig {
  // Target fraction of PROBLEM spans carrying negation.
  double negation_rate = 0.35;
  // Per-token corruption probability (adjacent swap / drop / double).
  double misspell_rate = 0.03;
  // Per-token probability of swapping in a clinical abbreviation.
  double abbrev_rate = 0.10;
  // Probability a sentence gets a second clause.
  double two_clause_rate = 0.35;
};

// Deterministic template-based clinical-style corpus. Negation spans occur
// only on PROBLEM entities governed by a cue; the same surface frames also
// host TEST/TREATMENT entities that stay unnegated, so negation depends on
// entity identity rather than cue presence alone.
Dataset synth_generate(uint64_t seed, int n_sentences, const SynthConfig& config = {});

// Uniform sentence-level sample without replacement, order preserving;
// size = max(1, round(fraction * N)).
Dataset subsample(const Dataset& train, double fraction, uint64_t seed);

struct CorpusStats {
  int64_t sentences = 0;
  int64_t tokens = 0;
  int64_t problem_spans = 0;
  int64_t test_spans = 0;
  int64_t treatment_spans = 0;
  int64_t negation_spans = 0;
  int64_t negated_problem_spans = 0;

  double negated_problem_fraction() const {
    return problem_spans == 0 ? 0.0
                              : static_cast<double>(negated_problem_spans) /
                                    static_cast<double>(problem_spans);
  }
};

CorpusStats corpus_stats(const Dataset& dataset);
std::string format_stats(const CorpusStats& stats);

}  // namespace jtag
