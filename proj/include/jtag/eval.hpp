#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jtag/data.hpp"

namespace jtag {

// Token interval [start, end) with an entity type or NEG label.
struct Span {
  int start = 0;
  int end = 0;
  std::string label;

  bool operator==(const Span& o) const = default;
  bool operator<(const Span& o) const {
    return std::tie(start, end, label) < std::tie(o.start, o.end, o.label);
  }
};

// Lenient BIO decoding: B- opens a span; I-X after O, after a different
// label, or at position 0 also opens one.
std::vector<Span> tags_to_spans(const std::vector<std::string>& tags);

struct LabelCounts {
  int64_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct TaskScore {
  int64_t tp = 0, fp = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;  // micro, exact span match
  // Macro average over labels observed in gold or predictions.
  double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
  std::map<std::string, LabelCounts> per_label;
  double token_accuracy = 0.0;  // secondary diagnostic
};

// Exact-match span scoring aggregated over the corpus. 0/0 precision and
// recall are defined as 0.
TaskScore score_task(const std::vector<std::vector<std::string>>& gold,
                     const std::vector<std::vector<std::string>>& predicted);

// Model predictions aligned with a gold dataset, one tag row per sentence.
struct Predictions {
  std::vector<std::vector<std::string>> entity;    // empty when task inactive
  std::vector<std::vector<std::string>> negation;  // empty when task inactive
};

struct EvalReport {
  std::optional<TaskScore> entity;
  std::optional<TaskScore> negation;
};

EvalReport score(const Dataset& gold, const Predictions& predicted);

std::string report_csv(const EvalReport& report);
std::string report_table(const EvalReport& report, const std::string& model_name);

}  // namespace jtag
