#include "jtag/eval.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "jtag/io.hpp"

namespace jtag {

namespace {

struct ParsedTag {
  char prefix = 'O';  // 'O', 'B' or 'I'
  std::string label;
};

ParsedTag parse_tag(const std::string& tag) {
  if (tag == "O") return {};
  if (tag.size() > 2 && (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-')
    return {tag[0], tag.substr(2)};
  throw DataError("unknown tag string '" + tag + "'");
}

double safe_div(double num, double den) { return den > 0.0 ? num / den : 0.0; }

double f1_of(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

std::vector<Span> tags_to_spans(const std::vector<std::string>& tags) {
  std::vector<Span> spans;
  int open_start = -1;
  std::string open_label;
  auto close = [&](int end) {
    if (open_start >= 0) spans.push_back({open_start, end, open_label});
    open_start = -1;
    open_label.clear();
  };
  for (int t = 0; t < static_cast<int>(tags.size()); ++t) {
    const ParsedTag p = parse_tag(tags[t]);
    if (p.prefix == 'O') {
      close(t);
    } else if (p.prefix == 'B' || open_start < 0 || p.label != open_label) {
      close(t);
      open_start = t;
      open_label = p.label;
    }
    // I- with a matching open label extends the span.
  }
  close(static_cast<int>(tags.size()));
  return spans;
}

TaskScore score_task(const std::vector<std::vector<std::string>>& gold,
                     const std::vector<std::vector<std::string>>& predicted) {
  if (gold.size() != predicted.size())
    throw DataError("score: gold and predicted sentence counts differ");
  TaskScore score;
  int64_t correct_tokens = 0, total_tokens = 0;
  for (size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != predicted[s].size())
      throw DataError("score: tag length mismatch at sentence " + std::to_string(s));
    for (size_t t = 0; t < gold[s].size(); ++t) {
      ++total_tokens;
      if (gold[s][t] == predicted[s][t]) ++correct_tokens;
    }
    const auto gold_spans = tags_to_spans(gold[s]);
    const auto pred_spans = tags_to_spans(predicted[s]);
    const std::set<Span> gold_set(gold_spans.begin(), gold_spans.end());
    for (const Span& sp : pred_spans) {
      auto& label = score.per_label[sp.label];
      if (gold_set.count(sp)) {
        ++score.tp;
        ++label.tp;
      } else {
        ++score.fp;
        ++label.fp;
      }
    }
    const std::set<Span> pred_set(pred_spans.begin(), pred_spans.end());
    for (const Span& sp : gold_spans) {
      if (!pred_set.count(sp)) {
        ++score.fn;
        ++score.per_label[sp.label].fn;
      }
    }
  }
  score.precision = safe_div(static_cast<double>(score.tp), static_cast<double>(score.tp + score.fp));
  score.recall = safe_div(static_cast<double>(score.tp), static_cast<double>(score.tp + score.fn));
  score.f1 = f1_of(score.precision, score.recall);
  score.token_accuracy = safe_div(static_cast<double>(correct_tokens), static_cast<double>(total_tokens));
  for (auto& [label, c] : score.per_label) {
    c.precision = safe_div(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
    c.recall = safe_div(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
    c.f1 = f1_of(c.precision, c.recall);
    score.macro_precision += c.precision;
    score.macro_recall += c.recall;
    score.macro_f1 += c.f1;
  }
  if (!score.per_label.empty()) {
    const double n = static_cast<double>(score.per_label.size());
    score.macro_precision /= n;
    score.macro_recall /= n;
    score.macro_f1 /= n;
  }
  return score;
}

EvalReport score(const Dataset& gold, const Predictions& predicted) {
  EvalReport report;
  if (!predicted.entity.empty()) {
    std::vector<std::vector<std::string>> gold_tags;
    gold_tags.reserve(gold.sentences.size());
    for (const auto& s : gold.sentences) gold_tags.push_back(s.entity_tags);
    report.entity = score_task(gold_tags, predicted.entity);
  }
  if (!predicted.negation.empty()) {
    std::vector<std::vector<std::string>> gold_tags;
    gold_tags.reserve(gold.sentences.size());
    for (const auto& s : gold.sentences) gold_tags.push_back(s.negation_tags);
    report.negation = score_task(gold_tags, predicted.negation);
  }
  return report;
}

namespace {

void task_csv(std::ostringstream& out, const std::string& task, const TaskScore& s) {
  out << task << ",ALL," << s.tp << "," << s.fp << "," << s.fn << "," << fmt_fixed(s.precision)
      << "," << fmt_fixed(s.recall) << "," << fmt_fixed(s.f1) << "\n";
  for (const auto& [label, c] : s.per_label)
    out << task << "," << label << "," << c.tp << "," << c.fp << "," << c.fn << ","
        << fmt_fixed(c.precision) << "," << fmt_fixed(c.recall) << "," << fmt_fixed(c.f1) << "\n";
  out << task << ",MACRO,,,," << fmt_fixed(s.macro_precision) << "," << fmt_fixed(s.macro_recall)
      << "," << fmt_fixed(s.macro_f1) << "\n";
}

std::string pad(const std::string& s, size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

void task_table(std::ostringstream& out, const std::string& model, const std::string& task,
                const TaskScore& s) {
  out << pad(task, 10) << pad(model, 14) << pad(fmt_fixed(s.precision), 10)
      << pad(fmt_fixed(s.recall), 10) << fmt_fixed(s.f1) << "\n";
  for (const auto& [label, c] : s.per_label)
    out << pad("  " + label, 10 + 14) << pad(fmt_fixed(c.precision), 10)
        << pad(fmt_fixed(c.recall), 10) << fmt_fixed(c.f1) << "\n";
  out << pad("  macro", 24) << pad(fmt_fixed(s.macro_precision), 10)
      << pad(fmt_fixed(s.macro_recall), 10) << fmt_fixed(s.macro_f1) << "\n";
  out << pad("  token accuracy", 24) << fmt_fixed(s.token_accuracy) << "\n";
}

}  // namespace

std::string report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "task,label,tp,fp,fn,precision,recall,f1\n";
  if (report.entity) task_csv(out, "entity", *report.entity);
  if (report.negation) task_csv(out, "negation", *report.negation);
  return out.str();
}

std::string report_table(const EvalReport& report, const std::string& model_name) {
  std::ostringstream out;
  out << pad("Task", 10) << pad("Model", 14) << pad("P", 10) << pad("R", 10) << "F1\n";
  if (report.entity) task_table(out, model_name, "NER", *report.entity);
  if (report.negation) task_table(out, model_name, "Negation", *report.negation);
  return out.str();
}

}  // namespace jtag
