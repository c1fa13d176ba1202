#include "jtag/train.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "jtag/io.hpp"

namespace jtag {

const char* selection_metric_name(SelectionMetric m) {
  switch (m) {
    case SelectionMetric::Macro: return "macro";
    case SelectionMetric::Entity: return "entity";
    case SelectionMetric::Negation: return "negation";
  }
  throw UsageError("unknown selection metric");
}

SelectionMetric parse_selection_metric(const std::string& name) {
  if (name == "macro") return SelectionMetric::Macro;
  if (name == "entity") return SelectionMetric::Entity;
  if (name == "negation") return SelectionMetric::Negation;
  throw UsageError("unknown selection metric '" + name + "' (expected macro|entity|negation)");
}

void TrainConfig::validate(Variant variant) const {
  if (epochs_max < 0) throw UsageError("train: epochs_max must be >= 0");
  if (patience < 1) throw UsageError("train: patience must be >= 1");
  if (batch_size < 1) throw UsageError("train: batch_size must be >= 1");
  if (lambda_negation < 0.0) throw UsageError("train: lambda_negation must be >= 0");
  if (selection == SelectionMetric::Negation && !has_negation_task(variant))
    throw UsageError("train: negation selection metric with an entity-only variant");
  if (selection == SelectionMetric::Entity && !has_entity_task(variant))
    throw UsageError("train: entity selection metric with a negation-only variant");
}

TensorPtr joint_loss(Graph& g, const JointModel& model, const Sentence& sentence,
                     double lambda_negation, Rng* dropout_rng) {
  const Vocab& vocab = model.vocab();
  const auto fwd = model.forward_teacher_forced(g, sentence, dropout_rng);
  std::vector<TensorPtr> terms;
  terms.reserve(2 * sentence.size());
  for (size_t t = 0; t < fwd.entity_probs.size(); ++t)
    terms.push_back(
        cross_entropy(g, fwd.entity_probs[t], vocab.entity_tag_id(sentence.entity_tags[t])));
  for (size_t t = 0; t < fwd.negation_probs.size(); ++t) {
    auto ce = cross_entropy(g, fwd.negation_probs[t], vocab.negation_tag_id(sentence.negation_tags[t]));
    terms.push_back(lambda_negation == 1.0 ? ce : scale(g, ce, lambda_negation));
  }
  if (terms.empty()) throw UsageError("joint_loss: variant produced no loss terms");
  return add_many(g, terms);
}

Predictions predict_all(const JointModel& model, const Dataset& data) {
  Predictions preds;
  const bool ent = has_entity_task(model.config().variant);
  const bool neg = has_negation_task(model.config().variant);
  for (const Sentence& s : data.sentences) {
    auto [e, n] = model.greedy_decode(s);
    if (ent) preds.entity.push_back(std::move(e));
    if (neg) preds.negation.push_back(std::move(n));
  }
  return preds;
}

double selection_score(const EvalReport& report, SelectionMetric metric) {
  switch (metric) {
    case SelectionMetric::Entity:
      if (!report.entity) throw UsageError("selection: entity score unavailable");
      return report.entity->f1;
    case SelectionMetric::Negation:
      if (!report.negation) throw UsageError("selection: negation score unavailable");
      return report.negation->f1;
    case SelectionMetric::Macro: {
      double total = 0.0;
      int n = 0;
      if (report.entity) {
        total += report.entity->f1;
        ++n;
      }
      if (report.negation) {
        total += report.negation->f1;
        ++n;
      }
      if (n == 0) throw UsageError("selection: no task scores available");
      return total / n;
    }
  }
  throw UsageError("unknown selection metric");
}

TrainLog train(JointModel& model, const Dataset& train_data, const Dataset& dev_data,
               const TrainConfig& cfg) {
  cfg.validate(model.config().variant);
  if (train_data.sentences.empty() || dev_data.sentences.empty())
    throw DataError("train: train and dev splits must be non-empty");

  Rng root(cfg.seed);
  Rng shuffle_rng = root.fork("shuffle");
  Rng dropout_rng = root.fork("dropout");
  Adam adam(model.params(), {cfg.lr, cfg.beta1, cfg.beta2, cfg.epsilon});

  TrainLog log;
  auto best_values = model.params().snapshot_values();
  double best_score = -std::numeric_limits<double>::infinity();
  int epochs_since_best = 0;

  std::vector<size_t> order(train_data.sentences.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 1; epoch <= cfg.epochs_max; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(cfg.batch_size)) {
      model.params().zero_grads();
      const size_t stop = std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
      for (size_t i = start; i < stop; ++i) {
        Graph g;
        g.training = true;
        auto loss = joint_loss(g, model, train_data.sentences[order[i]], cfg.lambda_negation,
                               &dropout_rng);
        const double value = loss->data[0];
        if (!std::isfinite(value))
          throw NumericError("training diverged: non-finite loss at epoch " +
                             std::to_string(epoch) + ", batch " +
                             std::to_string(start / static_cast<size_t>(cfg.batch_size)));
        loss_sum += value;
        g.tape.backward_from(loss);
      }
      clip_gradients(model.params(), cfg.clip_norm);
      adam.step(model.params());
    }

    const EvalReport report = score(dev_data, predict_all(model, dev_data));
    const double sel = selection_score(report, cfg.selection);

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(train_data.sentences.size());
    stats.dev_entity_f1 = report.entity ? report.entity->f1 : 0.0;
    stats.dev_negation_f1 = report.negation ? report.negation->f1 : 0.0;
    stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (sel > best_score) {
      best_score = sel;
      best_values = model.params().snapshot_values();
      log.best_epoch = epoch;
      epochs_since_best = 0;
      stats.best = true;
    } else {
      ++epochs_since_best;
    }
    log.epochs.push_back(stats);
    if (epochs_since_best >= cfg.patience) break;
  }

  model.params().restore_values(best_values);
  return log;
}

std::string train_log_csv(const TrainLog& log) {
  std::ostringstream out;
  out << "epoch,train_loss,dev_entity_f1,dev_negation_f1,best\n";
  for (const EpochStats& e : log.epochs)
    out << e.epoch << "," << fmt_fixed(e.train_loss) << "," << fmt_fixed(e.dev_entity_f1) << ","
        << fmt_fixed(e.dev_negation_f1) << "," << (e.best ? 1 : 0) << "\n";
  return out.str();
}

std::vector<ExperimentRow> low_resource_experiment(
    const Dataset& train_data, const Dataset& dev_data, const Dataset& test_data,
    const ModelConfig& base_cfg, const TrainConfig& base_train,
    const std::vector<Variant>& variants, const std::vector<double>& fractions,
    const std::vector<uint64_t>& seeds, int jobs) {
  if (variants.empty() || fractions.empty() || seeds.empty())
    throw UsageError("experiment: variants, fractions and seeds must be non-empty");
  for (size_t i = 1; i < fractions.size(); ++i)
    if (fractions[i] < fractions[i - 1])
      throw UsageError("experiment: fractions must be sorted ascending");

  struct Cell {
    Variant variant;
    double fraction;
    uint64_t seed;
  };
  std::vector<Cell> cells;
  for (Variant v : variants)
    for (double f : fractions)
      for (uint64_t s : seeds) cells.push_back({v, f, s});

  std::vector<std::vector<ExperimentRow>> results(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<size_t> next{0};

  auto worker = [&]() {
    while (true) {
      const size_t idx = next.fetch_add(1);
      if (idx >= cells.size()) return;
      const Cell& cell = cells[idx];
      try {
        const Dataset sub = subsample(train_data, cell.fraction, cell.seed);
        ModelConfig cfg = base_cfg;
        cfg.variant = cell.variant;
        TrainConfig tcfg = base_train;
        tcfg.seed = cell.seed;
        JointModel model(cfg, Vocab::build(sub), cell.seed);
        train(model, sub, dev_data, tcfg);
        const EvalReport report = score(test_data, predict_all(model, test_data));
        auto push = [&](const char* task, const TaskScore& s) {
          results[idx].push_back({variant_name(cell.variant), cell.fraction, cell.seed, task,
                                  s.precision, s.recall, s.f1});
        };
        if (report.entity) push("entity", *report.entity);
        if (report.negation) push("negation", *report.negation);
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    }
  };

  const int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(cells.size())));
  std::vector<std::thread> threads;
  threads.reserve(static_cast<size_t>(n_workers));
  for (int w = 0; w < n_workers; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);

  std::vector<ExperimentRow> rows;
  for (const auto& cell_rows : results)
    rows.insert(rows.end(), cell_rows.begin(), cell_rows.end());
  return rows;
}

std::vector<ExperimentSummaryRow> summarize_experiment(const std::vector<ExperimentRow>& rows) {
  std::vector<ExperimentSummaryRow> summary;
  auto find = [&](const ExperimentRow& r) -> ExperimentSummaryRow* {
    for (auto& s : summary)
      if (s.variant == r.variant && s.fraction == r.fraction && s.task == r.task) return &s;
    return nullptr;
  };
  // First pass: means, preserving first-appearance order.
  for (const auto& r : rows) {
    ExperimentSummaryRow* s = find(r);
    if (!s) {
      summary.push_back({r.variant, r.fraction, r.task, 0, 0.0, 0.0});
      s = &summary.back();
    }
    ++s->n;
    s->f1_mean += r.f1;
  }
  for (auto& s : summary) s.f1_mean /= std::max(1, s.n);
  for (const auto& r : rows) {
    ExperimentSummaryRow* s = find(r);
    s->f1_std += (r.f1 - s->f1_mean) * (r.f1 - s->f1_mean);
  }
  for (auto& s : summary)
    s.f1_std = s.n > 1 ? std::sqrt(s.f1_std / (s.n - 1)) : 0.0;
  return summary;
}

std::string experiment_runs_csv(const std::vector<ExperimentRow>& rows) {
  std::ostringstream out;
  out << "variant,fraction,seed,task,precision,recall,f1\n";
  for (const auto& r : rows)
    out << r.variant << "," << fmt_fixed(r.fraction) << "," << r.seed << "," << r.task << ","
        << fmt_fixed(r.precision) << "," << fmt_fixed(r.recall) << "," << fmt_fixed(r.f1) << "\n";
  return out.str();
}

std::string experiment_summary_csv(const std::vector<ExperimentSummaryRow>& rows) {
  std::ostringstream out;
  out << "variant,fraction,task,n_seeds,f1_mean,f1_std\n";
  for (const auto& r : rows)
    out << r.variant << "," << fmt_fixed(r.fraction) << "," << r.task << "," << r.n << ","
        << fmt_fixed(r.f1_mean) << "," << fmt_fixed(r.f1_std) << "\n";
  return out.str();
}

std::string plot_data_csv(const std::vector<ExperimentSummaryRow>& rows) {
  std::ostringstream out;
  out << "variant,fraction,negation_f1_mean\n";
  for (const auto& r : rows)
    if (r.task == "negation")
      out << r.variant << "," << fmt_fixed(r.fraction) << "," << fmt_fixed(r.f1_mean) << "\n";
  return out.str();
}

}  // namespace jtag
