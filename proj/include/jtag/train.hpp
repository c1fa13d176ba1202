#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jtag/eval.hpp"
#include "jtag/model.hpp"
#include "jtag/synth.hpp"

namespace jtag {

enum class SelectionMetric { Macro, Entity, Negation };

const char* selection_metric_name(SelectionMetric m);
SelectionMetric parse_selection_metric(const std::string& name);

struct TrainConfig {
  int epochs_max = 50;
  int patience = 5;
  int batch_size = 8;
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 5.0;
  uint64_t seed = 42;
  double lambda_negation = 1.0;  // weight of the negation loss term
  SelectionMetric selection = SelectionMetric::Macro;

  // Rejects combinations that cannot run, e.g. negation-based selection for
  // an entity-only variant.
  void validate(Variant variant) const;
};

struct EpochStats {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;  // mean per-sentence loss
  double dev_entity_f1 = 0.0;
  double dev_negation_f1 = 0.0;
  double wall_seconds = 0.0;  // excluded from the CSV log
  bool best = false;
};

struct TrainLog {
  std::vector<EpochStats> epochs;
  int best_epoch = 0;  // 1-based, 0 when no epoch ran
};

// Teacher-forced joint loss: sum of per-step entity cross-entropies plus
// lambda times the negation cross-entropies; inactive tasks contribute
// nothing.
TensorPtr joint_loss(Graph& g, const JointModel& model, const Sentence& sentence,
                     double lambda_negation, Rng* dropout_rng);

// Greedy predictions for every sentence; inactive tasks stay empty.
Predictions predict_all(const JointModel& model, const Dataset& data);

double selection_score(const EvalReport& report, SelectionMetric metric);

// Shuffled mini-batch training with Adam, gradient clipping, and early
// stopping on the dev selection metric. The model ends at the best-dev
// parameters, not the last ones.
TrainLog train(JointModel& model, const Dataset& train_data, const Dataset& dev_data,
               const TrainConfig& cfg);

// CSV form of the log (wall time omitted so identically seeded runs are
// byte-identical).
std::string train_log_csv(const TrainLog& log);

struct ExperimentRow {
  std::string variant;
  double fraction = 1.0;
  uint64_t seed = 0;
  std::string task;  // entity|negation
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct ExperimentSummaryRow {
  std::string variant;
  double fraction = 1.0;
  std::string task;
  int n = 0;
  double f1_mean = 0.0;
  double f1_std = 0.0;  // sample standard deviation
};

// Runs the (variant, fraction, seed) grid: subsample the training split,
// build the vocab from the subsample, train, score on the test split.
// Cells may run on `jobs` worker threads; they share only read-only data and
// results are merged in cell order, so scheduling cannot change the output.
std::vector<ExperimentRow> low_resource_experiment(
    const Dataset& train_data, const Dataset& dev_data, const Dataset& test_data,
    const ModelConfig& base_cfg, const TrainConfig& base_train,
    const std::vector<Variant>& variants, const std::vector<double>& fractions,
    const std::vector<uint64_t>& seeds, int jobs);

std::vector<ExperimentSummaryRow> summarize_experiment(const std::vector<ExperimentRow>& rows);

std::string experiment_runs_csv(const std::vector<ExperimentRow>& rows);
std::string experiment_summary_csv(const std::vector<ExperimentSummaryRow>& rows);
// x/y rows (fraction, mean negation F1) per variant for the
// low-resource curve.
std::string plot_data_csv(const std::vector<ExperimentSummaryRow>& rows);

}  // namespace jtag
