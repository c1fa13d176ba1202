#include "jtag/cli.hpp"

#include <filesystem>
#include <sstream>

#include "CLI11.hpp"
#include "jtag/checkpoint.hpp"
#include "jtag/io.hpp"
#include "jtag/negex.hpp"
#include "jtag/synth.hpp"
#include "jtag/train.hpp"

namespace jtag::cli {

namespace {

namespace fs = std::filesystem;

struct ModelFlags {
  ModelConfig cfg;
  std::string variant = "conditional";
  std::string task = "ner";
};

void add_model_flags(CLI::App* cmd, ModelFlags& mf) {
  cmd->add_option("--variant", mf.variant,
                  "Decoder variant: conditional|two|shared|independent "
                  "(or independent_ner|independent_negation)")
      ->default_val("conditional");
  cmd->add_option("--task", mf.task, "Task for --variant independent: ner|negation")
      ->default_val("ner");
  cmd->add_option("--word-dim", mf.cfg.word_emb_dim, "Word embedding dimensions")
      ->default_val(100);
  cmd->add_option("--char-dim", mf.cfg.char_emb_dim, "Character embedding dimensions")
      ->default_val(25);
  cmd->add_option("--tag-dim", mf.cfg.tag_emb_dim, "Tag embedding dimensions")->default_val(50);
  cmd->add_option("--char-hidden", mf.cfg.char_hidden, "Character encoder hidden units")
      ->default_val(50);
  cmd->add_option("--word-hidden", mf.cfg.word_hidden, "Word encoder hidden units")
      ->default_val(100);
  cmd->add_option("--tagger-hidden", mf.cfg.tagger_hidden, "Tagger LSTM hidden units")
      ->default_val(50);
  cmd->add_option("--dropout", mf.cfg.dropout_rate, "Dropout rate")->default_val(0.5);
  cmd->add_flag("--dropout-char,!--no-dropout-char", mf.cfg.dropout_on_char,
                "Dropout on char-LSTM outputs");
  cmd->add_flag("--dropout-input,!--no-dropout-input", mf.cfg.dropout_on_input,
                "Dropout on combined word inputs");
  cmd->add_flag("--dropout-word,!--no-dropout-word", mf.cfg.dropout_on_word,
                "Dropout on word-LSTM outputs");
  cmd->add_flag("--heads-on-encoder", mf.cfg.heads_on_encoder,
                "Ablation: softmax heads read encoder states directly");
  cmd->add_flag("--stop-entity-gradient", mf.cfg.stop_entity_gradient,
                "Ablation: detach the entity distribution fed to the negation head");
}

Variant resolve_variant(const CLI::App* cmd, const ModelFlags& mf) {
  std::string name = mf.variant;
  if (name == "independent") name = mf.task == "negation" ? "independent_negation" : "independent_ner";
  if (mf.task != "ner" && mf.task != "negation")
    throw UsageError("--task must be ner or negation");
  if (cmd->count("--task") > 0 && mf.variant != "independent")
    throw UsageError("--task applies only to --variant independent");
  return parse_variant(name);
}

struct TrainFlags {
  TrainConfig cfg;
  std::string selection = "macro";
  int min_word_freq = 1;
  std::string embeddings;
};

void add_train_flags(CLI::App* cmd, TrainFlags& tf) {
  cmd->add_option("--epochs", tf.cfg.epochs_max, "Maximum training epochs")->default_val(50);
  cmd->add_option("--patience", tf.cfg.patience, "Early-stopping patience (epochs)")
      ->default_val(5);
  cmd->add_option("--batch", tf.cfg.batch_size, "Sentences per optimizer step")->default_val(8);
  cmd->add_option("--lr", tf.cfg.lr, "Adam learning rate")->default_val(0.001);
  cmd->add_option("--beta1", tf.cfg.beta1, "Adam beta1")->default_val(0.9);
  cmd->add_option("--beta2", tf.cfg.beta2, "Adam beta2")->default_val(0.999);
  cmd->add_option("--epsilon", tf.cfg.epsilon, "Adam epsilon")->default_val(1e-8);
  cmd->add_option("--clip", tf.cfg.clip_norm, "Global gradient-norm clip")->default_val(5.0);
  cmd->add_option("--seed", tf.cfg.seed, "Seed for init, shuffling and dropout")
      ->default_val(42);
  cmd->add_option("--lambda", tf.cfg.lambda_negation, "Negation loss weight")->default_val(1.0);
  cmd->add_option("--selection", tf.selection,
                  "Early-stopping metric: macro|entity|negation")
      ->default_val("macro");
  cmd->add_option("--min-word-freq", tf.min_word_freq,
                  "Words rarer than this in train map to UNK")
      ->default_val(1);
  cmd->add_option("--embeddings", tf.embeddings,
                  "Optional pretrained word vectors (GloVe text layout)");
}

void configure_subcommand(CLI::App* cmd) {
  cmd->set_config("--config", "", "Flat key=value config file; flags override it");
  cmd->allow_config_extras(CLI::config_extras_mode::error);
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  for (const auto& piece : split(csv, ','))
    if (!piece.empty()) out.push_back(piece);
  if (out.empty()) throw UsageError("empty list option");
  return out;
}

// --- generate ---------------------------------------------------------------

struct GenerateFlags {
  std::string out_dir;
  uint64_t seed = 7;
  int n = 2000;
  std::string split = "80/10/10";
  SynthConfig synth;
};

int cmd_generate(const GenerateFlags& gf, std::ostream& out) {
  const auto parts = split(gf.split, '/');
  if (parts.size() != 3) throw UsageError("--split must look like 80/10/10");
  int pct[3];
  for (int i = 0; i < 3; ++i) {
    try {
      pct[i] = std::stoi(parts[static_cast<size_t>(i)]);
    } catch (const std::exception&) {
      throw UsageError("--split must contain integers");
    }
  }
  if (pct[0] + pct[1] + pct[2] != 100 || pct[0] <= 0 || pct[1] < 0 || pct[2] < 0)
    throw UsageError("--split percentages must be positive and sum to 100");
  // Train and test take their floors; dev gets the remainder.
  const int n_train = gf.n * pct[0] / 100;
  const int n_test = gf.n * pct[2] / 100;
  const int n_dev = gf.n - n_train - n_test;
  if (n_train < 1 || n_dev < 1 || n_test < 1)
    throw UsageError("--n too small for the requested split");

  Rng root(gf.seed);
  const uint64_t seeds[3] = {root.next_u64(), root.next_u64(), root.next_u64()};
  const std::pair<const char*, int> splits[3] = {
      {"train", n_train}, {"dev", n_dev}, {"test", n_test}};
  for (int i = 0; i < 3; ++i) {
    Dataset ds = synth_generate(seeds[i], splits[i].second, gf.synth);
    ds.split = splits[i].first;
    const std::string path = (fs::path(gf.out_dir) / (std::string(splits[i].first) + ".conll")).string();
    write_conll(ds, path);
    out << "wrote " << path << "\n" << format_stats(corpus_stats(ds)) << "\n";
  }
  return 0;
}

// --- train ------------------------------------------------------------------

struct TrainCmdFlags {
  std::string train_path, dev_path, checkpoint_path, log_path;
  ModelFlags model;
  TrainFlags tr;
};

int cmd_train(const CLI::App* cmd, const TrainCmdFlags& f, std::ostream& out) {
  ModelConfig cfg = f.model.cfg;
  cfg.variant = resolve_variant(cmd, f.model);
  cfg.validate();
  TrainConfig tcfg = f.tr.cfg;
  tcfg.selection = parse_selection_metric(f.tr.selection);
  tcfg.validate(cfg.variant);  // conflicts fail before any training work

  const Dataset train_ds = load_conll(f.train_path);
  const Dataset dev_ds = load_conll(f.dev_path);
  Vocab vocab = Vocab::build(train_ds, f.tr.min_word_freq);
  JointModel model(cfg, std::move(vocab), tcfg.seed);
  if (!f.tr.embeddings.empty()) {
    const int64_t n = load_pretrained_embeddings(f.tr.embeddings, model.vocab(),
                                                 *model.params().find("encoder.word_emb"));
    out << "initialized " << n << " word vectors from " << f.tr.embeddings << "\n";
  }

  const TrainLog log = train(model, train_ds, dev_ds, tcfg);
  save_checkpoint(model, f.checkpoint_path);
  const std::string log_path = f.log_path.empty() ? f.checkpoint_path + ".log.csv" : f.log_path;
  atomic_write_file(log_path, train_log_csv(log));

  out << "checkpoint: " << f.checkpoint_path << "\n"
      << "log:        " << log_path << "\n"
      << "epochs run: " << log.epochs.size() << ", best epoch: " << log.best_epoch << "\n";
  if (!log.epochs.empty()) {
    const auto& best = log.epochs[static_cast<size_t>(log.best_epoch - 1)];
    out << "best dev entity F1:   " << fmt_fixed(best.dev_entity_f1) << "\n"
        << "best dev negation F1: " << fmt_fixed(best.dev_negation_f1) << "\n";
  }
  return 0;
}

// --- evaluate / predict -----------------------------------------------------

struct EvaluateFlags {
  std::string test_path, checkpoint_path, out_csv;
  std::string expected_variant;
};

int cmd_evaluate(const EvaluateFlags& f, std::ostream& out) {
  auto model = load_checkpoint(f.checkpoint_path);
  if (!f.expected_variant.empty() &&
      parse_variant(f.expected_variant) != model->config().variant)
    throw UsageError("checkpoint variant is " + std::string(variant_name(model->config().variant)) +
                     ", not " + f.expected_variant);
  const Dataset test_ds = load_conll(f.test_path);
  const EvalReport report = score(test_ds, predict_all(*model, test_ds));
  out << report_table(report, variant_name(model->config().variant));
  if (!f.out_csv.empty()) {
    atomic_write_file(f.out_csv, report_csv(report));
    out << "report: " << f.out_csv << "\n";
  }
  return 0;
}

struct PredictFlags {
  std::string input_path, checkpoint_path, out_path;
};

int cmd_predict(const PredictFlags& f, std::ostream& out) {
  auto model = load_checkpoint(f.checkpoint_path);
  const Dataset input = load_conll(f.input_path);
  Dataset tagged;
  tagged.split = "predicted";
  for (const Sentence& s : input.sentences) {
    auto [ent, neg] = model->greedy_decode(s);
    Sentence p;
    p.tokens = s.tokens;
    p.entity_tags = ent.empty() ? std::vector<std::string>(s.size(), "O") : std::move(ent);
    p.negation_tags = neg.empty() ? std::vector<std::string>(s.size(), "O") : std::move(neg);
    tagged.sentences.push_back(std::move(p));
  }
  write_conll(tagged, f.out_path);
  out << "wrote " << f.out_path << " (" << tagged.sentences.size() << " sentences)\n";
  return 0;
}

// --- experiment ---------------------------------------------------------------

struct ExperimentFlags {
  std::string train_path, dev_path, test_path, out_dir;
  std::string variants = "two,shared,conditional";
  std::string fractions = "0.05,0.1,0.25,0.5,1.0";
  std::string seeds = "1,2,3,4,5";
  int jobs = 2;
  bool emit_plot_data = false;
  ModelFlags model;
  TrainFlags tr;
};

int cmd_experiment(const CLI::App* cmd, const ExperimentFlags& f, std::ostream& out) {
  ModelConfig cfg = f.model.cfg;
  cfg.variant = resolve_variant(cmd, f.model);
  cfg.validate();
  TrainConfig tcfg = f.tr.cfg;
  tcfg.selection = parse_selection_metric(f.tr.selection);

  std::vector<Variant> variants;
  for (const auto& name : split_list(f.variants)) variants.push_back(parse_variant(name));
  std::vector<double> fractions;
  for (const auto& v : split_list(f.fractions)) fractions.push_back(std::stod(v));
  std::vector<uint64_t> seeds;
  for (const auto& v : split_list(f.seeds)) seeds.push_back(std::stoull(v));
  for (Variant v : variants) tcfg.validate(v);

  const Dataset train_ds = load_conll(f.train_path);
  const Dataset dev_ds = load_conll(f.dev_path);
  const Dataset test_ds = load_conll(f.test_path);

  const auto rows = low_resource_experiment(train_ds, dev_ds, test_ds, cfg, tcfg, variants,
                                            fractions, seeds, f.jobs);
  const auto summary = summarize_experiment(rows);

  const std::string runs_path = (fs::path(f.out_dir) / "runs.csv").string();
  const std::string summary_path = (fs::path(f.out_dir) / "summary.csv").string();
  atomic_write_file(runs_path, experiment_runs_csv(rows));
  atomic_write_file(summary_path, experiment_summary_csv(summary));
  out << "wrote " << runs_path << "\nwrote " << summary_path << "\n";
  if (f.emit_plot_data) {
    const std::string plot_path = (fs::path(f.out_dir) / "plot_data.csv").string();
    atomic_write_file(plot_path, plot_data_csv(summary));
    out << "wrote " << plot_path << "\n";
  }
  out << experiment_summary_csv(summary);
  return 0;
}

// --- negex --------------------------------------------------------------------

struct NegexFlags {
  std::string test_path, lexicon_path, out_csv, flags_out, checkpoint_path;
  std::string spans = "gold";
  int window = 6;
};

int cmd_negex(const NegexFlags& f, std::ostream& out) {
  const Dataset test_ds = load_conll(f.test_path);
  const CueLexicon lexicon =
      f.lexicon_path.empty() ? CueLexicon::builtin() : CueLexicon::load(f.lexicon_path);
  const ScopeConfig scope{f.window};

  std::unique_ptr<JointModel> model;
  if (f.spans == "model") {
    if (f.checkpoint_path.empty())
      throw UsageError("--spans model requires --checkpoint");
    model = load_checkpoint(f.checkpoint_path);
    if (!has_entity_task(model->config().variant))
      throw UsageError("checkpoint variant has no entity task to provide spans");
  } else if (f.spans != "gold") {
    throw UsageError("--spans must be gold or model");
  }

  Predictions preds;
  std::ostringstream flags_csv;
  flags_csv << "sentence,start,end,label,negated\n";
  for (size_t i = 0; i < test_ds.sentences.size(); ++i) {
    const Sentence& s = test_ds.sentences[i];
    std::vector<Span> spans;
    if (model) {
      auto [ent, neg] = model->greedy_decode(s);
      spans = tags_to_spans(ent);
    } else {
      spans = tags_to_spans(s.entity_tags);
    }
    const auto negated = negex_predict(s.tokens, spans, lexicon, scope);
    std::vector<std::string> neg_tags(s.size(), "O");
    for (size_t k = 0; k < spans.size(); ++k) {
      flags_csv << i << "," << spans[k].start << "," << spans[k].end << "," << spans[k].label
                << "," << (negated[k] ? 1 : 0) << "\n";
      if (!negated[k]) continue;
      for (int t = spans[k].start; t < spans[k].end; ++t)
        neg_tags[static_cast<size_t>(t)] = t == spans[k].start ? "B-NEG" : "I-NEG";
    }
    preds.negation.push_back(std::move(neg_tags));
  }

  const EvalReport report = score(test_ds, preds);
  out << report_table(report, "negex");
  if (!f.out_csv.empty()) {
    atomic_write_file(f.out_csv, report_csv(report));
    out << "report: " << f.out_csv << "\n";
  }
  if (!f.flags_out.empty()) {
    atomic_write_file(f.flags_out, flags_csv.str());
    out << "flags: " << f.flags_out << "\n";
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"jtagger: joint clinical entity and negation tagging"};
  app.require_subcommand(1);

  GenerateFlags gf;
  CLI::App* generate = app.add_subcommand("generate", "Write a synthetic corpus");
  configure_subcommand(generate);
  generate->add_option("--out", gf.out_dir, "Output directory")->required();
  generate->add_option("--seed", gf.seed, "Corpus seed")->default_val(7);
  generate->add_option("--n", gf.n, "Total sentences across splits")->default_val(2000);
  generate->add_option("--split", gf.split, "train/dev/test percentages")->default_val("80/10/10");
  generate->add_option("--negation-rate", gf.synth.negation_rate,
                       "Fraction of PROBLEM spans negated")->default_val(0.35);
  generate->add_option("--misspell-rate", gf.synth.misspell_rate, "Per-token corruption rate")
      ->default_val(0.03);
  generate->add_option("--abbrev-rate", gf.synth.abbrev_rate, "Per-token abbreviation rate")
      ->default_val(0.10);
  generate->add_option("--two-clause-rate", gf.synth.two_clause_rate,
                       "Probability of a second clause")->default_val(0.35);

  TrainCmdFlags tf;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a model");
  configure_subcommand(train_cmd);
  train_cmd->add_option("--train", tf.train_path, "Training corpus")->required();
  train_cmd->add_option("--dev", tf.dev_path, "Development corpus (early stopping)")->required();
  train_cmd->add_option("--checkpoint", tf.checkpoint_path, "Checkpoint output path")->required();
  train_cmd->add_option("--log", tf.log_path, "Training log CSV (default: <checkpoint>.log.csv)");
  add_model_flags(train_cmd, tf.model);
  add_train_flags(train_cmd, tf.tr);

  EvaluateFlags ef;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score a checkpoint on a test corpus");
  configure_subcommand(evaluate);
  evaluate->add_option("--test", ef.test_path, "Test corpus")->required();
  evaluate->add_option("--checkpoint", ef.checkpoint_path, "Checkpoint to evaluate")->required();
  evaluate->add_option("--out-csv", ef.out_csv, "Write the report CSV here");
  evaluate->add_option("--variant", ef.expected_variant,
                       "Fail unless the checkpoint has this variant");

  PredictFlags pf;
  CLI::App* predict = app.add_subcommand("predict", "Tag a corpus with a checkpoint");
  configure_subcommand(predict);
  predict->add_option("--input", pf.input_path, "Input corpus (tags may be all O)")->required();
  predict->add_option("--checkpoint", pf.checkpoint_path, "Checkpoint to use")->required();
  predict->add_option("--out", pf.out_path, "Tagged corpus output path")->required();

  ExperimentFlags xf;
  CLI::App* experiment = app.add_subcommand("experiment", "Low-resource training grid");
  configure_subcommand(experiment);
  experiment->add_option("--train", xf.train_path, "Training corpus")->required();
  experiment->add_option("--dev", xf.dev_path, "Development corpus")->required();
  experiment->add_option("--test", xf.test_path, "Test corpus")->required();
  experiment->add_option("--out", xf.out_dir, "Output directory")->required();
  experiment->add_option("--variants", xf.variants, "Comma-separated variants")
      ->default_val("two,shared,conditional");
  experiment->add_option("--fractions", xf.fractions, "Comma-separated fractions, ascending")
      ->default_val("0.05,0.1,0.25,0.5,1.0");
  experiment->add_option("--seeds", xf.seeds, "Comma-separated seeds")->default_val("1,2,3,4,5");
  experiment->add_option("--jobs", xf.jobs, "Worker threads for grid cells")->default_val(2);
  experiment->add_flag("--emit-plot-data", xf.emit_plot_data,
                       "Also write fraction/F1 curve points");
  add_model_flags(experiment, xf.model);
  add_train_flags(experiment, xf.tr);

  NegexFlags nf;
  CLI::App* negex = app.add_subcommand("negex", "Rule-based negation baseline");
  configure_subcommand(negex);
  negex->add_option("--test", nf.test_path, "Corpus to score")->required();
  negex->add_option("--lexicon", nf.lexicon_path, "Cue lexicon file (default: builtin)");
  negex->add_option("--window", nf.window, "Scope window in tokens")->default_val(6);
  negex->add_option("--spans", nf.spans, "Entity spans to assert over: gold|model")
      ->default_val("gold");
  negex->add_option("--checkpoint", nf.checkpoint_path, "Checkpoint for --spans model");
  negex->add_option("--out-csv", nf.out_csv, "Write the report CSV here");
  negex->add_option("--flags-out", nf.flags_out, "Write per-span negation flags CSV here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (generate->parsed()) return cmd_generate(gf, out);
    if (train_cmd->parsed()) return cmd_train(train_cmd, tf, out);
    if (evaluate->parsed()) return cmd_evaluate(ef, out);
    if (predict->parsed()) return cmd_predict(pf, out);
    if (experiment->parsed()) return cmd_experiment(experiment, xf, out);
    if (negex->parsed()) return cmd_negex(nf, out);
    throw UsageError("no subcommand given");
  } catch (const CLI::CallForHelp&) {
    const CLI::App* scope = &app;
    while (!scope->get_subcommands().empty()) scope = scope->get_subcommands().front();
    out << scope->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace jtag::cli
