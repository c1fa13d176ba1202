#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "jtag/eval.hpp"
#include "jtag/negex.hpp"
#include "jtag/rng.hpp"
#include "jtag/synth.hpp"

using namespace jtag;

namespace {

// Independent span oracle: declarative candidate-interval check instead of
// the production left-to-right state machine.
std::vector<Span> oracle_spans(const std::vector<std::string>& tags) {
  const int n = static_cast<int>(tags.size());
  auto label_of = [&](int i) -> std::string {
    return tags[i] == "O" ? std::string() : tags[i].substr(2);
  };
  std::vector<Span> out;
  for (int s = 0; s < n; ++s) {
    if (tags[s] == "O") continue;
    const std::string lab = label_of(s);
    const bool valid_start =
        tags[s][0] == 'B' ||
        (s == 0 || !(tags[s - 1] == "B-" + lab || tags[s - 1] == "I-" + lab));
    if (!valid_start) continue;
    int e = s + 1;
    while (e < n && tags[e] == "I-" + lab) ++e;
    out.push_back({s, e, lab});
  }
  return out;
}

std::vector<std::string> random_tags(Rng& rng, int len) {
  static const std::vector<std::string> alphabet = {
      "O", "B-PROBLEM", "I-PROBLEM", "B-TEST", "I-TEST", "B-TREATMENT", "I-TREATMENT"};
  std::vector<std::string> tags;
  for (int i = 0; i < len; ++i) tags.push_back(alphabet[rng.uniform_int(alphabet.size())]);
  return tags;
}

}  // namespace

TEST_CASE("tags_to_spans basics") {
  CHECK(tags_to_spans({"O", "O", "O"}).empty());

  auto spans = tags_to_spans({"B-PROBLEM", "I-PROBLEM", "O", "B-TEST"});
  REQUIRE(spans.size() == 2);
  CHECK(spans[0] == Span{0, 2, "PROBLEM"});
  CHECK(spans[1] == Span{3, 4, "TEST"});

  // Lenient convention: orphan I- opens a span; label switch restarts.
  auto lenient = tags_to_spans({"I-TEST", "I-TEST", "I-PROBLEM", "B-PROBLEM"});
  REQUIRE(lenient.size() == 3);
  CHECK(lenient[0] == Span{0, 2, "TEST"});
  CHECK(lenient[1] == Span{2, 3, "PROBLEM"});
  CHECK(lenient[2] == Span{3, 4, "PROBLEM"});

  CHECK_THROWS_AS(tags_to_spans({"B-"}), DataError);
  CHECK_THROWS_AS(tags_to_spans({"X-PROBLEM"}), DataError);
}

TEST_CASE("tags_to_spans matches the oracle on 10^4 random sequences") {
  Rng rng(2024);
  for (int trial = 0; trial < 10000; ++trial) {
    const int len = 1 + static_cast<int>(rng.uniform_int(12));
    const auto tags = random_tags(rng, len);
    CHECK(tags_to_spans(tags) == oracle_spans(tags));
  }
}

TEST_CASE("score_task trivial cases") {
  std::vector<std::vector<std::string>> gold = {{"B-PROBLEM", "I-PROBLEM", "O"},
                                                {"O", "B-TEST", "O"}};
  auto perfect = score_task(gold, gold);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f1 == 1.0);
  CHECK(perfect.token_accuracy == 1.0);

  std::vector<std::vector<std::string>> none = {{"O", "O", "O"}, {"O", "O", "O"}};
  auto empty = score_task(gold, none);
  CHECK(empty.precision == 0.0);  // 0/0 convention
  CHECK(empty.recall == 0.0);
  CHECK(empty.f1 == 0.0);

  CHECK_THROWS_AS(score_task(gold, {{"O", "O", "O"}}), DataError);
  CHECK_THROWS_AS(score_task(gold, {{"O", "O"}, {"O", "B-TEST", "O"}}), DataError);
}

TEST_CASE("score arithmetic: TP=9 FP=1 FN=3") {
  // 12 gold single-token spans; predictions hit 9 of them, miss 3, and add
  // one spurious span.
  std::vector<std::vector<std::string>> gold, pred;
  for (int i = 0; i < 12; ++i) {
    gold.push_back({"B-PROBLEM", "O", "O"});
    if (i < 9)
      pred.push_back({"B-PROBLEM", "O", "O"});
    else
      pred.push_back({"O", "O", "O"});
  }
  gold.push_back({"O", "O", "O"});
  pred.push_back({"B-TEST", "O", "O"});
  auto s = score_task(gold, pred);
  CHECK(s.tp == 9);
  CHECK(s.fp == 1);
  CHECK(s.fn == 3);
  CHECK(s.precision == doctest::Approx(0.9));
  CHECK(s.recall == doctest::Approx(0.75));
  CHECK(s.f1 == doctest::Approx(2 * 0.9 * 0.75 / (0.9 + 0.75)).epsilon(1e-9));
}

TEST_CASE("score is permutation and duplication invariant") {
  Rng rng(99);
  std::vector<std::vector<std::string>> gold, pred;
  for (int i = 0; i < 40; ++i) {
    const int len = 1 + static_cast<int>(rng.uniform_int(10));
    gold.push_back(random_tags(rng, len));
    pred.push_back(random_tags(rng, len));
  }
  const auto base = score_task(gold, pred);

  std::vector<size_t> order(gold.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<std::vector<std::string>> gold_p, pred_p;
  for (size_t i : order) {
    gold_p.push_back(gold[i]);
    pred_p.push_back(pred[i]);
  }
  const auto shuffled = score_task(gold_p, pred_p);
  CHECK(shuffled.precision == doctest::Approx(base.precision).epsilon(1e-12));
  CHECK(shuffled.recall == doctest::Approx(base.recall).epsilon(1e-12));
  CHECK(shuffled.f1 == doctest::Approx(base.f1).epsilon(1e-12));

  auto gold_d = gold, pred_d = pred;
  gold_d.insert(gold_d.end(), gold.begin(), gold.end());
  pred_d.insert(pred_d.end(), pred.begin(), pred.end());
  const auto doubled = score_task(gold_d, pred_d);
  CHECK(doubled.tp == 2 * base.tp);
  CHECK(doubled.precision == doctest::Approx(base.precision).epsilon(1e-12));
  CHECK(doubled.recall == doctest::Approx(base.recall).epsilon(1e-12));
  CHECK(doubled.f1 == doctest::Approx(base.f1).epsilon(1e-12));
}

TEST_CASE("score matches a set-based oracle on random corpora") {
  Rng rng(501);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<std::string>> gold, pred;
    for (int i = 0; i < 20; ++i) {
      const int len = 1 + static_cast<int>(rng.uniform_int(9));
      gold.push_back(random_tags(rng, len));
      pred.push_back(random_tags(rng, len));
    }
    const auto s = score_task(gold, pred);
    int64_t tp = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < gold.size(); ++i) {
      const auto gs = oracle_spans(gold[i]);
      const auto ps = oracle_spans(pred[i]);
      const std::set<Span> gset(gs.begin(), gs.end());
      const std::set<Span> pset(ps.begin(), ps.end());
      for (const auto& sp : ps) tp += gset.count(sp) ? 1 : 0;
      for (const auto& sp : ps) fp += gset.count(sp) ? 0 : 1;
      for (const auto& sp : gs) fn += pset.count(sp) ? 0 : 1;
    }
    CHECK(s.tp == tp);
    CHECK(s.fp == fp);
    CHECK(s.fn == fn);
  }
}

TEST_CASE("report writers cover both tasks") {
  Dataset ds = synth_generate(8, 30);
  Predictions preds;
  for (const auto& s : ds.sentences) {
    preds.entity.push_back(s.entity_tags);
    preds.negation.push_back(s.negation_tags);
  }
  const EvalReport report = score(ds, preds);
  REQUIRE(report.entity.has_value());
  REQUIRE(report.negation.has_value());
  CHECK(report.entity->f1 == 1.0);
  CHECK(report.negation->f1 == 1.0);
  const std::string csv = report_csv(report);
  CHECK(csv.find("task,label,tp,fp,fn,precision,recall,f1") == 0);
  CHECK(csv.find("entity,ALL") != std::string::npos);
  CHECK(csv.find("negation,ALL") != std::string::npos);
  CHECK(csv.find("MACRO") != std::string::npos);
  const std::string table = report_table(report, "conditional");
  CHECK(table.find("NER") != std::string::npos);
  CHECK(table.find("Negation") != std::string::npos);
}

// ---------------------------------------------------------------------------
// NegEx

TEST_CASE("negex pre-cue inside window") {
  auto lex = CueLexicon::builtin();
  ScopeConfig cfg;
  const std::vector<std::string> tokens = {"patient", "denies", "taking", "tylenol"};
  const std::vector<Span> spans = {{3, 4, "TREATMENT"}};
  const auto flags = negex_predict(tokens, spans, lex, cfg);
  REQUIRE(flags.size() == 1);
  CHECK(flags[0]);
}

TEST_CASE("negex termination term bounds the scope") {
  auto lex = CueLexicon::builtin();
  ScopeConfig cfg;
  const std::vector<std::string> tokens = {"no", "evidence", "of", "fracture",
                                           "but", "has", "pain"};
  const std::vector<Span> spans = {{3, 4, "PROBLEM"}, {6, 7, "PROBLEM"}};
  const auto flags = negex_predict(tokens, spans, lex, cfg);
  CHECK(flags[0]);
  CHECK_FALSE(flags[1]);
}

TEST_CASE("negex cue-free sentence flags nothing") {
  auto lex = CueLexicon::builtin();
  const std::vector<std::string> tokens = {"patient", "reports", "chest", "pain"};
  const std::vector<Span> spans = {{2, 4, "PROBLEM"}};
  const auto flags = negex_predict(tokens, spans, lex, ScopeConfig{});
  CHECK_FALSE(flags[0]);
}

TEST_CASE("negex pseudo-cue never negates by itself") {
  auto lex = CueLexicon::builtin();
  const std::vector<std::string> tokens = {"no", "increase", "in", "pain"};
  const std::vector<Span> spans = {{3, 4, "PROBLEM"}};
  CHECK_FALSE(negex_predict(tokens, spans, lex, ScopeConfig{})[0]);

  const std::vector<std::string> tokens2 = {"pneumonia", "cannot", "be", "ruled", "out"};
  const std::vector<Span> spans2 = {{0, 1, "PROBLEM"}};
  CHECK_FALSE(negex_predict(tokens2, spans2, lex, ScopeConfig{})[0]);
}

TEST_CASE("negex post-cue looks backward") {
  auto lex = CueLexicon::builtin();
  const std::vector<std::string> tokens = {"pneumonia", "was", "ruled", "out"};
  const std::vector<Span> spans = {{0, 1, "PROBLEM"}};
  CHECK(negex_predict(tokens, spans, lex, ScopeConfig{})[0]);
}

TEST_CASE("negex window limits forward reach") {
  auto lex = CueLexicon::builtin();
  std::vector<std::string> tokens = {"denies", "a", "b", "c", "pain"};
  const std::vector<Span> spans = {{4, 5, "PROBLEM"}};
  ScopeConfig narrow{2};
  CHECK_FALSE(negex_predict(tokens, spans, lex, narrow)[0]);
  ScopeConfig wide{6};
  CHECK(negex_predict(tokens, spans, lex, wide)[0]);
}

TEST_CASE("negex is monotone in the window") {
  auto lex = CueLexicon::builtin();
  Rng rng(77);
  Dataset ds = synth_generate(13, 120);
  for (const auto& s : ds.sentences) {
    const auto spans = tags_to_spans(s.entity_tags);
    std::vector<bool> prev(spans.size(), false);
    for (int w = 1; w <= 10; ++w) {
      const auto flags = negex_predict(s.tokens, spans, lex, ScopeConfig{w});
      for (size_t i = 0; i < spans.size(); ++i) {
        if (prev[i]) CHECK(flags[i]);  // enlarging window never un-negates
      }
      prev = flags;
    }
  }
}

TEST_CASE("negex determinism") {
  auto lex = CueLexicon::builtin();
  Dataset ds = synth_generate(3, 50);
  for (const auto& s : ds.sentences) {
    const auto spans = tags_to_spans(s.entity_tags);
    CHECK(negex_predict(s.tokens, spans, lex, ScopeConfig{}) ==
          negex_predict(s.tokens, spans, lex, ScopeConfig{}));
  }
}

TEST_CASE("lexicon file parsing and validation") {
  CHECK_THROWS_AS(CueLexicon::parse("PRE\n", "f"), DataError);
  CHECK_THROWS_AS(CueLexicon::parse("WEIRD\tno\n", "f"), DataError);
  CHECK_THROWS_AS(CueLexicon::parse("PRE\tno\nPOST\tno\n", "f"), DataError);  // disjoint sets
  CHECK_THROWS_AS(CueLexicon::parse("# only comments\n", "f"), DataError);

  auto lex = CueLexicon::parse("# c\nPRE\tNo Evidence Of\nPOST\tunlikely\n", "f");
  REQUIRE(lex.pre_cues.size() == 1);
  CHECK(lex.pre_cues[0] == std::vector<std::string>{"no", "evidence", "of"});  // normalized
}

TEST_CASE("shipped lexicon file equals the builtin lexicon") {
  const auto shipped = CueLexicon::load(std::string(JTAG_DATA_DIR) + "/negex_lexicon.txt");
  CHECK(shipped.serialize() == CueLexicon::builtin().serialize());
}
