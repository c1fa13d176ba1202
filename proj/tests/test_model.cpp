#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "jtag/checkpoint.hpp"
#include "jtag/io.hpp"
#include "jtag/model.hpp"
#include "jtag/synth.hpp"
#include "jtag/train.hpp"
#include "testutil.hpp"

using namespace jtag;

namespace {

ModelConfig tiny_config(Variant v) {
  ModelConfig cfg;
  cfg.word_emb_dim = 8;
  cfg.char_emb_dim = 4;
  cfg.tag_emb_dim = 4;
  cfg.char_hidden = 4;
  cfg.word_hidden = 8;
  cfg.tagger_hidden = 4;
  cfg.dropout_rate = 0.0;
  cfg.variant = v;
  return cfg;
}

Dataset tiny_corpus() { return synth_generate(42, 24); }

Sentence sample_sentence() {
  Sentence s;
  s.tokens = {"Patient", "denies", "chest", "pain", "."};
  s.entity_tags = {"O", "O", "B-PROBLEM", "I-PROBLEM", "O"};
  s.negation_tags = {"O", "O", "B-NEG", "I-NEG", "O"};
  return s;
}

void zero_params_with_prefix(JointModel& model, const std::string& prefix) {
  for (const auto& [name, t] : model.params().items())
    if (name.rfind(prefix, 0) == 0) std::fill(t->data.begin(), t->data.end(), 0.0);
}

}  // namespace

TEST_CASE("encoder shapes under the default config") {
  ModelConfig cfg;  // defaults: 100/25/50 dims, 50/100/50 hidden
  cfg.variant = Variant::ConditionalSoftmax;
  Vocab vocab = Vocab::build(tiny_corpus());
  JointModel model(cfg, vocab, 1);
  Graph g;
  const auto enc = model.encode(g, sample_sentence(), nullptr);
  REQUIRE(enc.size() == 5);
  for (size_t t = 0; t < enc.size(); ++t) {
    CHECK(enc.char_vectors[t]->shape == std::vector<int64_t>{100});
    CHECK(enc.combined[t]->shape == std::vector<int64_t>{200});
    CHECK(enc.states[t]->shape == std::vector<int64_t>{200});
  }
}

TEST_CASE("char encoder: tied directions agree on palindromes and length-1 words") {
  auto cfg = tiny_config(Variant::ConditionalSoftmax);
  Vocab vocab = Vocab::build(tiny_corpus());
  JointModel model(cfg, vocab, 3);
  // Tie the backward char LSTM to the forward one.
  for (const char* leaf : {"input_weights", "recurrent_weights", "bias"}) {
    auto fwd = model.params().find(std::string("encoder.char_fwd.") + leaf);
    auto bwd = model.params().find(std::string("encoder.char_bwd.") + leaf);
    bwd->data = fwd->data;
  }
  Graph g;
  for (const std::string word : {"x", "level", "noon", "abcba"}) {
    const auto hc = model.encoder().char_encode(g, word, nullptr);
    const int64_t H = cfg.char_hidden;
    for (int64_t k = 0; k < H; ++k)
      CHECK(hc->data[static_cast<size_t>(k)] ==
            doctest::Approx(hc->data[static_cast<size_t>(H + k)]).epsilon(1e-12));
  }
}

TEST_CASE("char encoder distinguishes case") {
  auto cfg = tiny_config(Variant::ConditionalSoftmax);
  Vocab vocab = Vocab::build(tiny_corpus());  // corpus mixes cases
  JointModel model(cfg, vocab, 5);
  Graph g;
  const auto a = model.encoder().char_encode(g, "pain", nullptr);
  const auto b = model.encoder().char_encode(g, "Pain", nullptr);
  bool any_diff = false;
  for (size_t i = 0; i < a->data.size(); ++i)
    if (a->data[i] != b->data[i]) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("encoder inference is deterministic and dropout-free") {
  auto cfg = tiny_config(Variant::SharedDecoder);
  cfg.dropout_rate = 0.5;  // must not fire in infer mode
  Vocab vocab = Vocab::build(tiny_corpus());
  JointModel model(cfg, vocab, 9);
  Graph g1, g2;
  const auto e1 = model.encode(g1, sample_sentence(), nullptr);
  const auto e2 = model.encode(g2, sample_sentence(), nullptr);
  for (size_t t = 0; t < e1.size(); ++t) CHECK(e1.states[t]->data == e2.states[t]->data);
}

TEST_CASE("directional symmetry: reversed sentence with swapped directions") {
  auto cfg = tiny_config(Variant::SharedDecoder);
  Vocab vocab = Vocab::build(tiny_corpus());
  JointModel model(cfg, vocab, 11);

  const Sentence s = sample_sentence();
  Graph g;
  const auto enc = model.encode(g, s, nullptr);

  // Swap forward/backward word-LSTM parameters.
  for (const char* leaf : {"input_weights", "recurrent_weights", "bias"}) {
    auto fwd = model.params().find(std::string("encoder.word_fwd.") + leaf);
    auto bwd = model.params().find(std::string("encoder.word_bwd.") + leaf);
    std::swap(fwd->data, bwd->data);
  }
  Sentence rev = s;
  std::reverse(rev.tokens.begin(), rev.tokens.end());
  std::reverse(rev.entity_tags.begin(), rev.entity_tags.end());
  std::reverse(rev.negation_tags.begin(), rev.negation_tags.end());
  Graph g2;
  const auto enc_rev = model.encode(g2, rev, nullptr);

  const int64_t H = cfg.word_hidden;
  const size_t T = s.size();
  for (size_t t = 0; t < T; ++t) {
    const auto& orig = enc.states[T - 1 - t];
    const auto& swapped = enc_rev.states[t];
    for (int64_t k = 0; k < H; ++k) {
      CHECK(swapped->data[static_cast<size_t>(k)] ==
            doctest::Approx(orig->data[static_cast<size_t>(H + k)]).epsilon(1e-9));
      CHECK(swapped->data[static_cast<size_t>(H + k)] ==
            doctest::Approx(orig->data[static_cast<size_t>(k)]).epsilon(1e-9));
    }
  }
}

TEST_CASE("encoder output is independent of the decoder variant") {
  Vocab vocab = Vocab::build(tiny_corpus());
  std::vector<std::vector<double>> states;
  for (Variant v : {Variant::IndependentNer, Variant::TwoDecoder, Variant::SharedDecoder,
                    Variant::ConditionalSoftmax}) {
    JointModel model(tiny_config(v), vocab, 77);
    Graph g;
    const auto enc = model.encode(g, sample_sentence(), nullptr);
    states.push_back(enc.states[2]->data);
  }
  for (size_t i = 1; i < states.size(); ++i) CHECK(states[i] == states[0]);
}

TEST_CASE("all variants emit valid distributions for their tasks") {
  Vocab vocab = Vocab::build(tiny_corpus());
  const Sentence s = sample_sentence();
  for (Variant v : {Variant::IndependentNer, Variant::IndependentNegation, Variant::TwoDecoder,
                    Variant::SharedDecoder, Variant::ConditionalSoftmax}) {
    JointModel model(tiny_config(v), vocab, 13);
    Graph g;
    const auto fwd = model.forward_teacher_forced(g, s, nullptr);
    CHECK(fwd.entity_probs.empty() == !has_entity_task(v));
    CHECK(fwd.negation_probs.empty() == !has_negation_task(v));
    for (const auto& list : {fwd.entity_probs, fwd.negation_probs}) {
      for (const auto& p : list) {
        double total = 0.0;
        for (double x : p->data) {
          CHECK(x > 0.0);
          total += x;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
      }
    }
    if (has_entity_task(v)) CHECK(fwd.entity_probs.size() == s.size());
    if (has_negation_task(v)) CHECK(fwd.negation_probs.size() == s.size());
  }
}

TEST_CASE("two-decoder: zeroing the negation path leaves entity probs unchanged") {
  Vocab vocab = Vocab::build(tiny_corpus());
  JointModel model(tiny_config(Variant::TwoDecoder), vocab, 21);
  const Sentence s = sample_sentence();
  Graph g1;
  const auto before = model.forward_teacher_forced(g1, s, nullptr);
  zero_params_with_prefix(model, "decoder.tagger_neg");
  zero_params_with_prefix(model, "decoder.head_neg");
  zero_params_with_prefix(model, "decoder.tag_emb_neg");
  Graph g2;
  const auto after = model.forward_teacher_forced(g2, s, nullptr);
  for (size_t t = 0; t < s.size(); ++t)
    CHECK(before.entity_probs[t]->data == after.entity_probs[t]->data);
}

TEST_CASE("shared decoder with zero entity head gives uniform entity probs") {
  Vocab vocab = Vocab::build(tiny_corpus());
  JointModel model(tiny_config(Variant::SharedDecoder), vocab, 23);
  zero_params_with_prefix(model, "decoder.head_ent");
  Graph g;
  const auto fwd = model.forward_teacher_forced(g, sample_sentence(), nullptr);
  for (const auto& p : fwd.entity_probs)
    for (double x : p->data) CHECK(x == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("shared decoder: perturbing the tagger moves both heads") {
  Vocab vocab = Vocab::build(tiny_corpus());
  JointModel model(tiny_config(Variant::SharedDecoder), vocab, 25);
  const Sentence s = sample_sentence();
  Graph g1;
  const auto before = model.forward_teacher_forced(g1, s, nullptr);
  auto w = model.params().find("decoder.tagger.input_weights");
  for (double& v : w->data) v += 0.25;
  Graph g2;
  const auto after = model.forward_teacher_forced(g2, s, nullptr);
  bool ent_moved = false, neg_moved = false;
  for (size_t t = 0; t < s.size(); ++t) {
    if (before.entity_probs[t]->data != after.entity_probs[t]->data) ent_moved = true;
    if (before.negation_probs[t]->data != after.negation_probs[t]->data) neg_moved = true;
  }
  CHECK(ent_moved);
  CHECK(neg_moved);
}

TEST_CASE("parameter counts: orderings and exact differences") {
  Vocab vocab = Vocab::build(tiny_corpus());

  // Closed-form count derived from the config, written out independently of
  // ParameterSet bookkeeping.
  auto expected_decoder_count = [&](const ModelConfig& cfg) -> int64_t {
    const int64_t enc = 2 * cfg.word_hidden, e = cfg.tag_emb_dim, h = cfg.tagger_hidden;
    const int64_t k_ent = 7, k_neg = 3;
    auto lstm = [&](int64_t in) { return 4 * h * in + 4 * h * h + 4 * h; };
    int64_t n = 0;
    const Variant v = cfg.variant;
    if (has_entity_task(v)) n += (k_ent + 1) * e;            // entity tag embeddings
    if (has_negation_task(v)) n += (k_neg + 1) * e;          // negation tag embeddings
    if (single_tagger(v)) n += lstm(enc + 2 * e);
    else {
      if (has_entity_task(v)) n += lstm(enc + e);
      if (has_negation_task(v)) n += lstm(enc + e);
    }
    if (has_entity_task(v)) n += k_ent * h + k_ent;
    if (has_negation_task(v))
      n += k_neg * (h + (v == Variant::ConditionalSoftmax ? k_ent : 0)) + k_neg;
    return n;
  };

  std::map<Variant, int64_t> total, dec;
  for (Variant v : {Variant::IndependentNer, Variant::IndependentNegation, Variant::TwoDecoder,
                    Variant::SharedDecoder, Variant::ConditionalSoftmax}) {
    ModelConfig cfg;  // default dims
    cfg.variant = v;
    JointModel model(cfg, vocab, 1);
    total[v] = model.param_count();
    dec[v] = model.decoder_param_count();
    CHECK(dec[v] == expected_decoder_count(cfg));
  }

  CHECK(total[Variant::SharedDecoder] < total[Variant::ConditionalSoftmax]);
  CHECK(total[Variant::ConditionalSoftmax] < total[Variant::TwoDecoder]);
  // Conditional adds exactly K_ent * K_neg weights over shared.
  CHECK(total[Variant::ConditionalSoftmax] - total[Variant::SharedDecoder] == 7 * 3);
  // Two-decoder decoder params equal the sum of the independent decoders.
  CHECK(dec[Variant::TwoDecoder] ==
        dec[Variant::IndependentNer] + dec[Variant::IndependentNegation]);
}

TEST_CASE("conditional negation head reads tagger_hidden + K_ent inputs") {
  Vocab vocab = Vocab::build(tiny_corpus());
  ModelConfig cfg;  // defaults: tagger_hidden 50
  cfg.variant = Variant::ConditionalSoftmax;
  JointModel model(cfg, vocab, 2);
  CHECK(model.params().find("decoder.head_neg.W")->shape == std::vector<int64_t>{3, 57});

  JointModel shared(ModelConfig{}, vocab, 2);
  // (default variant is conditional; build an explicit shared one)
  ModelConfig scfg;
  scfg.variant = Variant::SharedDecoder;
  JointModel shared2(scfg, vocab, 2);
  CHECK(shared2.params().find("decoder.head_neg.W")->shape == std::vector<int64_t>{3, 50});
}

TEST_CASE("shared and conditional share the entity path for a fixed seed") {
  Vocab vocab = Vocab::build(tiny_corpus());
  ModelConfig shared_cfg = tiny_config(Variant::SharedDecoder);
  ModelConfig cond_cfg = tiny_config(Variant::ConditionalSoftmax);
  JointModel a(shared_cfg, vocab, 31);
  JointModel b(cond_cfg, vocab, 31);
  const Sentence s = sample_sentence();
  Graph g1, g2;
  const auto fa = a.forward_teacher_forced(g1, s, nullptr);
  const auto fb = b.forward_teacher_forced(g2, s, nullptr);
  CHECK(fa.entity_probs[0]->data == fb.entity_probs[0]->data);  // identical at t=0
}

TEST_CASE("teacher forcing consumes GO at t=0 and gold tags afterwards") {
  Vocab vocab = Vocab::build(tiny_corpus());
  JointModel model(tiny_config(Variant::ConditionalSoftmax), vocab, 41);
  Sentence a = sample_sentence();
  Sentence b = a;
  b.entity_tags[0] = "B-TEST";  // differs from a only in the first gold tag
  Graph g1, g2;
  const auto fa = model.forward_teacher_forced(g1, a, nullptr);
  const auto fb = model.forward_teacher_forced(g2, b, nullptr);
  CHECK(fa.entity_probs[0]->data == fb.entity_probs[0]->data);  // t=0 sees GO either way
  CHECK(fa.entity_probs[1]->data != fb.entity_probs[1]->data);  // t=1 sees the gold tag
}

TEST_CASE("greedy decode with zeroed heads emits tag id 0 everywhere") {
  Vocab vocab = Vocab::build(tiny_corpus());
  JointModel model(tiny_config(Variant::TwoDecoder), vocab, 51);
  zero_params_with_prefix(model, "decoder.head_ent");
  zero_params_with_prefix(model, "decoder.head_neg");
  const Sentence s = sample_sentence();
  const auto [ent, neg] = model.greedy_decode(s);
  REQUIRE(ent.size() == s.size());
  REQUIRE(neg.size() == s.size());
  for (const auto& t : ent) CHECK(t == "O");  // uniform probs, lowest id wins
  for (const auto& t : neg) CHECK(t == "O");
}

TEST_CASE("greedy decode is deterministic and respects task sets") {
  Vocab vocab = Vocab::build(tiny_corpus());
  const Sentence s = sample_sentence();
  JointModel ner_only(tiny_config(Variant::IndependentNer), vocab, 61);
  const auto [e1, n1] = ner_only.greedy_decode(s);
  CHECK(e1.size() == s.size());
  CHECK(n1.empty());  // no negation output for Independent-NER

  JointModel cond(tiny_config(Variant::ConditionalSoftmax), vocab, 61);
  const auto r1 = cond.greedy_decode(s);
  const auto r2 = cond.greedy_decode(s);
  CHECK(r1 == r2);
}

TEST_CASE("argmax breaks ties toward the lowest id") {
  auto p = tensor_from({4}, {0.25, 0.25, 0.25, 0.25});
  CHECK(argmax_lowest(p) == 0);
  auto q = tensor_from({4}, {0.1, 0.4, 0.4, 0.1});
  CHECK(argmax_lowest(q) == 1);
}

TEST_CASE("full-model gradients match finite differences (tiny config)") {
  Dataset corpus = tiny_corpus();
  Vocab vocab = Vocab::build(corpus);
  for (Variant v : {Variant::ConditionalSoftmax, Variant::TwoDecoder}) {
    JointModel model(tiny_config(v), vocab, 71);
    Sentence s = corpus.sentences[0];
    if (s.size() > 3) {
      s.tokens.resize(3);
      s.entity_tags.resize(3);
      s.negation_tags.resize(3);
    }
    auto fn = [&](Graph& g) { return joint_loss(g, model, s, 1.0, nullptr); };
    std::vector<std::pair<std::string, TensorPtr>> leaves;
    for (const auto& [name, t] : model.params().items()) leaves.emplace_back(name, t);
    const auto res = jtest::check_gradients(fn, leaves);
    CHECK_MESSAGE(res.max_rel_err < 1e-4, variant_name(v), " worst: ", res.worst);
  }
}

TEST_CASE("checkpoint round trip preserves everything") {
  const auto dir = std::filesystem::temp_directory_path() / "jtag_model_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "model.ckpt").string();

  Vocab vocab = Vocab::build(tiny_corpus());
  JointModel model(tiny_config(Variant::ConditionalSoftmax), vocab, 81);
  save_checkpoint(model, path);
  auto loaded = load_checkpoint(path);

  CHECK(loaded->config().variant == Variant::ConditionalSoftmax);
  CHECK(loaded->config().word_emb_dim == 8);
  CHECK(loaded->params().size() == model.params().size());
  const Sentence s = sample_sentence();
  CHECK(loaded->greedy_decode(s) == model.greedy_decode(s));

  // Save -> load -> save is byte-identical.
  const std::string path2 = (dir / "model2.ckpt").string();
  save_checkpoint(*loaded, path2);
  CHECK(read_file(path) == read_file(path2));
}

TEST_CASE("checkpoint loader rejects bad magic and version") {
  const auto dir = std::filesystem::temp_directory_path() / "jtag_model_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "bad.ckpt").string();

  Vocab vocab = Vocab::build(tiny_corpus());
  JointModel model(tiny_config(Variant::SharedDecoder), vocab, 91);
  save_checkpoint(model, path);
  std::string bytes = read_file(path);

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  atomic_write_file(path, bad_magic);
  CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("magic"), DataError);

  std::string bad_version = bytes;
  bad_version[4] = 9;  // version low byte
  atomic_write_file(path, bad_version);
  CHECK_THROWS_WITH_AS(load_checkpoint(path), doctest::Contains("version"), DataError);

  std::string truncated = bytes.substr(0, bytes.size() - 7);
  atomic_write_file(path, truncated);
  CHECK_THROWS_AS(load_checkpoint(path), DataError);
}

TEST_CASE("model config text round trip") {
  ModelConfig cfg = tiny_config(Variant::TwoDecoder);
  cfg.dropout_rate = 0.37;
  cfg.heads_on_encoder = true;
  const ModelConfig back = parse_model_config(serialize_model_config(cfg));
  CHECK(back.variant == cfg.variant);
  CHECK(back.word_emb_dim == cfg.word_emb_dim);
  CHECK(back.dropout_rate == cfg.dropout_rate);  // exact round trip
  CHECK(back.heads_on_encoder == cfg.heads_on_encoder);
  CHECK_THROWS_AS(parse_model_config("nonsense=1\n"), DataError);
}
