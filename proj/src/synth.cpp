#include "jtag/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "jtag/io.hpp"
#include "jtag/rng.hpp"

namespace jtag {

namespace {

// Entity terms carry type-indicative morphology so the character encoder has
// signal on rare and corrupted tokens.
const std::vector<std::string> kProblems = {
    "pneumonia",      "anemia",        "leukemia",      "hypoglycemia", "ischemia",
    "septicemia",     "gastritis",     "arthritis",     "colitis",      "bronchitis",
    "dermatitis",     "sinusitis",     "hepatitis",     "nephritis",    "myalgia",
    "neuralgia",      "arthralgia",    "chest pain",    "back pain",    "abdominal pain",
    "joint pain",     "headache",      "nausea",        "fever",        "dizziness",
    "fatigue",        "rash",          "cough",         "edema",        "seizure",
    "migraine",       "vomiting",      "diarrhea",      "hypertension", "dyspnea",
    "wheezing",       "palpitations",  "confusion",     "insomnia",     "syncope"};

const std::vector<std::string> kTests = {
    "chest x-ray",    "ct scan",       "mri",           "ekg",          "echocardiogram",
    "urinalysis",     "cbc",           "blood culture", "biopsy",       "colonoscopy",
    "endoscopy",      "ultrasound",    "metabolic panel", "lipid panel", "troponin level",
    "blood glucose",  "stress test",   "angiogram",     "mammogram",    "spirometry",
    "doppler",        "bronchoscopy",  "electromyogram", "lumbar puncture"};

const std::vector<std::string> kTreatments = {
    "aspirin",        "tylenol",       "ibuprofen",     "metformin",    "insulin",
    "lisinopril",     "atenolol",      "warfarin",      "furosemide",   "prednisone",
    "amoxicillin",    "azithromycin",  "atorvastatin",  "omeprazole",   "gabapentin",
    "morphine",       "heparin",       "albuterol",     "clopidogrel",  "chemotherapy",
    "dialysis",       "physical therapy", "radiation therapy", "oxygen therapy",
    "antibiotics",    "anticoagulation", "immunotherapy", "statins"};

// Clause templates. Slots: {P} affirmed problem, {NP} negated problem,
// {T} test, {R} treatment. Literal tokens are space separated.
const std::vector<std::string> kNegatedTemplates = {
    "patient denies {NP}",
    "denies any {NP}",
    "no {NP}",
    "no {NP} noted",
    "no evidence of {NP}",
    "no signs of {NP}",
    "without {NP}",
    "negative for {NP}",
    "has not had {NP}",
    "{NP} was ruled out",
    "{NP} is unlikely",
    "workup ruled out {NP}",
    "{T} shows no {NP}",
    "{T} negative for {NP}",
};

const std::vector<std::string> kAffirmedTemplates = {
    "patient reports {P}",
    "complains of {P}",
    "presents with {P}",
    "has {P}",
    "positive for {P}",
    "{P} noted on exam",
    "admitted for {P}",
    "history of {P}",
    "{P} has worsened",
    "reports intermittent {P}",
    "{T} shows {P}",
    "{T} confirms {P}",
    // Pseudo-cue frames: cue-like surface, problem still asserted.
    "no increase in {P}",
    "no change in {P}",
    "{P} cannot be ruled out",
};

// One negated then one affirmed problem with a termination token between.
const std::vector<std::string> kTerminationTemplates = {
    "no {NP} but reports {P}",
    "denies {NP} but has {P}",
    "no {NP} however {P} persists",
    "negative for {NP} but positive for {P}",
};

// Two problems negated by a single cue.
const std::vector<std::string> kCoordinationTemplates = {
    "denies {NP} and {NP}",
    "no {NP} or {NP}",
    "no evidence of {NP} or {NP}",
};

// TEST/TREATMENT clauses; several reuse the negation frames so cue presence
// alone never implies a negation tag.
const std::vector<std::string> kNonProblemTemplates = {
    "no {T} performed",
    "no {T} available",
    "no {T}",
    "denies taking {R}",
    "denies use of {R}",
    "no {R} given",
    "no {R}",
    "not on {R}",
    "without {R}",
    "patient stopped {R}",
    "discontinue {R}",
    "hold {R}",
    "{T} was performed",
    "{T} pending",
    "will order {T}",
    "{T} within normal limits",
    "started on {R}",
    "continues {R}",
    "taking {R} daily",
    "{R} dose increased",
};

const std::vector<std::string> kNeutralTemplates = {
    "vitals stable",
    "seen in clinic today",
    "follow up in two weeks",
    "patient resting comfortably",
    "labs reviewed",
    "plan discussed with family",
    "no acute distress",
    "family history reviewed",
    "medications reconciled",
    "tolerating diet well",
};

const std::vector<std::pair<std::string, std::string>> kAbbreviations = {
    {"patient", "pt"},   {"history", "hx"},   {"without", "w/o"},
    {"follow", "f/u"},   {"treatment", "tx"}, {"chest", "cxr"},
};

const std::vector<std::vector<std::string>> kDosages = {
    {"325", "mg"}, {"81", "mg"}, {"500", "mg"}, {"1,000", "units"}, {"10", "mg"},
};

// Harmonic-weight pick: low ranks dominate, tail stays populated.
const std::string& zipf_pick(const std::vector<std::string>& items, Rng& rng) {
  static thread_local std::vector<double> cum;
  cum.clear();
  double total = 0.0;
  for (size_t i = 0; i < items.size(); ++i) {
    total += 1.0 / static_cast<double>(i + 2);
    cum.push_back(total);
  }
  const double u = rng.uniform() * total;
  const size_t idx = static_cast<size_t>(
      std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
  return items[std::min(idx, items.size() - 1)];
}

struct ClauseBuilder {
  std::vector<std::string> tokens, entity, negation;

  void add_literal(const std::string& word) {
    tokens.push_back(word);
    entity.push_back("O");
    negation.push_back("O");
  }

  void add_entity(const std::string& term, const std::string& type, bool negated,
                  Rng& rng, bool allow_dosage) {
    const auto words = split(term, ' ');
    for (size_t i = 0; i < words.size(); ++i) {
      tokens.push_back(words[i]);
      entity.push_back((i == 0 ? "B-" : "I-") + type);
      negation.push_back(negated ? (i == 0 ? "B-NEG" : "I-NEG") : "O");
    }
    if (allow_dosage && type == "TREATMENT" && rng.bernoulli(0.15)) {
      for (const auto& word : rng.pick(kDosages)) {
        tokens.push_back(word);
        entity.push_back("I-TREATMENT");
        negation.push_back("O");
      }
    }
  }
};

void expand_template(const std::string& tmpl, ClauseBuilder& out, Rng& rng) {
  for (const auto& piece : split(tmpl, ' ')) {
    if (piece == "{P}")
      out.add_entity(zipf_pick(kProblems, rng), "PROBLEM", false, rng, false);
    else if (piece == "{NP}")
      out.add_entity(zipf_pick(kProblems, rng), "PROBLEM", true, rng, false);
    else if (piece == "{T}")
      out.add_entity(zipf_pick(kTests, rng), "TEST", false, rng, false);
    else if (piece == "{R}")
      out.add_entity(zipf_pick(kTreatments, rng), "TREATMENT", false, rng, true);
    else
      out.add_literal(piece);
  }
}

std::string corrupt_token(const std::string& token, Rng& rng) {
  if (token.size() < 4) return token;
  std::string out = token;
  const size_t pos = 1 + static_cast<size_t>(rng.uniform_int(out.size() - 2));
  switch (rng.uniform_int(3)) {
    case 0:
      std::swap(out[pos], out[pos - 1]);
      break;
    case 1:
      out.erase(pos, 1);
      break;
    default:
      out.insert(pos, 1, out[pos]);
      break;
  }
  return out;
}

}  // namespace

Dataset synth_generate(uint64_t seed, int n_sentences, const SynthConfig& config) {
  if (n_sentences < 1) throw UsageError("synth_generate: n_sentences must be >= 1");
  Rng rng(seed);
  Dataset ds;
  ds.split = "synthetic";
  ds.sentences.reserve(static_cast<size_t>(n_sentences));

  // Mixture weights chosen so the expected fraction of negated PROBLEM spans
  // equals config.negation_rate. Termination templates contribute one
  // negated + one affirmed span, coordination templates two negated spans.
  const double rate = config.negation_rate;
  double p_term = 0.08, p_coord = 0.05;
  const double e_tot = (1.0 - p_term - p_coord) + 2.0 * p_term + 2.0 * p_coord;
  double q_negated = (rate * e_tot - p_term - 2.0 * p_coord) / (1.0 - p_term - p_coord);
  if (q_negated < 0.0 || q_negated > 1.0) {
    p_term = p_coord = 0.0;
    q_negated = rate;
  }

  for (int s = 0; s < n_sentences; ++s) {
    ClauseBuilder sentence;
    const int n_clauses = 1 + (rng.bernoulli(config.two_clause_rate) ? 1 : 0);
    for (int c = 0; c < n_clauses; ++c) {
      if (c > 0) sentence.add_literal(rng.bernoulli(0.5) ? "and" : ";");
      const double kind = rng.uniform();
      if (kind < 0.55) {
        const double shape = rng.uniform();
        if (shape < p_term)
          expand_template(rng.pick(kTerminationTemplates), sentence, rng);
        else if (shape < p_term + p_coord)
          expand_template(rng.pick(kCoordinationTemplates), sentence, rng);
        else if (rng.bernoulli(q_negated))
          expand_template(rng.pick(kNegatedTemplates), sentence, rng);
        else
          expand_template(rng.pick(kAffirmedTemplates), sentence, rng);
      } else if (kind < 0.85) {
        expand_template(rng.pick(kNonProblemTemplates), sentence, rng);
      } else {
        expand_template(rng.pick(kNeutralTemplates), sentence, rng);
      }
    }
    if (rng.bernoulli(0.8)) sentence.add_literal(".");

    for (auto& token : sentence.tokens) {
      for (const auto& [full, abbrev] : kAbbreviations) {
        if (token == full && rng.bernoulli(config.abbrev_rate)) {
          token = abbrev;
          break;
        }
      }
      if (rng.bernoulli(config.misspell_rate)) token = corrupt_token(token, rng);
    }
    if (rng.bernoulli(0.6) && !sentence.tokens.empty() && std::isalpha(static_cast<unsigned char>(sentence.tokens[0][0])))
      sentence.tokens[0][0] = static_cast<char>(std::toupper(static_cast<unsigned char>(sentence.tokens[0][0])));

    ds.sentences.push_back(
        Sentence{std::move(sentence.tokens), std::move(sentence.entity), std::move(sentence.negation)});
  }
  return ds;
}

Dataset subsample(const Dataset& train, double fraction, uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw UsageError("subsample: fraction must be in (0, 1]");
  if (fraction == 1.0) return train;
  const size_t n = train.sentences.size();
  const size_t k = std::max<size_t>(1, static_cast<size_t>(std::llround(fraction * static_cast<double>(n))));
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(seed);
  for (size_t i = 0; i < k; ++i) {
    const size_t j = i + static_cast<size_t>(rng.uniform_int(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  Dataset out;
  out.split = train.split;
  out.sentences.reserve(k);
  for (size_t i : idx) out.sentences.push_back(train.sentences[i]);
  return out;
}

CorpusStats corpus_stats(const Dataset& dataset) {
  CorpusStats st;
  st.sentences = static_cast<int64_t>(dataset.sentences.size());
  for (const Sentence& s : dataset.sentences) {
    st.tokens += static_cast<int64_t>(s.size());
    for (size_t t = 0; t < s.size(); ++t) {
      const std::string& e = s.entity_tags[t];
      if (e == "B-PROBLEM") {
        ++st.problem_spans;
        if (s.negation_tags[t] == "B-NEG") ++st.negated_problem_spans;
      } else if (e == "B-TEST") {
        ++st.test_spans;
      } else if (e == "B-TREATMENT") {
        ++st.treatment_spans;
      }
      if (s.negation_tags[t] == "B-NEG") ++st.negation_spans;
    }
  }
  return st;
}

std::string format_stats(const CorpusStats& st) {
  std::ostringstream out;
  out << "sentences:              " << st.sentences << "\n"
      << "tokens:                 " << st.tokens << "\n"
      << "problem spans:          " << st.problem_spans << "\n"
      << "test spans:             " << st.test_spans << "\n"
      << "treatment spans:        " << st.treatment_spans << "\n"
      << "negation spans:         " << st.negation_spans << "\n"
      << "negated problem spans:  " << st.negated_problem_spans << "\n"
      << "negated problem frac:   " << fmt_fixed(st.negated_problem_fraction()) << "\n";
  return out.str();
}

}  // namespace jtag
