#include "doctest.h"

#include "sessionscreen/error.hpp"
#include "sessionscreen/eval.hpp"
#include "sessionscreen/features.hpp"
#include "sessionscreen/labels.hpp"
#include "sessionscreen/synth.hpp"
#include "sessionscreen/textproc.hpp"

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

using namespace sessionscreen;

namespace {

std::string corpus_bytes(const SynthCorpus& c) {
  std::string out;
  for (const auto& s : c.sessions) out += session_to_json_line(s) + "\n";
  return out;
}

}  // namespace

TEST_CASE("generation is deterministic for a fixed seed") {
  SynthConfig cfg;
  cfg.n_sessions = 50;
  const auto a = generate_corpus(cfg);
  const auto b = generate_corpus(cfg);
  CHECK(corpus_bytes(a) == corpus_bytes(b));
  CHECK(a.true_classes == b.true_classes);
  CHECK(labels_to_csv(generate_labels(a.sessions, a.true_classes, cfg)) ==
        labels_to_csv(generate_labels(b.sessions, b.true_classes, cfg)));

  cfg.seed = 2;
  CHECK(corpus_bytes(generate_corpus(cfg)) != corpus_bytes(a));
}

TEST_CASE("generated corpora respect the configured shape") {
  SynthConfig cfg;
  const auto c = generate_corpus(cfg);
  REQUIRE(c.sessions.size() == 400);
  int bullying = 0;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < c.sessions.size(); ++i) {
    const auto& s = c.sessions[i];
    ids.insert(s.session_id);
    bullying += c.true_classes[i] == 1;
    CHECK(s.comments.size() >= 15);
    CHECK(s.comments.size() <= 60);
    for (std::size_t k = 1; k < s.comments.size(); ++k) CHECK(s.comments[k - 1].timestamp <= s.comments[k].timestamp);
    for (const auto& name : s.image_categories) CHECK(category_index(name).has_value());
  }
  CHECK(ids.size() == 400);
  CHECK(bullying == 208);
  const auto reparsed = parse_corpus(corpus_bytes(c));
  CHECK(corpus_bytes({reparsed, c.true_classes}) == corpus_bytes(c));
}

TEST_CASE("bullying sessions pass the selection gate") {
  SynthConfig cfg;
  const auto c = generate_corpus(cfg);
  int bullying = 0, passed = 0;
  const SelectionCriteria gate;
  for (std::size_t i = 0; i < c.sessions.size(); ++i) {
    if (c.true_classes[i] != 1) continue;
    ++bullying;
    const std::vector<MediaSession> one = {c.sessions[i]};
    passed += !select_sessions(one, default_lexicon(), gate).empty();
  }
  CHECK(static_cast<double>(passed) / bullying >= 0.95);
}

TEST_CASE("burst signal makes bullying sessions denser") {
  SynthConfig cfg;
  const auto c = generate_corpus(cfg);
  double sum[2] = {0, 0};
  int n[2] = {0, 0};
  for (std::size_t i = 0; i < c.sessions.size(); ++i) {
    const int k = c.true_classes[i] == 1 ? 0 : 1;
    sum[k] += temporal_burst_count(c.sessions[i]) / static_cast<double>(c.sessions[i].comments.size());
    ++n[k];
  }
  CHECK(sum[0] / n[0] > sum[1] / n[1]);
}

TEST_CASE("without lexical signal the token distributions match across classes") {
  SynthConfig cfg;
  cfg.n_sessions = 600;
  cfg.lexical_signal_strength = 0.0;
  const auto c = generate_corpus(cfg);
  const StopList none;
  std::map<std::string, double> counts[2];
  double totals[2] = {0, 0};
  const auto& hostile = hostile_tokens();
  const std::set<std::string> hostile_set(hostile.begin(), hostile.end());
  int hostile_seen = 0;
  for (std::size_t i = 0; i < c.sessions.size(); ++i) {
    const int k = c.true_classes[i] == 1 ? 0 : 1;
    for (const auto& comment : c.sessions[i].comments) {
      for (const auto& t : preprocess_tokenize(comment.text, none)) {
        counts[k][t] += 1;
        totals[k] += 1;
        hostile_seen += hostile_set.contains(t);
      }
    }
  }
  CHECK(hostile_seen == 0);
  std::set<std::string> vocab;
  for (const auto& m : counts) {
    for (const auto& [t, _] : m) vocab.insert(t);
  }
  double chi2 = 0.0;
  int df = -1;
  for (const auto& t : vocab) {
    const double a = counts[0][t], b = counts[1][t];
    const double row = a + b;
    if (row < 20) continue;
    const double ea = row * totals[0] / (totals[0] + totals[1]);
    const double eb = row * totals[1] / (totals[0] + totals[1]);
    chi2 += (a - ea) * (a - ea) / ea + (b - eb) * (b - eb) / eb;
    ++df;
  }
  REQUIRE(df > 50);
  CHECK(chi2 < df + 5.0 * std::sqrt(2.0 * df));
}

TEST_CASE("with lexical signal hostile tokens appear only in bullying sessions") {
  SynthConfig cfg;
  cfg.n_sessions = 100;
  const auto c = generate_corpus(cfg);
  const auto& hostile = hostile_tokens();
  const std::set<std::string> hostile_set(hostile.begin(), hostile.end());
  int seen[2] = {0, 0};
  for (std::size_t i = 0; i < c.sessions.size(); ++i) {
    for (const auto& comment : c.sessions[i].comments) {
      for (const auto& t : preprocess_tokenize(comment.text, StopList())) {
        if (hostile_set.contains(t)) ++seen[c.true_classes[i] == 1 ? 0 : 1];
      }
    }
  }
  CHECK(seen[0] > 0);
  CHECK(seen[1] == 0);
}

TEST_CASE("token pools are disjoint from the lexicon and stop list") {
  const auto& neutral = neutral_tokens();
  const auto& hostile = hostile_tokens();
  CHECK(neutral.size() >= 200);
  CHECK(hostile.size() >= 40);
  const std::set<std::string> n(neutral.begin(), neutral.end());
  const std::set<std::string> h(hostile.begin(), hostile.end());
  CHECK(n.size() == neutral.size());
  CHECK(h.size() == hostile.size());
  for (const auto& w : n) {
    CHECK_FALSE(default_lexicon().contains(w));
    CHECK_FALSE(default_stoplist().contains(w));
    CHECK_FALSE(h.contains(w));
  }
  for (const auto& w : h) {
    CHECK_FALSE(default_lexicon().contains(w));
    CHECK_FALSE(default_stoplist().contains(w));
  }
}

TEST_CASE("labels: five distinct workers per session with implication votes") {
  SynthConfig cfg;
  cfg.n_sessions = 60;
  const auto c = generate_corpus(cfg);
  const auto labels = generate_labels(c.sessions, c.true_classes, cfg);
  CHECK(labels.size() == 300);
  std::map<std::string, std::set<std::string>> workers;
  for (const auto& r : labels) {
    workers[r.session_id].insert(r.labeler_id);
    CHECK(r.trust >= cfg.trust_min);
    CHECK(r.trust <= cfg.trust_max);
    if (r.bullying_vote) CHECK(r.aggression_vote);
  }
  for (const auto& [id, w] : workers) CHECK(w.size() == 5);
  CHECK(vote_heatmap(labels).below_diagonal_mass == 0.0);
  CHECK(parse_labels(labels_to_csv(labels)).warnings.empty());
}

TEST_CASE("noiseless labels recover the true classes") {
  SynthConfig cfg;
  cfg.n_sessions = 100;
  cfg.label_noise = 0.0;
  cfg.trust_min = cfg.trust_max = 1.0;
  const auto c = generate_corpus(cfg);
  const auto agg = aggregate_all(generate_labels(c.sessions, c.true_classes, cfg));
  std::map<std::string, FinalClass> by_id;
  for (const auto& a : agg) by_id[a.session_id] = a.final_class;
  for (std::size_t i = 0; i < c.sessions.size(); ++i) {
    CHECK(by_id.at(c.sessions[i].session_id) == (c.true_classes[i] == 1 ? FinalClass::bullying : FinalClass::not_bullying));
  }
}

TEST_CASE("coin-flip labels are close to chance agreement") {
  SynthConfig cfg;
  cfg.n_sessions = 600;
  cfg.label_noise = 0.5;
  const auto c = generate_corpus(cfg);
  const auto agg = aggregate_all(generate_labels(c.sessions, c.true_classes, cfg));
  std::map<std::string, FinalClass> by_id;
  for (const auto& a : agg) by_id[a.session_id] = a.final_class;
  int agree = 0, confident = 0;
  for (std::size_t i = 0; i < c.sessions.size(); ++i) {
    const auto f = by_id.at(c.sessions[i].session_id);
    if (f == FinalClass::low_confidence) continue;
    ++confident;
    agree += (f == FinalClass::bullying) == (c.true_classes[i] == 1);
  }
  const double rate = static_cast<double>(agree) / confident;
  CHECK(rate > 0.4);
  CHECK(rate < 0.6);
}

TEST_CASE("noiseless planted corpus is learnable end to end") {
  SynthConfig cfg;
  cfg.n_sessions = 200;
  cfg.label_noise = 0.0;
  const auto c = generate_corpus(cfg);
  const auto labels = generate_labels(c.sessions, c.true_classes, cfg);
  ExperimentConfig ec;
  ec.k_folds = 5;
  const auto r = run_experiment(ec, c.sessions, labels, default_lexicon(), default_stoplist());
  CHECK(r.mean_accuracy >= 0.9);
}

TEST_CASE("config validation and JSON round-trip") {
  SynthConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  auto bad = cfg;
  bad.profanity_rate = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.min_comments = 70;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.labelers_per_session = 30;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.trust_min = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(generate_corpus(bad), ConfigError);

  cfg.seed = 99;
  cfg.meta_signal = 0.25;
  const auto back = parse_synth_config(synth_config_to_json(cfg));
  CHECK(synth_config_to_json(back) == synth_config_to_json(cfg));
  CHECK(parse_synth_config(R"({"n_sessions": 12})").n_sessions == 12);
  CHECK_THROWS_AS(parse_synth_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_synth_config(R"({"label_noise": 2})"), ConfigError);
}
