#include "sessionscreen/cli.hpp"

#include "sessionscreen/analysis.hpp"
#include "sessionscreen/corpus.hpp"
#include "sessionscreen/error.hpp"
#include "sessionscreen/eval.hpp"
#include "sessionscreen/features.hpp"
#include "sessionscreen/labels.hpp"
#include "sessionscreen/serialize.hpp"
#include "sessionscreen/synth.hpp"
#include "sessionscreen/textproc.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace sessionscreen {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

// Records what a stage read and wrote; written last, atomically, into the
// output directory.
class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)) {}

  void input(const std::string& role, const fs::path& path) {
    inputs_[role] = {{"path", path.string()}, {"sha256", file_sha256(path)}};
  }
  void output(const std::string& role, const fs::path& file) { outputs_[role] = file.filename().string(); }
  void config(ordered_json c) { config_ = std::move(c); }
  void seed(std::uint64_t s) { seed_ = s; }

  void write(const fs::path& dir) const {
    ordered_json j;
    j["tool"] = "sessionscreen";
    j["version"] = kToolVersion;
    j["command"] = command_;
    j["seed"] = seed_ ? ordered_json(*seed_) : ordered_json(nullptr);
    j["config"] = config_;
    j["inputs"] = inputs_;
    j["outputs"] = outputs_;
    j["created_at"] = utc_now();
    write_file_atomic(dir / "manifest.json", j.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::optional<std::uint64_t> seed_;
  ordered_json config_ = ordered_json::object();
  ordered_json inputs_ = ordered_json::object();
  ordered_json outputs_ = ordered_json::object();
};

void emit(Manifest& manifest, const fs::path& dir, const std::string& role, const std::string& name,
          const std::string& contents) {
  write_file_atomic(dir / name, contents);
  manifest.output(role, dir / name);
}

// --seed, then SESSION_SCREEN_SEED, then the fallback.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SESSION_SCREEN_SEED"); env && *env) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ConfigError("SESSION_SCREEN_SEED is not an unsigned integer: '" + std::string(s) + "'");
    }
    return v;
  }
  return fallback;
}

bool json_has_key(const std::string& text, const char* key) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  return j.is_object() && j.contains(key);
}

Lexicon lexicon_from(const std::string& path, Manifest& manifest) {
  if (path.empty()) return default_lexicon();
  manifest.input("lexicon", path);
  return load_lexicon(path);
}

StopList stoplist_from(const std::string& path, Manifest& manifest) {
  if (path.empty()) return default_stoplist();
  manifest.input("stoplist", path);
  return load_stoplist(path);
}

struct CommonPaths {
  std::string corpus, labels, lexicon, stoplist, config, out;
};

// ---- subcommands -----------------------------------------------------------

int run_synth(const std::string& config_path, std::optional<int> sessions, std::optional<std::uint64_t> seed,
              const std::string& out_dir, std::ostream& out) {
  Manifest manifest("synth");
  SynthConfig cfg;
  std::string text;
  if (!config_path.empty()) {
    manifest.input("config", config_path);
    text = read_file(config_path);
    cfg = parse_synth_config(text);
  }
  if (sessions) cfg.n_sessions = *sessions;
  cfg.seed = resolve_seed(seed, !text.empty() && json_has_key(text, "seed") ? cfg.seed : 1);
  cfg.validate();

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const auto corpus = generate_corpus(cfg);
  const auto labels = generate_labels(corpus.sessions, corpus.true_classes, cfg);

  std::string jsonl;
  for (const auto& s : corpus.sessions) jsonl += session_to_json_line(s) + "\n";
  std::string truth = "session_id,true_class\n";
  for (std::size_t i = 0; i < corpus.sessions.size(); ++i) {
    truth += corpus.sessions[i].session_id + "," + (corpus.true_classes[i] == 1 ? "bullying" : "not_bullying") + "\n";
  }
  emit(manifest, dir, "corpus", "corpus.jsonl", jsonl);
  emit(manifest, dir, "labels", "labels.csv", labels_to_csv(labels));
  emit(manifest, dir, "truth", "truth.csv", truth);
  emit(manifest, dir, "synth_config", "synth_config.json", synth_config_to_json(cfg) + "\n");
  manifest.seed(cfg.seed);
  manifest.config(ordered_json::parse(synth_config_to_json(cfg)));
  manifest.write(dir);
  out << "generated " << corpus.sessions.size() << " sessions and " << labels.size() << " label records in "
      << dir.string() << "\n";
  return 0;
}

int run_select(const CommonPaths& p, std::size_t min_comments, double negativity, std::optional<std::size_t> cap,
               std::ostream& out) {
  Manifest manifest("select");
  const Lexicon lexicon = lexicon_from(p.lexicon, manifest);
  manifest.input("corpus", p.corpus);
  LoadOptions load;
  load.max_comments = cap;
  const auto corpus = load_corpus(p.corpus, load);
  SelectionCriteria criteria{min_comments, negativity};
  const auto selected = select_sessions(corpus, lexicon, criteria);

  const fs::path dir(p.out);
  fs::create_directories(dir);
  std::string jsonl, ids, table = "session_id,n_comments,negativity_ratio,selected\n";
  for (const auto& s : selected) {
    jsonl += session_to_json_line(s) + "\n";
    ids += s.session_id + "\n";
  }
  std::size_t next = 0;
  for (const auto& s : corpus) {
    const bool chosen = next < selected.size() && selected[next].session_id == s.session_id;
    if (chosen) ++next;
    std::string ratio;
    try {
      ratio = num(negativity_ratio(s, lexicon));
    } catch (const NumericalError&) {
      ratio = "";
    }
    table += s.session_id + "," + std::to_string(s.comments.size()) + "," + ratio + "," + (chosen ? "1" : "0") + "\n";
  }
  emit(manifest, dir, "selected_corpus", "selected.jsonl", jsonl);
  emit(manifest, dir, "selected_ids", "selected_ids.txt", ids);
  emit(manifest, dir, "selection_table", "selection.csv", table);
  ordered_json cfg;
  cfg["min_comments"] = min_comments;
  cfg["negativity"] = negativity;
  cfg["max_comments"] = cap ? ordered_json(*cap) : ordered_json(nullptr);
  manifest.config(cfg);
  manifest.write(dir);
  out << "selected " << selected.size() << " of " << corpus.size() << " sessions\n";
  return 0;
}

int run_aggregate(const CommonPaths& p, double threshold, std::ostream& out, std::ostream& err) {
  Manifest manifest("aggregate");
  manifest.input("labels", p.labels);
  const auto labels = load_labels(p.labels);
  for (const auto& w : labels.warnings) err << "warning: " << w << "\n";
  const auto aggregated = aggregate_all(labels.records, threshold);
  const fs::path dir(p.out);
  fs::create_directories(dir);
  emit(manifest, dir, "aggregated", "aggregated.csv", aggregated_to_csv(aggregated));
  manifest.config({{"confidence_threshold", threshold}});
  manifest.write(dir);
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& a : aggregated) ++counts[static_cast<int>(a.final_class)];
  out << "aggregated " << aggregated.size() << " sessions: " << counts[0] << " bullying, " << counts[1]
      << " not_bullying, " << counts[2] << " low_confidence\n";
  return 0;
}

ExperimentConfig load_experiment_config(const std::string& path, Manifest& manifest, std::string* text_out = nullptr) {
  if (path.empty()) return ExperimentConfig{};
  manifest.input("config", path);
  const std::string text = read_file(path);
  if (text_out) *text_out = text;
  return parse_experiment_config(text);
}

int run_featurize(const CommonPaths& p, std::ostream& out) {
  Manifest manifest("featurize");
  ExperimentConfig cfg = load_experiment_config(p.config, manifest);
  const StopList stoplist = stoplist_from(p.stoplist, manifest);
  manifest.input("corpus", p.corpus);
  const auto corpus = load_corpus(p.corpus);
  if (corpus.empty()) throw ValidationError("corpus is empty");
  const Vocabulary vocab = build_vocabulary(corpus, stoplist, cfg.ngram_orders, cfg.min_df);

  std::string vocab_txt;
  for (std::size_t j = 0; j < vocab.size(); ++j) vocab_txt += std::to_string(j) + "\t" + vocab.grams()[j] + "\n";
  std::string dense = "session_id";
  for (auto name : kMetaFeatureNames) dense += "," + std::string(name);
  for (auto name : kCategories) dense += ",cat_" + std::string(name);
  dense += "\n";
  std::string coo = "# session_index gram_index count\n";
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto f = assemble_features(corpus[i], &vocab, stoplist, {true, true, true}, cfg.window_seconds);
    dense += corpus[i].session_id;
    for (Eigen::Index j = 0; j < f.dense_block.size(); ++j) dense += "," + num(f.dense_block[j]);
    for (Eigen::Index j = 0; j < f.image_block.size(); ++j) dense += "," + num(f.image_block[j]);
    dense += "\n";
    for (SparseCounts::InnerIterator it(f.text_block); it; ++it) {
      coo += std::to_string(i) + " " + std::to_string(it.index()) + " " + num(it.value()) + "\n";
    }
  }
  const fs::path dir(p.out);
  fs::create_directories(dir);
  emit(manifest, dir, "vocabulary", "vocabulary.tsv", vocab_txt);
  emit(manifest, dir, "dense_features", "features_dense.csv", dense);
  emit(manifest, dir, "text_features", "features_text.coo", coo);
  manifest.config(ordered_json::parse(experiment_config_to_json(cfg)));
  manifest.write(dir);
  out << "featurized " << corpus.size() << " sessions over " << vocab.size() << " n-grams\n";
  return 0;
}

int run_evaluate(const CommonPaths& p, const std::string& experiment, std::optional<std::uint64_t> seed, std::ostream& out,
                 std::ostream& err) {
  Manifest manifest("evaluate");
  std::string text;
  ExperimentConfig cfg = load_experiment_config(p.config, manifest, &text);
  cfg.seed = resolve_seed(seed, !text.empty() && json_has_key(text, "seed") ? cfg.seed : 1);
  std::vector<ExperimentKind> kinds;
  if (experiment == "all") {
    kinds.assign(kAllExperiments.begin(), kAllExperiments.end());
  } else if (!experiment.empty()) {
    kinds.push_back(experiment_from_string(experiment));
  } else {
    kinds.push_back(cfg.experiment);
  }
  const Lexicon lexicon = lexicon_from(p.lexicon, manifest);
  const StopList stoplist = stoplist_from(p.stoplist, manifest);
  manifest.input("corpus", p.corpus);
  manifest.input("labels", p.labels);
  const auto corpus = load_corpus(p.corpus);
  const auto labels = load_labels(p.labels);
  for (const auto& w : labels.warnings) err << "warning: " << w << "\n";

  const fs::path dir(p.out);
  fs::create_directories(dir);
  ordered_json configs = ordered_json::array();
  for (auto kind : kinds) {
    cfg.experiment = kind;
    cfg.validate();
    const ExperimentData data = prepare_data(cfg, corpus, labels.records, lexicon);
    const MetricsReport report = run_experiment(cfg, data, stoplist);
    for (const auto& w : report.warnings) err << "warning: " << w << "\n";
    const std::string name(to_string(kind));
    emit(manifest, dir, "report_" + name, "report_" + name + ".json", report_to_json(report));
    emit(manifest, dir, "folds_" + name, "folds_" + name + ".csv", report_folds_csv(report));
    // Final model on every confidently labeled session.
    const FittedPipeline bundle = fit_pipeline(cfg, data.sessions, data.labels, stoplist);
    emit(manifest, dir, "model_" + name, "model_" + name + ".json", pipeline_to_json(bundle));
    configs.push_back(ordered_json::parse(experiment_config_to_json(cfg)));
    out << name << ": mean accuracy " << std::fixed << std::setprecision(4) << report.mean_accuracy
        << " (baseline " << report.baseline << ", " << report.n_sessions << " sessions)\n";
    out.unsetf(std::ios::floatfield);
  }
  manifest.seed(cfg.seed);
  manifest.config(configs.size() == 1 ? configs[0] : configs);
  manifest.write(dir);
  return 0;
}

std::string ccdf_csv(const std::vector<double>& values) {
  std::string s = "value,fraction\n";
  for (const auto& pt : ccdf(values)) s += num(pt.value) + "," + num(pt.fraction) + "\n";
  return s;
}

ordered_json maybe_pearson(std::span<const double> x, std::span<const double> y) {
  try {
    return pearson(x, y);
  } catch (const NumericalError&) {
    return nullptr;
  }
}

int run_analyze(const CommonPaths& p, double threshold, const std::vector<std::int64_t>& windows, bool binary_label,
                std::ostream& out) {
  Manifest manifest("analyze");
  manifest.input("corpus", p.corpus);
  manifest.input("labels", p.labels);
  const auto sessions = load_corpus(p.corpus);
  if (sessions.empty()) throw ValidationError("corpus is empty");
  const auto label_set = load_labels(p.labels);
  std::set<std::string> ids;
  for (const auto& s : sessions) ids.insert(s.session_id);
  std::vector<LabelRecord> records;
  for (const auto& r : label_set.records) {
    if (ids.contains(r.session_id)) records.push_back(r);
  }
  const auto aggregated = aggregate_all(records, threshold);

  const fs::path dir(p.out);
  fs::create_directories(dir);
  ordered_json summary;
  summary["n_sessions"] = sessions.size();

  const auto corr = correlation_table(sessions, aggregated);
  std::string corr_csv = "feature,question,r,n\n";
  ordered_json corr_json = ordered_json::array();
  for (const auto& c : corr.pairs) {
    const char* q = c.question == Question::bullying ? "bullying" : "aggression";
    corr_csv += c.feature + "," + q + "," + num(c.r) + "," + std::to_string(c.n) + "\n";
    corr_json.push_back({{"feature", c.feature}, {"question", q}, {"r", c.r}, {"n", c.n}});
  }
  emit(manifest, dir, "correlations", "correlations.csv", corr_csv);
  summary["correlations"] = corr_json;

  TemporalSweepOptions sweep_opts;
  sweep_opts.binary_label = binary_label;
  const auto sweep = temporal_correlation_sweep(sessions, aggregated, windows, sweep_opts);
  std::string sweep_csv = "window_seconds,r\n";
  ordered_json sweep_json = ordered_json::array();
  for (const auto& w : sweep) {
    sweep_csv += std::to_string(w.window_seconds) + "," + num(w.r) + "\n";
    sweep_json.push_back({{"window_seconds", w.window_seconds}, {"r", w.r}});
  }
  emit(manifest, dir, "temporal_sweep", "temporal_sweep.csv", sweep_csv);
  summary["temporal_sweep"] = sweep_json;

  // Interarrival summary statistics against vote strength; reported only.
  const auto joined = join_labels(sessions, aggregated);
  std::vector<double> votes, medians, means, variances;
  for (const auto& j : joined) {
    const auto st = interarrival_stats(*j.session);
    votes.push_back(j.label->bullying_votes);
    medians.push_back(st.median);
    means.push_back(st.mean);
    variances.push_back(st.variance);
  }
  summary["interarrival_correlations"] = {{"median", maybe_pearson(medians, votes)},
                                          {"mean", maybe_pearson(means, votes)},
                                          {"variance", maybe_pearson(variances, votes)}};

  for (Question q : {Question::bullying, Question::aggression}) {
    const std::string name = q == Question::bullying ? "bullying" : "aggression";
    const auto bins = vote_distribution(records, q);
    std::string csv = "k,fraction\n";
    for (std::size_t k = 0; k < bins.size(); ++k) csv += std::to_string(k) + "," + num(bins[k]) + "\n";
    emit(manifest, dir, "vote_distribution_" + name, "vote_distribution_" + name + ".csv", csv);
    summary["vote_distribution_" + name] = bins;

    const auto dist = category_vote_distribution(sessions, aggregated, q);
    std::string cat_csv = "k,n_sessions,category,fraction\n";
    for (std::size_t k = 0; k < dist.fractions.size(); ++k) {
      for (std::size_t c = 0; c < kCategories.size(); ++c) {
        cat_csv += std::to_string(k) + "," + std::to_string(dist.sessions_per_k[k]) + "," + std::string(kCategories[c]) +
                   "," + num(dist.fractions[k][c]) + "\n";
      }
    }
    emit(manifest, dir, "category_votes_" + name, "category_votes_" + name + ".csv", cat_csv);
  }

  const auto heat = vote_heatmap(records);
  std::string heat_csv = "aggression_votes,bullying_votes,fraction\n";
  for (std::size_t a = 0; a < heat.cells.size(); ++a) {
    for (std::size_t b = 0; b < heat.cells[a].size(); ++b) {
      heat_csv += std::to_string(a) + "," + std::to_string(b) + "," + num(heat.cells[a][b]) + "\n";
    }
  }
  emit(manifest, dir, "heatmap", "vote_heatmap.csv", heat_csv);
  summary["heatmap_below_diagonal_mass"] = heat.below_diagonal_mass;

  std::vector<double> followed_by, follows, comments;
  for (const auto& s : sessions) {
    followed_by.push_back(static_cast<double>(s.owner.followed_by));
    follows.push_back(static_cast<double>(s.owner.follows));
    comments.push_back(static_cast<double>(s.comments.size()));
  }
  emit(manifest, dir, "ccdf_followed_by", "ccdf_followed_by.csv", ccdf_csv(followed_by));
  emit(manifest, dir, "ccdf_follows", "ccdf_follows.csv", ccdf_csv(follows));
  emit(manifest, dir, "ccdf_comments", "ccdf_comments.csv", ccdf_csv(comments));

  ordered_json colabel = ordered_json::object();
  for (auto anchor : {"person_people", "text", "tattoo"}) {
    try {
      const auto f = colabel_fraction(sessions, anchor);
      std::string csv = "category,fraction\nexclusive," + num(f.exclusive) + "\n";
      for (const auto& [cat, frac] : f.with) csv += cat + "," + num(frac) + "\n";
      emit(manifest, dir, std::string("colabel_") + anchor, std::string("colabel_") + anchor + ".csv", csv);
      colabel[anchor] = {{"n", f.n_anchor}, {"exclusive", f.exclusive}};
    } catch (const ValidationError&) {
      colabel[anchor] = nullptr;
    }
  }
  summary["colabel"] = colabel;

  emit(manifest, dir, "summary", "summary.json", summary.dump(2) + "\n");
  manifest.config({{"confidence_threshold", threshold}, {"windows", windows}, {"binary_label", binary_label}});
  manifest.write(dir);
  out << "analyzed " << sessions.size() << " sessions\n";
  return 0;
}

int run_report(const std::string& run_dir, const std::string& out_path, std::ostream& out) {
  std::vector<MetricsReport> reports;
  const fs::path dir(run_dir);
  if (!fs::is_directory(dir)) throw Error("run directory " + run_dir + " does not exist");
  std::map<ExperimentKind, MetricsReport> by_kind;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.starts_with("report_") && name.ends_with(".json")) {
      auto r = report_from_json(read_file(entry.path()));
      by_kind[r.experiment] = std::move(r);
    }
  }
  if (by_kind.empty()) throw Error("no report_*.json files in " + run_dir);

  auto fixed = [](const std::optional<double>& v) {
    if (!v) return std::string("n/a");
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << *v;
    return s.str();
  };
  std::size_t feature_width = std::string("Features").size();
  for (const auto& [kind, r] : by_kind) feature_width = std::max(feature_width, feature_description(kind).size());
  std::ostringstream table;
  auto row = [&](std::string_view f, std::string_view c, std::string_view a, std::string_view p, std::string_view r) {
    table << std::left << std::setw(static_cast<int>(feature_width)) << f << " | " << std::setw(11) << c << " | "
          << std::setw(8) << a << " | " << std::setw(9) << p << " | " << r << "\n";
  };
  row("Features", "Classifier", "Accuracy", "Precision", "Recall");
  table << std::string(feature_width + 50, '-') << "\n";
  double baseline = 0.0;
  for (const auto& [kind, r] : by_kind) {
    row(feature_description(kind), classifier_description(kind), fixed(r.mean_accuracy), fixed(r.mean_precision),
        fixed(r.mean_recall));
    baseline = r.baseline;
  }
  table << "\nBaseline (majority class): " << fixed(baseline) << "\n";
  table << "All values are means over " << by_kind.begin()->second.folds.size() << " cross-validation folds.\n";
  out << table.str();
  if (!out_path.empty()) write_file_atomic(out_path, table.str());
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cyberbullying detection pipeline over media-session corpora", "sessionscreen"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CommonPaths paths;
  std::optional<std::uint64_t> seed;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus and crowd labels");
  std::string synth_config;
  std::optional<int> synth_sessions;
  synth->add_option("--config", synth_config, "Synthetic corpus config (JSON)")->check(CLI::ExistingFile);
  synth->add_option("--sessions", synth_sessions, "Number of sessions");
  synth->add_option("--seed", seed, "Seed (falls back to SESSION_SCREEN_SEED)");
  synth->add_option("--out", paths.out, "Output directory")->required();

  auto* select = app.add_subcommand("select", "Keep sessions with many, mostly negative comments");
  std::size_t min_comments = 15;
  double negativity = 0.40;
  std::optional<std::size_t> comment_cap;
  select->add_option("--corpus", paths.corpus, "Corpus (JSON Lines)")->required()->check(CLI::ExistingFile);
  select->add_option("--lexicon", paths.lexicon, "Negative-word lexicon")->check(CLI::ExistingFile);
  select->add_option("--min-comments", min_comments, "Minimum comments per session")->capture_default_str();
  select->add_option("--negativity", negativity, "Negativity ratio must exceed this")->capture_default_str();
  select->add_option("--max-comments", comment_cap, "Keep only the most recent comments of each session");
  select->add_option("--out", paths.out, "Output directory")->required();

  auto* aggregate = app.add_subcommand("aggregate", "Trust-weighted majority vote over crowd labels");
  double threshold = 0.60;
  aggregate->add_option("--labels", paths.labels, "Label CSV")->required()->check(CLI::ExistingFile);
  aggregate->add_option("--threshold", threshold, "Confidence threshold")->capture_default_str();
  aggregate->add_option("--out", paths.out, "Output directory")->required();

  auto* featurize = app.add_subcommand("featurize", "Dump n-gram, meta data and image features");
  featurize->add_option("--corpus", paths.corpus, "Corpus (JSON Lines)")->required()->check(CLI::ExistingFile);
  featurize->add_option("--config", paths.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  featurize->add_option("--stoplist", paths.stoplist, "Stop list")->check(CLI::ExistingFile);
  featurize->add_option("--out", paths.out, "Output directory")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Cross-validate a classifier configuration");
  std::string experiment;
  evaluate->add_option("--config", paths.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  evaluate->add_option("--experiment", experiment, "Override the experiment, or 'all'");
  evaluate->add_option("--corpus", paths.corpus, "Corpus (JSON Lines)")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--labels", paths.labels, "Label CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--lexicon", paths.lexicon, "Negative-word lexicon")->check(CLI::ExistingFile);
  evaluate->add_option("--stoplist", paths.stoplist, "Stop list")->check(CLI::ExistingFile);
  evaluate->add_option("--seed", seed, "Seed (falls back to SESSION_SCREEN_SEED, then the config)");
  evaluate->add_option("--out", paths.out, "Output directory")->required();

  auto* analyze = app.add_subcommand("analyze", "Correlation and distribution analyses");
  std::vector<std::int64_t> windows = {300, 3600, 86400};
  bool binary_label = false;
  analyze->add_option("--corpus", paths.corpus, "Corpus (JSON Lines)")->required()->check(CLI::ExistingFile);
  analyze->add_option("--labels", paths.labels, "Label CSV")->required()->check(CLI::ExistingFile);
  analyze->add_option("--threshold", threshold, "Confidence threshold")->capture_default_str();
  analyze->add_option("--windows", windows, "Burst windows in seconds, ascending")->capture_default_str();
  analyze->add_flag("--binary-label", binary_label, "Correlate bursts with the binary class instead of vote counts");
  analyze->add_option("--out", paths.out, "Output directory")->required();

  auto* report = app.add_subcommand("report", "Print the classifier summary table of an evaluate run");
  std::string run_dir, report_out;
  report->add_option("--run", run_dir, "Directory written by evaluate")->required();
  report->add_option("--out", report_out, "Also write the table to this file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*synth) return run_synth(synth_config, synth_sessions, seed, paths.out, out);
    if (*select) return run_select(paths, min_comments, negativity, comment_cap, out);
    if (*aggregate) return run_aggregate(paths, threshold, out, err);
    if (*featurize) return run_featurize(paths, out);
    if (*evaluate) return run_evaluate(paths, experiment, seed, out, err);
    if (*analyze) return run_analyze(paths, threshold, windows, binary_label, out);
    if (*report) return run_report(run_dir, report_out, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace sessionscreen
