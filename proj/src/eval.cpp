#include "sessionscreen/eval.hpp"

#include "sessionscreen/error.hpp"
#include "sessionscreen/features.hpp"
#include "sessionscreen/rng.hpp"
#include "sessionscreen/serialize.hpp"

#include "json.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace sessionscreen {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<std::size_t> FoldPlan::train_indices(int fold) const {
  std::vector<std::size_t> out;
  for (int f = 0; f < k; ++f) {
    if (f != fold) out.insert(out.end(), folds[static_cast<std::size_t>(f)].begin(), folds[static_cast<std::size_t>(f)].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

FoldPlan kfold_split(std::span<const std::string> session_ids, int k, std::uint64_t seed, std::span<const int> strata) {
  const std::size_t n = session_ids.size();
  if (k < 1) throw ConfigError("k must be >= 1");
  if (static_cast<std::size_t>(k) > n) {
    throw ConfigError("k = " + std::to_string(k) + " exceeds the number of sessions (" + std::to_string(n) + ")");
  }
  if (!strata.empty() && strata.size() != n) throw ValidationError("strata length differs from session count");

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.folds.assign(static_cast<std::size_t>(k), {});
  Rng rng(seed);

  std::vector<std::size_t> order;
  if (strata.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
  } else {
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[strata[i]].push_back(i);
    for (auto& [stratum, members] : groups) {
      rng.shuffle(members);
      order.insert(order.end(), members.begin(), members.end());
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    const int fold = static_cast<int>(p % static_cast<std::size_t>(k));
    const auto idx = order[p];
    if (!plan.assignment.emplace(session_ids[idx], fold).second) {
      throw ValidationError("duplicate session id '" + session_ids[idx] + "' in fold split");
    }
    plan.folds[static_cast<std::size_t>(fold)].push_back(idx);
  }
  for (auto& f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

Metrics confusion_metrics(std::span<const int> predictions, std::span<const int> truths) {
  if (predictions.size() != truths.size()) throw ValidationError("predictions and truths differ in length");
  if (predictions.empty()) throw ValidationError("no predictions to score");
  Metrics m;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool p = predictions[i] == 1, t = truths[i] == 1;
    if (p && t) ++m.tp;
    else if (p && !t) ++m.fp;
    else if (!p && !t) ++m.tn;
    else ++m.fn;
  }
  m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(m.tp + m.fp + m.tn + m.fn);
  if (m.tp + m.fp > 0) m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  if (m.tp + m.fn > 0) m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  return m;
}

double baseline_accuracy(std::span<const AggregatedLabel> aggregated) {
  std::size_t pos = 0, neg = 0;
  for (const auto& a : aggregated) {
    if (a.final_class == FinalClass::bullying) ++pos;
    else if (a.final_class == FinalClass::not_bullying) ++neg;
  }
  if (pos + neg == 0) throw ValidationError("baseline accuracy needs at least one confidently labeled session");
  return static_cast<double>(std::max(pos, neg)) / static_cast<double>(pos + neg);
}

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::nb_meta: return "nb_meta";
    case ExperimentKind::nb_meta_image: return "nb_meta_image";
    case ExperimentKind::svm_text: return "svm_text";
    case ExperimentKind::svm_text_svd: return "svm_text_svd";
    case ExperimentKind::svm_full: return "svm_full";
  }
  return "svm_full";
}

ExperimentKind experiment_from_string(std::string_view name) {
  for (auto kind : kAllExperiments) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown experiment '" + std::string(name) +
                    "' (expected nb_meta, nb_meta_image, svm_text, svm_text_svd or svm_full)");
}

std::string_view feature_description(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::nb_meta: return "Meta data";
    case ExperimentKind::nb_meta_image: return "Meta data, image categories";
    case ExperimentKind::svm_text: return "N-grams";
    case ExperimentKind::svm_text_svd: return "SVD + N-grams";
    case ExperimentKind::svm_full: return "SVD + N-grams, kernel PCA + (meta data, image categories)";
  }
  return "";
}

std::string_view classifier_description(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::nb_meta:
    case ExperimentKind::nb_meta_image: return "Naive Bayes";
    default: return "linear SVM";
  }
}

bool ExperimentConfig::uses_text() const {
  return experiment == ExperimentKind::svm_text || experiment == ExperimentKind::svm_text_svd ||
         experiment == ExperimentKind::svm_full;
}

void ExperimentConfig::validate() const {
  if (k_folds < 2) throw ConfigError("k_folds must be >= 2");
  if (svd_components < 1) throw ConfigError("svd_components must be >= 1");
  if (kpca_components < 2) throw ConfigError("kpca_components must be >= 2");
  if (!(C > 0.0)) throw ConfigError("C must be positive");
  if (window_seconds <= 0) throw ConfigError("window_seconds must be positive");
  if (!(confidence_threshold > 0.0 && confidence_threshold <= 1.0)) throw ConfigError("confidence threshold must lie in (0, 1]");
  if (selection.min_comments < 1) throw ConfigError("min_comments must be >= 1");
  if (!(selection.negativity_threshold >= 0.0 && selection.negativity_threshold <= 1.0)) {
    throw ConfigError("negativity threshold must lie in [0, 1]");
  }
  if (kernel.type == Kernel::Type::rbf && kernel.gamma < 0.0) throw ConfigError("rbf gamma must be positive");
  if (uses_text()) {
    if (ngram_orders.empty()) {
      throw ConfigError("experiment '" + std::string(to_string(experiment)) + "' uses text features but ngram_orders is empty");
    }
    for (int n : ngram_orders) {
      if (n < 1 || n > 3) throw ConfigError("ngram order " + std::to_string(n) + " outside {1,2,3}");
    }
    if (min_df < 1) throw ConfigError("min_df must be >= 1");
  }
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("experiment config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  ExperimentConfig c;
  try {
    if (j.contains("experiment")) c.experiment = experiment_from_string(j.at("experiment").get<std::string>());
    if (j.contains("k_folds")) c.k_folds = j.at("k_folds").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("svd_components")) c.svd_components = j.at("svd_components").get<int>();
    if (j.contains("kpca_components")) c.kpca_components = j.at("kpca_components").get<int>();
    if (j.contains("kernel")) {
      const auto& k = j.at("kernel");
      std::string type = k.is_string() ? k.get<std::string>() : k.at("type").get<std::string>();
      if (type == "rbf") {
        c.kernel = Kernel::rbf(k.is_object() && k.contains("gamma") ? k.at("gamma").get<double>() : 0.0);
      } else if (type == "linear") {
        c.kernel = Kernel::linear();
      } else {
        throw ConfigError("unknown kernel '" + type + "'");
      }
    }
    if (j.contains("kernel_gamma")) c.kernel.gamma = j.at("kernel_gamma").get<double>();
    if (j.contains("C")) c.C = j.at("C").get<double>();
    if (j.contains("ngram_orders")) c.ngram_orders = j.at("ngram_orders").get<std::set<int>>();
    if (j.contains("min_df")) c.min_df = j.at("min_df").get<int>();
    if (j.contains("window_seconds")) c.window_seconds = j.at("window_seconds").get<std::int64_t>();
    if (j.contains("stratified")) c.stratified = j.at("stratified").get<bool>();
    if (j.contains("apply_selection")) c.apply_selection = j.at("apply_selection").get<bool>();
    if (j.contains("thresholds")) {
      const auto& t = j.at("thresholds");
      if (t.contains("min_comments")) c.selection.min_comments = t.at("min_comments").get<std::size_t>();
      if (t.contains("negativity")) c.selection.negativity_threshold = t.at("negativity").get<double>();
      if (t.contains("confidence")) c.confidence_threshold = t.at("confidence").get<double>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

namespace {

ordered_json config_json(const ExperimentConfig& c) {
  ordered_json j;
  j["experiment"] = std::string(to_string(c.experiment));
  j["k_folds"] = c.k_folds;
  j["seed"] = c.seed;
  j["svd_components"] = c.svd_components;
  j["kpca_components"] = c.kpca_components;
  if (c.kernel.type == Kernel::Type::linear) {
    j["kernel"] = {{"type", "linear"}};
  } else {
    j["kernel"] = {{"type", "rbf"}, {"gamma", c.kernel.gamma}};
  }
  j["C"] = c.C;
  j["ngram_orders"] = c.ngram_orders;
  j["min_df"] = c.min_df;
  j["window_seconds"] = c.window_seconds;
  j["thresholds"] = {{"min_comments", c.selection.min_comments},
                     {"negativity", c.selection.negativity_threshold},
                     {"confidence", c.confidence_threshold}};
  j["stratified"] = c.stratified;
  j["apply_selection"] = c.apply_selection;
  return j;
}

}  // namespace

std::string experiment_config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2); }

ExperimentData prepare_data(const ExperimentConfig& config, std::span<const MediaSession> corpus,
                            std::span<const LabelRecord> records, const Lexicon& lexicon) {
  std::vector<MediaSession> selected =
      config.apply_selection ? select_sessions(corpus, lexicon, config.selection)
                             : std::vector<MediaSession>(corpus.begin(), corpus.end());
  const auto aggregated = aggregate_all(records, config.confidence_threshold);
  std::unordered_map<std::string, const AggregatedLabel*> by_id;
  for (const auto& a : aggregated) by_id.emplace(a.session_id, &a);

  ExperimentData data;
  data.n_unselected = corpus.size() - selected.size();
  std::vector<std::string> missing;
  for (auto& s : selected) {
    auto it = by_id.find(s.session_id);
    if (it == by_id.end()) {
      missing.push_back(s.session_id);
      continue;
    }
    const AggregatedLabel& a = *it->second;
    if (a.final_class == FinalClass::low_confidence) {
      ++data.n_low_confidence;
      continue;
    }
    data.labels.push_back(a.final_class == FinalClass::bullying ? 1 : -1);
    data.aggregated.push_back(a);
    data.sessions.push_back(std::move(s));
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) list += (i ? ", " : "") + missing[i];
    if (missing.size() > 10) list += ", ...";
    throw ValidationError(std::to_string(missing.size()) + " selected sessions have no labels: " + list);
  }
  return data;
}

namespace {

struct FoldInputs {
  std::optional<SparseMatrix> text;
  std::optional<Eigen::MatrixXd> dense;
};

bool uses_dense(ExperimentKind kind) { return kind != ExperimentKind::svm_text && kind != ExperimentKind::svm_text_svd; }
bool uses_image(ExperimentKind kind) { return kind == ExperimentKind::nb_meta_image || kind == ExperimentKind::svm_full; }

FoldInputs raw_inputs(const ExperimentConfig& config, const Vocabulary* vocab, std::span<const MediaSession> sessions,
                      const StopList& stoplist) {
  FoldInputs in;
  if (vocab) in.text = vectorize_corpus(sessions, *vocab, stoplist);
  if (uses_dense(config.experiment)) {
    in.dense = dense_feature_matrix(sessions, uses_image(config.experiment), config.window_seconds);
  }
  return in;
}

Eigen::MatrixXd reduced_inputs(const FittedPipeline& model, const FoldInputs& in) {
  Eigen::MatrixXd text = model.svd->project_rows(*in.text);
  if (!model.kpca) return text;
  const Eigen::MatrixXd dense = model.kpca->project_rows(model.standardizer->apply(*in.dense));
  return concat_reduced_rows(text, dense);
}

SvdOptions svd_options(const ExperimentConfig& config) {
  SvdOptions o;
  o.cap_to_rank = true;
  o.seed = config.seed;
  return o;
}

}  // namespace

FittedPipeline fit_pipeline(const ExperimentConfig& config, std::span<const MediaSession> train, std::span<const int> y,
                            const StopList& stoplist) {
  config.validate();
  if (train.size() != y.size()) throw ValidationError("training sessions and labels differ in length");
  FittedPipeline model;
  model.experiment = config.experiment;
  if (config.uses_text()) model.vocabulary = build_vocabulary(train, stoplist, config.ngram_orders, config.min_df);
  const FoldInputs in = raw_inputs(config, model.vocabulary ? &*model.vocabulary : nullptr, train, stoplist);

  SvmOptions svm;
  svm.C = config.C;
  switch (config.experiment) {
    case ExperimentKind::nb_meta:
    case ExperimentKind::nb_meta_image:
      model.nb = nb_fit(*in.dense, y);
      break;
    case ExperimentKind::svm_text:
      model.svm = svm_fit(*in.text, y, svm);
      break;
    case ExperimentKind::svm_text_svd:
    case ExperimentKind::svm_full: {
      model.svd = fit_truncated_svd(*in.text, config.svd_components, svd_options(config));
      model.warnings.insert(model.warnings.end(), model.svd->warnings.begin(), model.svd->warnings.end());
      if (config.experiment == ExperimentKind::svm_full) {
        model.standardizer = fit_standardizer(*in.dense);
        FitOptions cap;
        cap.cap_to_rank = true;
        model.kpca = fit_kernel_pca(model.standardizer->apply(*in.dense), config.kpca_components, config.kernel, cap);
        model.warnings.insert(model.warnings.end(), model.kpca->warnings.begin(), model.kpca->warnings.end());
      }
      model.svm = svm_fit(reduced_inputs(model, in), y, svm);
      break;
    }
  }
  return model;
}

Labels predict_pipeline(const FittedPipeline& model, const ExperimentConfig& config,
                        std::span<const MediaSession> sessions, const StopList& stoplist) {
  const FoldInputs in = raw_inputs(config, model.vocabulary ? &*model.vocabulary : nullptr, sessions, stoplist);
  Labels out(sessions.size());
  if (model.nb) {
    for (std::size_t i = 0; i < sessions.size(); ++i) {
      out[i] = model.nb->predict(in.dense->row(static_cast<Eigen::Index>(i)).transpose()).label;
    }
    return out;
  }
  Eigen::VectorXd decision;
  if (model.svd) {
    decision = reduced_inputs(model, in) * model.svm->weights;
  } else {
    decision = *in.text * model.svm->weights;
  }
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    out[i] = decision[static_cast<Eigen::Index>(i)] + model.svm->bias > 0.0 ? 1 : -1;
  }
  return out;
}

MetricsReport run_experiment(const ExperimentConfig& config, const ExperimentData& data, const StopList& stoplist) {
  config.validate();
  MetricsReport report;
  report.experiment = config.experiment;
  report.n_sessions = data.sessions.size();
  report.baseline = baseline_accuracy(data.aggregated);

  std::vector<std::string> ids;
  ids.reserve(data.sessions.size());
  for (const auto& s : data.sessions) ids.push_back(s.session_id);
  const FoldPlan plan =
      kfold_split(ids, config.k_folds, config.seed, config.stratified ? std::span<const int>(data.labels) : std::span<const int>());

  std::vector<int> all_pred, all_truth;
  double acc_sum = 0.0, prec_sum = 0.0, rec_sum = 0.0;
  int prec_n = 0, rec_n = 0;
  for (int f = 0; f < plan.k; ++f) {
    const auto train_idx = plan.train_indices(f);
    const auto& test_idx = plan.folds[static_cast<std::size_t>(f)];
    std::vector<MediaSession> train, test;
    Labels y_train, y_test;
    for (auto i : train_idx) {
      train.push_back(data.sessions[i]);
      y_train.push_back(data.labels[i]);
    }
    for (auto i : test_idx) {
      test.push_back(data.sessions[i]);
      y_test.push_back(data.labels[i]);
    }
    const FittedPipeline model = fit_pipeline(config, train, y_train, stoplist);
    for (const auto& w : model.warnings) report.warnings.push_back("fold " + std::to_string(f) + ": " + w);
    const Labels pred = predict_pipeline(model, config, test, stoplist);

    FoldResult fr;
    fr.fold = f;
    fr.n_train = train.size();
    fr.n_test = test.size();
    fr.metrics = confusion_metrics(pred, y_test);
    fr.artifact_digest = sha256_hex(pipeline_to_json(model));
    acc_sum += fr.metrics.accuracy;
    if (fr.metrics.precision) {
      prec_sum += *fr.metrics.precision;
      ++prec_n;
    }
    if (fr.metrics.recall) {
      rec_sum += *fr.metrics.recall;
      ++rec_n;
    }
    all_pred.insert(all_pred.end(), pred.begin(), pred.end());
    all_truth.insert(all_truth.end(), y_test.begin(), y_test.end());
    report.folds.push_back(std::move(fr));
  }
  report.mean_accuracy = acc_sum / plan.k;
  if (prec_n) report.mean_precision = prec_sum / prec_n;
  if (rec_n) report.mean_recall = rec_sum / rec_n;
  report.pooled = confusion_metrics(all_pred, all_truth);
  return report;
}

MetricsReport run_experiment(const ExperimentConfig& config, std::span<const MediaSession> corpus,
                             std::span<const LabelRecord> records, const Lexicon& lexicon, const StopList& stoplist) {
  config.validate();
  return run_experiment(config, prepare_data(config, corpus, records, lexicon), stoplist);
}

namespace {

ordered_json optional_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

std::optional<double> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

ordered_json metrics_json(const Metrics& m) {
  ordered_json j;
  j["accuracy"] = m.accuracy;
  j["precision"] = optional_json(m.precision);
  j["recall"] = optional_json(m.recall);
  j["tp"] = m.tp;
  j["fp"] = m.fp;
  j["tn"] = m.tn;
  j["fn"] = m.fn;
  return j;
}

Metrics metrics_from(const json& j) {
  Metrics m;
  m.accuracy = j.at("accuracy").get<double>();
  m.precision = optional_from(j.at("precision"));
  m.recall = optional_from(j.at("recall"));
  m.tp = j.at("tp").get<long long>();
  m.fp = j.at("fp").get<long long>();
  m.tn = j.at("tn").get<long long>();
  m.fn = j.at("fn").get<long long>();
  return m;
}

std::string csv_number(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream s;
  s.precision(17);
  s << *v;
  return s.str();
}

}  // namespace

std::string report_to_json(const MetricsReport& r) {
  ordered_json j;
  j["experiment"] = std::string(to_string(r.experiment));
  j["features"] = std::string(feature_description(r.experiment));
  j["classifier"] = std::string(classifier_description(r.experiment));
  j["n_sessions"] = r.n_sessions;
  j["baseline_accuracy"] = r.baseline;
  j["k_folds"] = r.folds.size();
  j["mean"] = {{"accuracy", r.mean_accuracy},
               {"precision", optional_json(r.mean_precision)},
               {"recall", optional_json(r.mean_recall)}};
  j["pooled"] = metrics_json(r.pooled);
  auto folds = ordered_json::array();
  for (const auto& f : r.folds) {
    ordered_json fj;
    fj["fold"] = f.fold;
    fj["n_train"] = f.n_train;
    fj["n_test"] = f.n_test;
    fj["metrics"] = metrics_json(f.metrics);
    fj["artifact_digest"] = f.artifact_digest;
    folds.push_back(std::move(fj));
  }
  j["folds"] = std::move(folds);
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

MetricsReport report_from_json(const std::string& json_text) {
  MetricsReport r;
  try {
    const json j = json::parse(json_text);
    r.experiment = experiment_from_string(j.at("experiment").get<std::string>());
    r.n_sessions = j.at("n_sessions").get<std::size_t>();
    r.baseline = j.at("baseline_accuracy").get<double>();
    r.mean_accuracy = j.at("mean").at("accuracy").get<double>();
    r.mean_precision = optional_from(j.at("mean").at("precision"));
    r.mean_recall = optional_from(j.at("mean").at("recall"));
    r.pooled = metrics_from(j.at("pooled"));
    for (const auto& fj : j.at("folds")) {
      FoldResult f;
      f.fold = fj.at("fold").get<int>();
      f.n_train = fj.at("n_train").get<std::size_t>();
      f.n_test = fj.at("n_test").get<std::size_t>();
      f.metrics = metrics_from(fj.at("metrics"));
      f.artifact_digest = fj.at("artifact_digest").get<std::string>();
      r.folds.push_back(std::move(f));
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("metrics report: ") + e.what());
  }
  return r;
}

std::string report_folds_csv(const MetricsReport& r) {
  std::ostringstream out;
  out << "fold,n_train,n_test,tp,fp,tn,fn,accuracy,precision,recall,artifact_digest\n";
  for (const auto& f : r.folds) {
    const auto& m = f.metrics;
    out << f.fold << ',' << f.n_train << ',' << f.n_test << ',' << m.tp << ',' << m.fp << ',' << m.tn << ',' << m.fn
        << ',' << csv_number(m.accuracy) << ',' << csv_number(m.precision) << ',' << csv_number(m.recall) << ','
        << f.artifact_digest << '\n';
  }
  return out.str();
}

}  // namespace sessionscreen
