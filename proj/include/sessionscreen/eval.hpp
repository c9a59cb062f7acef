#pragma once

#include "sessionscreen/corpus.hpp"
#include "sessionscreen/labels.hpp"
#include "sessionscreen/models.hpp"
#include "sessionscreen/reduce.hpp"
#include "sessionscreen/textproc.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace sessionscreen {

struct FoldPlan {
  int k = 0;
  std::uint64_t seed = 0;
  std::map<std::string, int> assignment;  // session id -> fold
  std::vector<std::vector<std::size_t>> folds;  // input positions per fold, ascending

  std::vector<std::size_t> train_indices(int fold) const;
};

// Shuffles ids with the seed and deals them round-robin into k folds. With
// strata, ids are grouped by stratum first so each fold keeps the class mix.
FoldPlan kfold_split(std::span<const std::string> session_ids, int k = 10, std::uint64_t seed = 0,
                     std::span<const int> strata = {});

struct Metrics {
  long long tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy = 0.0;
  std::optional<double> precision;  // absent when tp + fp == 0
  std::optional<double> recall;     // absent when tp + fn == 0
};

// Positive class is +1.
Metrics confusion_metrics(std::span<const int> predictions, std::span<const int> truths);

// Majority-class share among confident labels.
double baseline_accuracy(std::span<const AggregatedLabel> aggregated);

enum class ExperimentKind { nb_meta, nb_meta_image, svm_text, svm_text_svd, svm_full };

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(std::string_view name);
// Feature and classifier columns for the summary table.
std::string_view feature_description(ExperimentKind kind);
std::string_view classifier_description(ExperimentKind kind);
inline constexpr std::array<ExperimentKind, 5> kAllExperiments = {
    ExperimentKind::nb_meta, ExperimentKind::nb_meta_image, ExperimentKind::svm_text,
    ExperimentKind::svm_text_svd, ExperimentKind::svm_full};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::svm_full;
  int k_folds = 10;
  std::uint64_t seed = 1;
  int svd_components = 200;
  int kpca_components = 20;
  Kernel kernel = Kernel::rbf();
  double C = 1.0;
  std::set<int> ngram_orders = {1, 3};
  int min_df = 2;
  std::int64_t window_seconds = 3600;
  SelectionCriteria selection;
  double confidence_threshold = 0.60;
  bool stratified = true;
  bool apply_selection = true;

  bool uses_text() const;
  // Throws ConfigError on an inconsistent configuration.
  void validate() const;
};

// Parses and validates the JSON experiment config; absent keys keep their defaults.
ExperimentConfig parse_experiment_config(const std::string& json_text);
std::string experiment_config_to_json(const ExperimentConfig& config);

// Sessions and labels joined for training: selected, aggregated, with
// low-confidence sessions removed.
struct ExperimentData {
  std::vector<MediaSession> sessions;
  Labels labels;
  std::vector<AggregatedLabel> aggregated;  // parallel to sessions
  std::size_t n_low_confidence = 0;
  std::size_t n_unselected = 0;
};

// Sessions without any label record are an error.
ExperimentData prepare_data(const ExperimentConfig& config, std::span<const MediaSession> corpus,
                            std::span<const LabelRecord> records, const Lexicon& lexicon);

// Everything fitted on a training fold.
struct FittedPipeline {
  ExperimentKind experiment = ExperimentKind::svm_full;
  std::optional<Vocabulary> vocabulary;
  std::optional<SvdModel> svd;
  std::optional<Standardizer> standardizer;
  std::optional<KpcaModel> kpca;
  std::optional<NbModel> nb;
  std::optional<SvmModel> svm;
  std::vector<std::string> warnings;
};

FittedPipeline fit_pipeline(const ExperimentConfig& config, std::span<const MediaSession> train, std::span<const int> y,
                            const StopList& stoplist);
Labels predict_pipeline(const FittedPipeline& model, const ExperimentConfig& config,
                        std::span<const MediaSession> sessions, const StopList& stoplist);

struct FoldResult {
  int fold = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  Metrics metrics;
  std::string artifact_digest;  // SHA-256 of the serialized fitted pipeline
};

struct MetricsReport {
  ExperimentKind experiment = ExperimentKind::svm_full;
  std::size_t n_sessions = 0;
  double baseline = 0.0;
  std::vector<FoldResult> folds;
  // Mean of per-fold values; precision/recall average over folds where defined.
  double mean_accuracy = 0.0;
  std::optional<double> mean_precision;
  std::optional<double> mean_recall;
  Metrics pooled;  // from summed confusion counts
  std::vector<std::string> warnings;
};

MetricsReport run_experiment(const ExperimentConfig& config, const ExperimentData& data, const StopList& stoplist);
MetricsReport run_experiment(const ExperimentConfig& config, std::span<const MediaSession> corpus,
                             std::span<const LabelRecord> records, const Lexicon& lexicon, const StopList& stoplist);

std::string report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const std::string& json_text);
std::string report_folds_csv(const MetricsReport& report);

}  // namespace sessionscreen
