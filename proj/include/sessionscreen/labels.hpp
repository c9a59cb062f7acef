#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sessionscreen {

struct LabelRecord {
  std::string session_id;
  std::string labeler_id;
  double trust = 1.0;  // (0, 1]
  bool aggression_vote = false;
  bool bullying_vote = false;
};

struct LabelSet {
  std::vector<LabelRecord> records;  // file order
  std::vector<std::string> warnings;
};

// CSV with header session_id,labeler_id,trust,aggression_vote,bullying_vote.
// A bullying vote without an aggression vote is accepted with a warning.
LabelSet load_labels(const std::filesystem::path& path);
LabelSet parse_labels(std::string_view csv);
std::string labels_to_csv(std::span<const LabelRecord> records);

enum class FinalClass { bullying, not_bullying, low_confidence };
enum class Question { bullying, aggression };

std::string_view to_string(FinalClass c);
FinalClass final_class_from_string(std::string_view s);

struct AggregatedLabel {
  std::string session_id;
  int n_labels = 0;
  int bullying_votes = 0;
  int aggression_votes = 0;
  double bullying_confidence = 0.0;
  double aggression_confidence = 0.0;
  FinalClass final_class = FinalClass::low_confidence;
};

// Slack applied when comparing a confidence against the threshold, so that
// trust sums that are exactly at the threshold in real arithmetic are not
// lost to rounding.
inline constexpr double kConfidenceSlack = 1e-12;

// Trust-weighted vote shares. bullying when the bullying share reaches the
// threshold, not_bullying when the complementary share does, low_confidence
// otherwise.
AggregatedLabel aggregate_session(std::span<const LabelRecord> records, double confidence_threshold = 0.60);

// Groups records by session (sorted by session id) and aggregates each.
std::vector<AggregatedLabel> aggregate_all(std::span<const LabelRecord> records,
                                           double confidence_threshold = 0.60);

// CSV session_id,n_labels,bullying_votes,aggression_votes,bullying_confidence,final_class.
std::string aggregated_to_csv(std::span<const AggregatedLabel> labels);

// Bin k holds the fraction of sessions with exactly k positive votes,
// k = 0..labels per session. Every session must carry the same label count.
std::vector<double> vote_distribution(std::span<const LabelRecord> records, Question question);

struct VoteHeatmap {
  // cells[a][b]: fraction of sessions with a aggression and b bullying votes.
  std::vector<std::vector<double>> cells;
  double below_diagonal_mass = 0.0;  // total over b > a
};

VoteHeatmap vote_heatmap(std::span<const LabelRecord> records);

}  // namespace sessionscreen
