#pragma once

#include "sessionscreen/corpus.hpp"
#include "sessionscreen/labels.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace sessionscreen {

// Sample Pearson correlation. Throws NumericalError for constant input
// and ValidationError for mismatched or too-short input.
double pearson(std::span<const double> x, std::span<const double> y);

struct Correlation {
  std::string feature;
  Question question = Question::bullying;
  double r = 0.0;
  std::size_t n = 0;
};

struct CorrelationReport {
  std::vector<Correlation> pairs;
  const Correlation& at(const std::string& feature, Question question) const;
};

// Sessions paired with their aggregated label by session id. Every session
// must have a label; labels for absent sessions are ignored.
struct JoinedSession {
  const MediaSession* session;
  const AggregatedLabel* label;
};
std::vector<JoinedSession> join_labels(std::span<const MediaSession> sessions,
                                       std::span<const AggregatedLabel> aggregated);

// r between vote counts (bullying, aggression) and likes, shared_media,
// followed_by, follows.
CorrelationReport correlation_table(std::span<const MediaSession> sessions,
                                    std::span<const AggregatedLabel> aggregated);

struct WindowCorrelation {
  std::int64_t window_seconds = 0;
  double r = 0.0;
};

struct TemporalSweepOptions {
  // Correlate against the aggregated binary class instead of vote counts.
  bool binary_label = false;
};

std::vector<WindowCorrelation> temporal_correlation_sweep(std::span<const MediaSession> sessions,
                                                          std::span<const AggregatedLabel> aggregated,
                                                          std::span<const std::int64_t> windows,
                                                          const TemporalSweepOptions& options = {});

struct InterarrivalStats {
  double median = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};
// Over all consecutive gaps of one session; zeros when there are none.
InterarrivalStats interarrival_stats(const MediaSession& session);

struct CcdfPoint {
  double value = 0.0;
  double fraction = 0.0;  // P[X >= value]
};

std::vector<CcdfPoint> ccdf(std::span<const double> values);

struct CategoryVoteDistribution {
  // fractions[k][c]: share of sessions with k votes that carry category c.
  std::vector<std::vector<double>> fractions;
  std::vector<std::size_t> sessions_per_k;
};

CategoryVoteDistribution category_vote_distribution(std::span<const MediaSession> sessions,
                                                    std::span<const AggregatedLabel> aggregated,
                                                    Question question);

struct ColabelFractions {
  std::string anchor;
  std::size_t n_anchor = 0;
  double exclusive = 0.0;
  std::map<std::string, double> with;  // other category -> share of anchor sessions
};

ColabelFractions colabel_fraction(std::span<const MediaSession> sessions, const std::string& anchor);

}  // namespace sessionscreen
