#include "sessionscreen/analysis.hpp"

#include "sessionscreen/error.hpp"
#include "sessionscreen/features.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace sessionscreen {

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("pearson: inputs differ in length");
  if (x.size() < 2) throw ValidationError("pearson: need at least 2 observations");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) throw NumericalError("pearson: correlation undefined for constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

const Correlation& CorrelationReport::at(const std::string& feature, Question question) const {
  for (const auto& c : pairs) {
    if (c.feature == feature && c.question == question) return c;
  }
  throw ValidationError("no correlation for feature '" + feature + "'");
}

std::vector<JoinedSession> join_labels(std::span<const MediaSession> sessions,
                                       std::span<const AggregatedLabel> aggregated) {
  std::unordered_map<std::string, const AggregatedLabel*> by_id;
  for (const auto& a : aggregated) by_id.emplace(a.session_id, &a);
  std::vector<JoinedSession> out;
  std::vector<std::string> missing;
  for (const auto& s : sessions) {
    auto it = by_id.find(s.session_id);
    if (it == by_id.end()) {
      missing.push_back(s.session_id);
    } else {
      out.push_back({&s, it->second});
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) list += (i ? ", " : "") + missing[i];
    if (missing.size() > 10) list += ", ...";
    throw ValidationError(std::to_string(missing.size()) + " sessions have no aggregated label: " + list);
  }
  return out;
}

namespace {

int vote_count(const AggregatedLabel& a, Question q) {
  return q == Question::bullying ? a.bullying_votes : a.aggression_votes;
}

}  // namespace

CorrelationReport correlation_table(std::span<const MediaSession> sessions,
                                    std::span<const AggregatedLabel> aggregated) {
  const auto joined = join_labels(sessions, aggregated);
  struct Column {
    const char* name;
    double (*get)(const MediaSession&);
  };
  static constexpr Column columns[] = {
      {"likes", [](const MediaSession& s) { return static_cast<double>(s.likes); }},
      {"shared_media", [](const MediaSession& s) { return static_cast<double>(s.owner.shared_media); }},
      {"followed_by", [](const MediaSession& s) { return static_cast<double>(s.owner.followed_by); }},
      {"follows", [](const MediaSession& s) { return static_cast<double>(s.owner.follows); }},
  };
  CorrelationReport report;
  for (Question q : {Question::bullying, Question::aggression}) {
    std::vector<double> votes;
    for (const auto& j : joined) votes.push_back(vote_count(*j.label, q));
    for (const auto& col : columns) {
      std::vector<double> values;
      for (const auto& j : joined) values.push_back(col.get(*j.session));
      report.pairs.push_back({col.name, q, pearson(values, votes), joined.size()});
    }
  }
  return report;
}

std::vector<WindowCorrelation> temporal_correlation_sweep(std::span<const MediaSession> sessions,
                                                          std::span<const AggregatedLabel> aggregated,
                                                          std::span<const std::int64_t> windows,
                                                          const TemporalSweepOptions& options) {
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (windows[i] <= 0 || (i > 0 && windows[i] <= windows[i - 1])) {
      throw ValidationError("windows must be positive and strictly ascending");
    }
  }
  const auto joined = join_labels(sessions, aggregated);
  std::vector<double> target;
  for (const auto& j : joined) {
    target.push_back(options.binary_label ? (j.label->final_class == FinalClass::bullying ? 1.0 : 0.0)
                                          : static_cast<double>(j.label->bullying_votes));
  }
  std::vector<WindowCorrelation> out;
  for (auto w : windows) {
    std::vector<double> bursts;
    for (const auto& j : joined) bursts.push_back(temporal_burst_count(*j.session, w));
    out.push_back({w, pearson(bursts, target)});
  }
  return out;
}

InterarrivalStats interarrival_stats(const MediaSession& session) {
  std::vector<double> gaps;
  for (std::size_t i = 1; i < session.comments.size(); ++i) {
    gaps.push_back(static_cast<double>(session.comments[i].timestamp - session.comments[i - 1].timestamp));
  }
  InterarrivalStats st;
  if (gaps.empty()) return st;
  double sum = 0.0;
  for (double g : gaps) sum += g;
  st.mean = sum / static_cast<double>(gaps.size());
  double ss = 0.0;
  for (double g : gaps) ss += (g - st.mean) * (g - st.mean);
  st.variance = ss / static_cast<double>(gaps.size());
  std::sort(gaps.begin(), gaps.end());
  const auto mid = gaps.size() / 2;
  st.median = gaps.size() % 2 ? gaps[mid] : 0.5 * (gaps[mid - 1] + gaps[mid]);
  return st;
}

std::vector<CcdfPoint> ccdf(std::span<const double> values) {
  if (values.empty()) throw ValidationError("ccdf of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<CcdfPoint> out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0 && sorted[i] == sorted[i - 1]) continue;
    out.push_back({sorted[i], static_cast<double>(sorted.size() - i) / n});
  }
  return out;
}

CategoryVoteDistribution category_vote_distribution(std::span<const MediaSession> sessions,
                                                    std::span<const AggregatedLabel> aggregated,
                                                    Question question) {
  const auto joined = join_labels(sessions, aggregated);
  int max_votes = 0;
  for (const auto& j : joined) max_votes = std::max(max_votes, j.label->n_labels);
  CategoryVoteDistribution dist;
  dist.fractions.assign(static_cast<std::size_t>(max_votes) + 1, std::vector<double>(kCategories.size(), 0.0));
  dist.sessions_per_k.assign(static_cast<std::size_t>(max_votes) + 1, 0);
  for (const auto& j : joined) {
    const auto k = static_cast<std::size_t>(vote_count(*j.label, question));
    ++dist.sessions_per_k[k];
    for (const auto& name : j.session->image_categories) {
      if (auto idx = category_index(name)) dist.fractions[k][*idx] += 1.0;
    }
  }
  for (std::size_t k = 0; k < dist.fractions.size(); ++k) {
    if (dist.sessions_per_k[k] == 0) continue;
    for (auto& f : dist.fractions[k]) f /= static_cast<double>(dist.sessions_per_k[k]);
  }
  return dist;
}

ColabelFractions colabel_fraction(std::span<const MediaSession> sessions, const std::string& anchor) {
  if (!category_index(anchor)) throw ValidationError("unknown category '" + anchor + "'");
  ColabelFractions out;
  out.anchor = anchor;
  std::size_t exclusive = 0;
  std::map<std::string, std::size_t> counts;
  for (const auto& s : sessions) {
    if (!s.image_categories.contains(anchor)) continue;
    ++out.n_anchor;
    if (s.image_categories.size() == 1) ++exclusive;
    for (const auto& c : s.image_categories) {
      if (c != anchor) ++counts[c];
    }
  }
  if (out.n_anchor == 0) throw ValidationError("no session carries category '" + anchor + "'");
  const double n = static_cast<double>(out.n_anchor);
  out.exclusive = static_cast<double>(exclusive) / n;
  for (auto name : kCategories) {
    if (name == anchor) continue;
    auto it = counts.find(std::string(name));
    out.with[std::string(name)] = it == counts.end() ? 0.0 : static_cast<double>(it->second) / n;
  }
  return out;
}

}  // namespace sessionscreen
