#include "sessionscreen/labels.hpp"

#include "sessionscreen/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

namespace sessionscreen {
namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
    fields.emplace_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_vote(const std::string& s, std::size_t line, const char* name) {
  if (s == "1") return true;
  if (s == "0") return false;
  throw ParseError(line, std::string(name) + " must be 0 or 1, got '" + s + "'");
}

double parse_trust(const std::string& s, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError(line, "trust '" + s + "' is not a number");
  if (!std::isfinite(v) || v <= 0.0 || v > 1.0) {
    throw ValidationError("line " + std::to_string(line) + ": trust " + s + " outside (0, 1]");
  }
  return v;
}

int votes(std::span<const LabelRecord> records, Question q) {
  int n = 0;
  for (const auto& r : records) n += (q == Question::bullying ? r.bullying_vote : r.aggression_vote) ? 1 : 0;
  return n;
}

// Records grouped by session id, sorted by id. Every group must be the same size.
std::vector<std::vector<LabelRecord>> uniform_groups(std::span<const LabelRecord> records) {
  std::map<std::string, std::vector<LabelRecord>> by_session;
  for (const auto& r : records) by_session[r.session_id].push_back(r);
  if (by_session.empty()) throw ValidationError("no label records");
  const auto expected = by_session.begin()->second.size();
  std::vector<std::vector<LabelRecord>> groups;
  for (auto& [id, group] : by_session) {
    if (group.size() != expected) {
      throw ValidationError("session '" + id + "' has " + std::to_string(group.size()) + " labels, expected " +
                            std::to_string(expected));
    }
    groups.push_back(std::move(group));
  }
  return groups;
}

}  // namespace

LabelSet parse_labels(std::string_view csv) {
  LabelSet out;
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    auto end = csv.find('\n', pos);
    if (end == std::string_view::npos) end = csv.size();
    auto line = csv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    auto fields = split_csv_line(line);
    if (!header_seen) {
      const std::vector<std::string> header = {"session_id", "labeler_id", "trust", "aggression_vote", "bullying_vote"};
      if (fields != header) {
        throw ParseError(line_no, "expected header session_id,labeler_id,trust,aggression_vote,bullying_vote");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 5) throw ParseError(line_no, "expected 5 fields, got " + std::to_string(fields.size()));
    LabelRecord r;
    r.session_id = fields[0];
    r.labeler_id = fields[1];
    if (r.session_id.empty() || r.labeler_id.empty()) throw ParseError(line_no, "empty session_id or labeler_id");
    r.trust = parse_trust(fields[2], line_no);
    r.aggression_vote = parse_vote(fields[3], line_no, "aggression_vote");
    r.bullying_vote = parse_vote(fields[4], line_no, "bullying_vote");
    if (!seen.emplace(r.labeler_id, r.session_id).second) {
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate label by '" + r.labeler_id +
                            "' for session '" + r.session_id + "'");
    }
    if (r.bullying_vote && !r.aggression_vote) {
      out.warnings.push_back("line " + std::to_string(line_no) + ": labeler '" + r.labeler_id +
                             "' voted bullying without aggression on session '" + r.session_id + "'");
    }
    out.records.push_back(std::move(r));
  }
  if (!header_seen) throw ParseError(0, "label file is empty");
  return out;
}

LabelSet load_labels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open label file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_labels(buf.str());
}

std::string labels_to_csv(std::span<const LabelRecord> records) {
  std::ostringstream out;
  out << "session_id,labeler_id,trust,aggression_vote,bullying_vote\n";
  for (const auto& r : records) {
    char trust[32];
    auto res = std::to_chars(trust, trust + sizeof trust, r.trust);
    out << r.session_id << ',' << r.labeler_id << ',' << std::string_view(trust, res.ptr - trust) << ','
        << (r.aggression_vote ? 1 : 0) << ',' << (r.bullying_vote ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string_view to_string(FinalClass c) {
  switch (c) {
    case FinalClass::bullying:
      return "bullying";
    case FinalClass::not_bullying:
      return "not_bullying";
    case FinalClass::low_confidence:
      return "low_confidence";
  }
  return "low_confidence";
}

FinalClass final_class_from_string(std::string_view s) {
  if (s == "bullying") return FinalClass::bullying;
  if (s == "not_bullying") return FinalClass::not_bullying;
  if (s == "low_confidence") return FinalClass::low_confidence;
  throw ParseError(0, "unknown final class '" + std::string(s) + "'");
}

AggregatedLabel aggregate_session(std::span<const LabelRecord> records, double confidence_threshold) {
  if (records.empty()) throw ValidationError("cannot aggregate an empty record list");
  AggregatedLabel a;
  a.session_id = records.front().session_id;
  double total = 0.0, bullying = 0.0, aggression = 0.0;
  for (const auto& r : records) {
    if (r.session_id != a.session_id) throw ValidationError("records span several sessions");
    total += r.trust;
    if (r.bullying_vote) bullying += r.trust;
    if (r.aggression_vote) aggression += r.trust;
  }
  a.n_labels = static_cast<int>(records.size());
  a.bullying_votes = votes(records, Question::bullying);
  a.aggression_votes = votes(records, Question::aggression);
  a.bullying_confidence = bullying / total;
  a.aggression_confidence = aggression / total;
  // Computed from its own sum rather than 1 - confidence.
  const double not_bullying = (total - bullying) / total;
  if (a.bullying_confidence + kConfidenceSlack >= confidence_threshold) {
    a.final_class = FinalClass::bullying;
  } else if (not_bullying + kConfidenceSlack >= confidence_threshold) {
    a.final_class = FinalClass::not_bullying;
  } else {
    a.final_class = FinalClass::low_confidence;
  }
  return a;
}

std::vector<AggregatedLabel> aggregate_all(std::span<const LabelRecord> records, double confidence_threshold) {
  std::map<std::string, std::vector<LabelRecord>> by_session;
  for (const auto& r : records) by_session[r.session_id].push_back(r);
  std::vector<AggregatedLabel> out;
  out.reserve(by_session.size());
  for (const auto& [id, group] : by_session) out.push_back(aggregate_session(group, confidence_threshold));
  return out;
}

std::string aggregated_to_csv(std::span<const AggregatedLabel> labels) {
  std::ostringstream out;
  out << "session_id,n_labels,bullying_votes,aggression_votes,bullying_confidence,final_class\n";
  for (const auto& a : labels) {
    char conf[32];
    auto res = std::to_chars(conf, conf + sizeof conf, a.bullying_confidence);
    out << a.session_id << ',' << a.n_labels << ',' << a.bullying_votes << ',' << a.aggression_votes << ','
        << std::string_view(conf, res.ptr - conf) << ',' << to_string(a.final_class) << '\n';
  }
  return out.str();
}

std::vector<double> vote_distribution(std::span<const LabelRecord> records, Question question) {
  const auto groups = uniform_groups(records);
  const auto labels = groups.front().size();
  std::vector<double> bins(labels + 1, 0.0);
  for (const auto& g : groups) bins[static_cast<std::size_t>(votes(g, question))] += 1.0;
  for (auto& b : bins) b /= static_cast<double>(groups.size());
  return bins;
}

VoteHeatmap vote_heatmap(std::span<const LabelRecord> records) {
  const auto groups = uniform_groups(records);
  const auto labels = groups.front().size();
  VoteHeatmap h;
  h.cells.assign(labels + 1, std::vector<double>(labels + 1, 0.0));
  std::vector<std::vector<std::size_t>> counts(labels + 1, std::vector<std::size_t>(labels + 1, 0));
  for (const auto& g : groups) {
    ++counts[static_cast<std::size_t>(votes(g, Question::aggression))][static_cast<std::size_t>(votes(g, Question::bullying))];
  }
  const double n = static_cast<double>(groups.size());
  std::size_t below = 0;
  for (std::size_t a = 0; a <= labels; ++a) {
    for (std::size_t b = 0; b <= labels; ++b) {
      h.cells[a][b] = static_cast<double>(counts[a][b]) / n;
      if (b > a) below += counts[a][b];
    }
  }
  h.below_diagonal_mass = static_cast<double>(below) / n;
  return h;
}

}  // namespace sessionscreen
