#include "sessionscreen/corpus.hpp"

#include "sessionscreen/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace sessionscreen {
namespace {

using nlohmann::json;

const json& require(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(line, std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key, std::size_t line) {
  const auto& v = require(obj, key, line);
  if (!v.is_string()) throw ParseError(line, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::int64_t require_count(const json& obj, const char* key, std::size_t line) {
  const auto& v = require(obj, key, line);
  if (!v.is_number_integer()) throw ParseError(line, std::string("field '") + key + "' must be an integer");
  const auto n = v.get<std::int64_t>();
  if (n < 0) throw ParseError(line, std::string("field '") + key + "' must be non-negative");
  return n;
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; });
}

MediaSession parse_session(const json& obj, std::size_t line) {
  if (!obj.is_object()) throw ParseError(line, "record must be a JSON object");
  MediaSession s;
  s.session_id = require_string(obj, "session_id", line);
  s.owner_id = require_string(obj, "owner_id", line);
  s.likes = require_count(obj, "likes", line);

  const auto& owner = require(obj, "owner", line);
  if (!owner.is_object()) throw ParseError(line, "field 'owner' must be an object");
  s.owner.followed_by = require_count(owner, "followed_by", line);
  s.owner.follows = require_count(owner, "follows", line);
  s.owner.shared_media = require_count(owner, "shared_media", line);

  if (auto it = obj.find("image_categories"); it != obj.end()) {
    if (!it->is_array()) throw ParseError(line, "field 'image_categories' must be an array");
    for (const auto& c : *it) {
      if (!c.is_string()) throw ParseError(line, "image category must be a string");
      auto name = c.get<std::string>();
      if (!category_index(name)) {
        throw ValidationError("line " + std::to_string(line) + ": unknown image category '" + name + "'");
      }
      s.image_categories.insert(std::move(name));
    }
  }

  const auto& comments = require(obj, "comments", line);
  if (!comments.is_array()) throw ParseError(line, "field 'comments' must be an array");
  for (const auto& c : comments) {
    if (!c.is_object()) throw ParseError(line, "comment must be an object");
    Comment comment;
    comment.author_id = require_string(c, "author_id", line);
    comment.text = require_string(c, "text", line);
    comment.timestamp = require_count(c, "timestamp", line);
    if (blank(comment.text)) throw ParseError(line, "comment text is empty");
    s.comments.push_back(std::move(comment));
  }
  std::stable_sort(s.comments.begin(), s.comments.end(),
                   [](const Comment& a, const Comment& b) { return a.timestamp < b.timestamp; });
  return s;
}

}  // namespace

std::optional<std::size_t> category_index(std::string_view name) {
  for (std::size_t i = 0; i < kCategories.size(); ++i) {
    if (kCategories[i] == name) return i;
  }
  return std::nullopt;
}

std::vector<MediaSession> parse_corpus(std::string_view jsonl, const LoadOptions& options) {
  std::vector<MediaSession> sessions;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= jsonl.size()) {
    auto end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    const auto line = jsonl.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (blank(line)) continue;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    }
    auto session = parse_session(obj, line_no);
    if (!seen.insert(session.session_id).second) {
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate session_id '" + session.session_id + "'");
    }
    if (options.max_comments && session.comments.size() > *options.max_comments) {
      session.comments.erase(session.comments.begin(),
                             session.comments.end() - static_cast<std::ptrdiff_t>(*options.max_comments));
    }
    sessions.push_back(std::move(session));
  }
  return sessions;
}

std::vector<MediaSession> load_corpus(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str(), options);
}

std::string session_to_json_line(const MediaSession& s) {
  nlohmann::ordered_json obj;
  obj["session_id"] = s.session_id;
  obj["owner_id"] = s.owner_id;
  obj["likes"] = s.likes;
  obj["owner"] = {{"followed_by", s.owner.followed_by},
                  {"follows", s.owner.follows},
                  {"shared_media", s.owner.shared_media}};
  // Emitted in vocabulary order.
  auto cats = nlohmann::ordered_json::array();
  for (auto name : kCategories) {
    if (s.image_categories.contains(std::string(name))) cats.push_back(std::string(name));
  }
  obj["image_categories"] = std::move(cats);
  auto comments = nlohmann::ordered_json::array();
  for (const auto& c : s.comments) {
    nlohmann::ordered_json cj;
    cj["author_id"] = c.author_id;
    cj["text"] = c.text;
    cj["timestamp"] = c.timestamp;
    comments.push_back(std::move(cj));
  }
  obj["comments"] = std::move(comments);
  return obj.dump();
}

void write_corpus(const std::filesystem::path& path, std::span<const MediaSession> sessions) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write corpus file " + path.string());
  for (const auto& s : sessions) out << session_to_json_line(s) << '\n';
}

double negativity_ratio(const MediaSession& session, const Lexicon& lexicon) {
  std::size_t population = 0;
  std::size_t negative = 0;
  for (const auto& c : session.comments) {
    if (c.author_id == session.owner_id) continue;
    ++population;
    if (is_negative_comment(c.text, lexicon)) ++negative;
  }
  if (population == 0) {
    throw NumericalError("session '" + session.session_id + "' has no comments by users other than the owner");
  }
  return static_cast<double>(negative) / static_cast<double>(population);
}

std::vector<MediaSession> select_sessions(std::span<const MediaSession> corpus, const Lexicon& lexicon,
                                          const SelectionCriteria& criteria) {
  if (criteria.min_comments < 1) throw ConfigError("min_comments must be >= 1");
  if (!(criteria.negativity_threshold >= 0.0 && criteria.negativity_threshold <= 1.0)) {
    throw ConfigError("negativity threshold must lie in [0, 1]");
  }
  std::vector<MediaSession> selected;
  for (const auto& s : corpus) {
    if (s.comments.size() < criteria.min_comments) continue;
    const bool has_population =
        std::any_of(s.comments.begin(), s.comments.end(), [&](const Comment& c) { return c.author_id != s.owner_id; });
    if (!has_population) continue;
    if (negativity_ratio(s, lexicon) > criteria.negativity_threshold) selected.push_back(s);
  }
  return selected;
}

}  // namespace sessionscreen
