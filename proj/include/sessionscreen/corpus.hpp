#pragma once

#include "sessionscreen/textproc.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sessionscreen {

struct Comment {
  std::string author_id;
  std::string text;
  std::int64_t timestamp = 0;  // epoch seconds
};

struct OwnerMeta {
  std::int64_t followed_by = 0;
  std::int64_t follows = 0;
  std::int64_t shared_media = 0;
};

// Fixed image-category vocabulary. The order defines the image feature block.
inline constexpr std::array<std::string_view, 13> kCategories = {
    "person_people", "text", "sports", "tattoo",    "animal", "clothes", "car",
    "cartoon",       "drugs", "food",  "celebrity", "nature", "other"};

// Index into kCategories, or nullopt for an unknown name.
std::optional<std::size_t> category_index(std::string_view name);

struct MediaSession {
  std::string session_id;
  std::string owner_id;
  std::int64_t likes = 0;
  std::vector<Comment> comments;  // ascending timestamp
  OwnerMeta owner;
  std::set<std::string> image_categories;
};

struct LoadOptions {
  // Keep only the most recent comments of each session.
  std::optional<std::size_t> max_comments;
};

// JSON Lines, one session per line. Comments are sorted by timestamp
// (stable); duplicate session ids and unknown categories are rejected.
std::vector<MediaSession> load_corpus(const std::filesystem::path& path, const LoadOptions& options = {});
std::vector<MediaSession> parse_corpus(std::string_view jsonl, const LoadOptions& options = {});

// One JSON object per line, keys in schema order, sessions separated by '\n'.
std::string session_to_json_line(const MediaSession& session);
void write_corpus(const std::filesystem::path& path, std::span<const MediaSession> sessions);

// Fraction of non-owner comments containing at least one lexicon word.
// Throws NumericalError when there are no non-owner comments.
double negativity_ratio(const MediaSession& session, const Lexicon& lexicon);

struct SelectionCriteria {
  std::size_t min_comments = 15;
  double negativity_threshold = 0.40;  // strict lower bound
};

// Sessions with at least min_comments comments and a negativity ratio
// strictly above the threshold, in input order.
std::vector<MediaSession> select_sessions(std::span<const MediaSession> corpus, const Lexicon& lexicon,
                                          const SelectionCriteria& criteria = {});

}  // namespace sessionscreen
