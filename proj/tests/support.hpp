#pragma once

#include "sessionscreen/corpus.hpp"
#include "sessionscreen/labels.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

inline sessionscreen::MediaSession make_session(const std::string& id, const std::vector<std::string>& texts,
                                                std::int64_t gap = 60) {
  sessionscreen::MediaSession s;
  s.session_id = id;
  s.owner_id = "owner_" + id;
  std::int64_t t = 1000;
  int author = 0;
  for (const auto& text : texts) {
    s.comments.push_back({"user" + std::to_string(author++), text, t});
    t += gap;
  }
  return s;
}

inline sessionscreen::LabelRecord vote(const std::string& session, const std::string& worker, double trust,
                                       bool aggression, bool bullying) {
  return {session, worker, trust, aggression, bullying};
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("sessionscreen_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing_support
