#pragma once

#include "sessionscreen/corpus.hpp"
#include "sessionscreen/textproc.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace sessionscreen {

inline constexpr std::int64_t kBurstWindowSeconds = 3600;

inline constexpr std::array<std::string_view, 6> kMetaFeatureNames = {
    "followed_by", "follows", "likes", "shared_media", "n_comments", "burst_count"};

// Consecutive interarrival gaps strictly shorter than the window, over all
// comments regardless of author.
int temporal_burst_count(const MediaSession& session, std::int64_t window_seconds = kBurstWindowSeconds);

// [followed_by, follows, likes, shared_media, n_comments, burst_count]
Eigen::VectorXd meta_features(const MediaSession& session, std::int64_t window_seconds = kBurstWindowSeconds);

// 0/1 indicator over kCategories. Unknown names throw ValidationError.
Eigen::VectorXd image_category_vector(const MediaSession& session);

struct FeatureBlocks {
  bool text = false;
  bool meta = false;
  bool image = false;
};

struct FeatureVector {
  SparseCounts text_block;        // size 0 when absent
  Eigen::VectorXd dense_block;    // size 0 or 6
  Eigen::VectorXd image_block;    // size 0 or kCategories.size()

  // text | meta | image
  Eigen::VectorXd densify() const;
};

// vocab and stoplist are only consulted for the text block.
FeatureVector assemble_features(const MediaSession& session, const Vocabulary* vocab, const StopList& stoplist,
                                FeatureBlocks blocks, std::int64_t window_seconds = kBurstWindowSeconds);

// Rows of meta (and optionally image) features for each session.
Eigen::MatrixXd dense_feature_matrix(std::span<const MediaSession> sessions, bool include_image,
                                     std::int64_t window_seconds = kBurstWindowSeconds);

}  // namespace sessionscreen
