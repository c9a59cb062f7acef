#include "sessionscreen/features.hpp"

#include "sessionscreen/error.hpp"

namespace sessionscreen {

int temporal_burst_count(const MediaSession& session, std::int64_t window_seconds) {
  int bursts = 0;
  for (std::size_t i = 1; i < session.comments.size(); ++i) {
    if (session.comments[i].timestamp - session.comments[i - 1].timestamp < window_seconds) ++bursts;
  }
  return bursts;
}

Eigen::VectorXd meta_features(const MediaSession& session, std::int64_t window_seconds) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(kMetaFeatureNames.size()));
  v << static_cast<double>(session.owner.followed_by), static_cast<double>(session.owner.follows),
      static_cast<double>(session.likes), static_cast<double>(session.owner.shared_media),
      static_cast<double>(session.comments.size()), static_cast<double>(temporal_burst_count(session, window_seconds));
  return v;
}

Eigen::VectorXd image_category_vector(const MediaSession& session) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(kCategories.size()));
  for (const auto& name : session.image_categories) {
    auto idx = category_index(name);
    if (!idx) throw ValidationError("session '" + session.session_id + "': unknown image category '" + name + "'");
    v[static_cast<Eigen::Index>(*idx)] = 1.0;
  }
  return v;
}

Eigen::VectorXd FeatureVector::densify() const {
  Eigen::VectorXd out(text_block.size() + dense_block.size() + image_block.size());
  out.head(text_block.size()) = Eigen::VectorXd(text_block);
  out.segment(text_block.size(), dense_block.size()) = dense_block;
  out.tail(image_block.size()) = image_block;
  return out;
}

FeatureVector assemble_features(const MediaSession& session, const Vocabulary* vocab, const StopList& stoplist,
                                FeatureBlocks blocks, std::int64_t window_seconds) {
  FeatureVector f;
  if (blocks.text) {
    if (vocab == nullptr) throw ConfigError("text features requested without a vocabulary");
    f.text_block = vectorize_text(session, *vocab, stoplist);
  }
  if (blocks.meta) f.dense_block = meta_features(session, window_seconds);
  if (blocks.image) f.image_block = image_category_vector(session);
  return f;
}

Eigen::MatrixXd dense_feature_matrix(std::span<const MediaSession> sessions, bool include_image,
                                     std::int64_t window_seconds) {
  const auto meta = static_cast<Eigen::Index>(kMetaFeatureNames.size());
  const auto width = meta + (include_image ? static_cast<Eigen::Index>(kCategories.size()) : 0);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(sessions.size()), width);
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    x.row(r).head(meta) = meta_features(sessions[i], window_seconds).transpose();
    if (include_image) x.row(r).tail(width - meta) = image_category_vector(sessions[i]).transpose();
  }
  return x;
}

}  // namespace sessionscreen
