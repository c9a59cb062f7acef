#pragma once

#include "sessionscreen/corpus.hpp"
#include "sessionscreen/labels.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sessionscreen {

struct SynthConfig {
  int n_sessions = 400;
  int min_comments = 15;
  int max_comments = 60;
  std::uint64_t seed = 1;
  double bullying_fraction = 0.52;

  // Probability that a non-owner comment carries a lexicon word; same for
  // both classes so the negativity gate does not reveal the class.
  double profanity_rate = 0.75;
  double owner_comment_rate = 0.1;

  // Probability that a non-owner comment of a bullying session carries a
  // token from the hostile pool.
  double lexical_signal_strength = 0.5;
  // Shift of log(followed_by) for bullying sessions.
  double meta_signal = 1.0;
  // Shift of the log mean interarrival gap for bullying sessions (negative
  // means denser bursts).
  double burst_signal = 1.5;
  // Probability that a non-bullying session gets the tattoo category.
  double category_skew = 0.35;

  int labelers_per_session = 5;
  int labeler_pool = 25;
  double trust_min = 0.6;
  double trust_max = 1.0;
  double label_noise = 0.1;
  // Per worker, chance of an aggression vote without a bullying vote.
  double aggression_only_rate = 0.3;

  // Throws ConfigError for infeasible settings.
  void validate() const;
};

SynthConfig parse_synth_config(const std::string& json_text);
std::string synth_config_to_json(const SynthConfig& config);

struct SynthCorpus {
  std::vector<MediaSession> sessions;
  std::vector<int> true_classes;  // +1 bullying, -1 not
};

SynthCorpus generate_corpus(const SynthConfig& config);

// labelers_per_session distinct workers per session. Each worker flips the
// true class with probability label_noise; an aggression vote accompanies
// every bullying vote.
std::vector<LabelRecord> generate_labels(const std::vector<MediaSession>& sessions,
                                         const std::vector<int>& true_classes, const SynthConfig& config);

// Token pools used by the generator.
const std::vector<std::string>& neutral_tokens();
const std::vector<std::string>& hostile_tokens();

}  // namespace sessionscreen
