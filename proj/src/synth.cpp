#include "sessionscreen/synth.hpp"

#include "sessionscreen/error.hpp"
#include "sessionscreen/rng.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace sessionscreen {
namespace {

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

constexpr std::string_view kNeutral =
    "photo picture pic beautiful nice cool awesome amazing lovely pretty cute great good wow "
    "love like happy smile sunny beach summer winter spring autumn weekend party friends family "
    "dinner lunch breakfast coffee tea pizza burger cake dessert sweet tasty yummy delicious food "
    "dog cat puppy kitten bird horse garden flower flowers tree trees park city street road trip "
    "travel vacation holiday mountain lake river ocean sea sky sunset sunrise cloud clouds rain "
    "snow hair dress shoes outfit style fashion makeup look looks looking face eyes selfie pose "
    "smiling laugh funny lol haha omg yes yeah okay thanks thank please welcome hello hey hi "
    "morning night evening tonight today tomorrow yesterday week month year time moment day "
    "game match team goal win score play player ball music song dance concert show movie film "
    "book read school class teacher homework study work office job home house room car bike "
    "train bus plane airport hotel birthday gift wedding baby kids girl boy guy guys man woman "
    "people everyone someone anyone together miss remember forever always never maybe really "
    "very much more most best better little big small tall new old young first last next same "
    "other another kayak canoe lantern meadow orchard pebble harbor glacier violin quilt";

constexpr std::string_view kHostile =
    "worthless disgusting pig gross nobody hideous creep weirdo failure clown joke coward "
    "liar fake leech parasite waste useless ignorant annoying lame sad crybaby nerd dork "
    "wimp pest rat snake witch troll psycho sicko lunatic maniac brat dimwit fool imbecile halfwit";

constexpr std::array<std::string_view, 6> kStopSprinkle = {"and", "or", "for", "the", "so", "is"};

double lognormal(Rng& rng, double median, double sigma) { return median * std::exp(rng.normal(0.0, sigma)); }

std::int64_t rounded(double v) { return static_cast<std::int64_t>(std::llround(std::max(0.0, v))); }

std::string decorate(Rng& rng, std::string token) {
  // Surface noise that preprocessing must undo.
  const double u = rng.uniform();
  if (u < 0.08) {
    std::transform(token.begin(), token.end(), token.begin(), [](unsigned char c) { return std::toupper(c); });
  } else if (u < 0.14) {
    token += "!!";
  } else if (u < 0.17) {
    token = "#" + token;
  }
  return token;
}

std::string make_comment(Rng& rng, const SynthConfig& cfg, bool owner, bool bullying) {
  std::vector<std::string> tokens;
  const auto length = rng.between(3, 9);
  const auto& neutral = neutral_tokens();
  for (long long t = 0; t < length; ++t) tokens.push_back(neutral[rng.index(neutral.size())]);
  auto insert = [&](std::string tok) {
    const auto pos = rng.index(tokens.size() + 1);
    tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(pos), std::move(tok));
  };
  if (rng.bernoulli(0.3)) insert(std::string(kStopSprinkle[rng.index(kStopSprinkle.size())]));
  if (!owner) {
    static const std::vector<std::string> profane = default_lexicon().sorted();
    if (rng.bernoulli(cfg.profanity_rate)) insert(profane[rng.index(profane.size())]);
    if (bullying && rng.bernoulli(cfg.lexical_signal_strength)) {
      const auto& hostile = hostile_tokens();
      const auto count = rng.between(1, 2);
      for (long long h = 0; h < count; ++h) insert(hostile[rng.index(hostile.size())]);
    }
  }
  std::string text;
  for (auto& tok : tokens) {
    if (!text.empty()) text += ' ';
    text += decorate(rng, std::move(tok));
  }
  return text;
}

std::set<std::string> make_categories(Rng& rng, const SynthConfig& cfg, bool bullying) {
  std::set<std::string> cats;
  auto other = [&] {
    // Anything except person_people, text and tattoo.
    static constexpr std::array<std::string_view, 10> rest = {"sports", "animal", "clothes", "car", "cartoon",
                                                              "drugs",  "food",   "celebrity", "nature", "other"};
    return std::string(rest[rng.index(rest.size())]);
  };
  if (!bullying && rng.bernoulli(cfg.category_skew)) cats.insert("tattoo");
  if (rng.bernoulli(bullying ? 0.7 : 0.45)) {
    cats.insert("person_people");
    if (rng.bernoulli(0.15)) cats.insert("text");
  }
  if (cats.empty() || rng.bernoulli(0.2)) cats.insert(rng.bernoulli(0.2) ? std::string("text") : other());
  return cats;
}

}  // namespace

const std::vector<std::string>& neutral_tokens() {
  static const std::vector<std::string> words = split_words(kNeutral);
  return words;
}

const std::vector<std::string>& hostile_tokens() {
  static const std::vector<std::string> words = split_words(kHostile);
  return words;
}

void SynthConfig::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
  };
  if (n_sessions < 1) throw ConfigError("n_sessions must be >= 1");
  if (min_comments < 1 || max_comments < min_comments) {
    throw ConfigError("comments per session range must satisfy 1 <= min <= max");
  }
  prob(bullying_fraction, "bullying_fraction");
  prob(profanity_rate, "profanity_rate");
  prob(owner_comment_rate, "owner_comment_rate");
  prob(lexical_signal_strength, "lexical_signal_strength");
  prob(category_skew, "category_skew");
  prob(label_noise, "label_noise");
  prob(aggression_only_rate, "aggression_only_rate");
  if (labelers_per_session < 1 || labeler_pool < labelers_per_session) {
    throw ConfigError("need 1 <= labelers_per_session <= labeler_pool");
  }
  if (!(trust_min > 0.0 && trust_min <= trust_max && trust_max <= 1.0)) {
    throw ConfigError("trust range must satisfy 0 < trust_min <= trust_max <= 1");
  }
  if (!std::isfinite(meta_signal) || !std::isfinite(burst_signal)) throw ConfigError("signals must be finite");
}

SynthCorpus generate_corpus(const SynthConfig& cfg) {
  cfg.validate();
  Rng master(cfg.seed);
  const auto n = static_cast<std::size_t>(cfg.n_sessions);
  const auto n_bullying = static_cast<std::size_t>(std::llround(cfg.bullying_fraction * static_cast<double>(n)));
  SynthCorpus out;
  out.true_classes.assign(n, -1);
  std::fill_n(out.true_classes.begin(), n_bullying, 1);
  master.shuffle(out.true_classes);

  char id[32];
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(master.next());
    const bool bullying = out.true_classes[i] == 1;
    MediaSession s;
    std::snprintf(id, sizeof id, "s%05zu", i);
    s.session_id = id;
    std::snprintf(id, sizeof id, "u%05zu", i);
    s.owner_id = id;

    s.owner.followed_by = rounded(lognormal(rng, 400.0, 1.0) * std::exp(bullying ? cfg.meta_signal : 0.0));
    s.owner.follows = rounded(lognormal(rng, 300.0, 1.0));
    s.owner.shared_media = rounded(lognormal(rng, 200.0, 0.8));
    s.likes = rounded(lognormal(rng, 50.0, 0.9));
    s.image_categories = make_categories(rng, cfg, bullying);

    const auto n_comments = static_cast<std::size_t>(rng.between(cfg.min_comments, cfg.max_comments));
    const double mean_gap = lognormal(rng, 5400.0, 0.6) * std::exp(bullying ? -cfg.burst_signal : 0.0);
    std::int64_t t = 1'400'000'000 + static_cast<std::int64_t>(rng.index(30'000'000));
    for (std::size_t c = 0; c < n_comments; ++c) {
      if (c > 0) t += rounded(rng.exponential(mean_gap));
      // The first comment is never the owner's, so every session has a
      // negativity population.
      const bool owner = c > 0 && rng.bernoulli(cfg.owner_comment_rate);
      Comment comment;
      comment.author_id = owner ? s.owner_id : "c" + std::to_string(rng.index(2000));
      comment.text = make_comment(rng, cfg, owner, bullying);
      comment.timestamp = t;
      s.comments.push_back(std::move(comment));
    }
    out.sessions.push_back(std::move(s));
  }
  return out;
}

std::vector<LabelRecord> generate_labels(const std::vector<MediaSession>& sessions,
                                         const std::vector<int>& true_classes, const SynthConfig& cfg) {
  cfg.validate();
  if (sessions.size() != true_classes.size()) throw ValidationError("sessions and true classes differ in length");
  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::string> workers;
  std::vector<double> trust;
  char id[32];
  for (int w = 0; w < cfg.labeler_pool; ++w) {
    std::snprintf(id, sizeof id, "w%03d", w);
    workers.emplace_back(id);
    trust.push_back(std::round(rng.uniform(cfg.trust_min, cfg.trust_max) * 1000.0) / 1000.0);
  }
  std::vector<LabelRecord> out;
  std::vector<std::size_t> pool(workers.size());
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    for (std::size_t w = 0; w < pool.size(); ++w) pool[w] = w;
    for (int p = 0; p < cfg.labelers_per_session; ++p) {
      const auto pick = static_cast<std::size_t>(p) + rng.index(pool.size() - static_cast<std::size_t>(p));
      std::swap(pool[static_cast<std::size_t>(p)], pool[pick]);
    }
    for (int p = 0; p < cfg.labelers_per_session; ++p) {
      const auto w = pool[static_cast<std::size_t>(p)];
      LabelRecord r;
      r.session_id = sessions[i].session_id;
      r.labeler_id = workers[w];
      r.trust = std::max(trust[w], 0.001);
      r.bullying_vote = (true_classes[i] == 1) != rng.bernoulli(cfg.label_noise);
      r.aggression_vote = r.bullying_vote || rng.bernoulli(cfg.aggression_only_rate);
      out.push_back(std::move(r));
    }
  }
  return out;
}

SynthConfig parse_synth_config(const std::string& json_text) {
  SynthConfig c;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("synth config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("synth config must be a JSON object");
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    get("n_sessions", c.n_sessions);
    get("min_comments", c.min_comments);
    get("max_comments", c.max_comments);
    get("seed", c.seed);
    get("bullying_fraction", c.bullying_fraction);
    get("profanity_rate", c.profanity_rate);
    get("owner_comment_rate", c.owner_comment_rate);
    get("lexical_signal_strength", c.lexical_signal_strength);
    get("meta_signal", c.meta_signal);
    get("burst_signal", c.burst_signal);
    get("category_skew", c.category_skew);
    get("labelers_per_session", c.labelers_per_session);
    get("labeler_pool", c.labeler_pool);
    get("trust_min", c.trust_min);
    get("trust_max", c.trust_max);
    get("label_noise", c.label_noise);
    get("aggression_only_rate", c.aggression_only_rate);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("synth config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string synth_config_to_json(const SynthConfig& c) {
  nlohmann::ordered_json j;
  j["n_sessions"] = c.n_sessions;
  j["min_comments"] = c.min_comments;
  j["max_comments"] = c.max_comments;
  j["seed"] = c.seed;
  j["bullying_fraction"] = c.bullying_fraction;
  j["profanity_rate"] = c.profanity_rate;
  j["owner_comment_rate"] = c.owner_comment_rate;
  j["lexical_signal_strength"] = c.lexical_signal_strength;
  j["meta_signal"] = c.meta_signal;
  j["burst_signal"] = c.burst_signal;
  j["category_skew"] = c.category_skew;
  j["labelers_per_session"] = c.labelers_per_session;
  j["labeler_pool"] = c.labeler_pool;
  j["trust_min"] = c.trust_min;
  j["trust_max"] = c.trust_max;
  j["label_noise"] = c.label_noise;
  j["aggression_only_rate"] = c.aggression_only_rate;
  return j.dump(2);
}

}  // namespace sessionscreen
