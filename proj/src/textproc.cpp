#include "sessionscreen/textproc.hpp"

#include "sessionscreen/corpus.hpp"
#include "sessionscreen/error.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace sessionscreen {
namespace {

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool keep_byte(unsigned char c) { return c >= 0x80 || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z'); }

unsigned char lower(unsigned char c) { return (c >= 'A' && c <= 'Z') ? static_cast<unsigned char>(c - 'A' + 'a') : c; }

// Lowercased, punctuation-stripped tokens, stop words kept.
std::vector<std::string> raw_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_space(c)) {
      flush();
      continue;
    }
    const unsigned char lc = lower(c);
    if (keep_byte(lc)) current.push_back(static_cast<char>(lc));
  }
  flush();
  return tokens;
}

const std::vector<std::string> kDefaultLexiconWords = {
    "ass",   "asshole", "bastard", "bitch",    "crap",   "cunt",  "damn",  "dick",  "douche",
    "dumb",  "fag",     "fat",     "freak",    "fuck",   "fucking", "hate", "hell", "idiot",
    "jerk",  "kill",    "loser",   "moron",    "piss",   "pathetic", "retard", "scum", "shit",
    "slut",  "stupid",  "suck",    "trash",    "ugly",   "whore", "wtf"};

const std::vector<std::string> kDefaultStopWords = {
    "a",  "an", "and", "are", "as",   "at",   "be",   "but",  "by",  "for",
    "from", "has", "have", "i", "in", "is",   "it",   "its",  "of",  "on",
    "or", "so", "that", "the", "this", "to", "was", "were", "with"};

}  // namespace

WordSet::WordSet(std::span<const std::string> words) {
  for (const auto& w : words) {
    auto tokens = raw_tokens(w);
    if (tokens.size() != 1) {
      throw ValidationError("word list entry '" + w + "' is not a single token");
    }
    words_.insert(std::move(tokens.front()));
  }
}

bool WordSet::contains(std::string_view token) const { return words_.contains(std::string(token)); }

std::vector<std::string> WordSet::sorted() const {
  std::vector<std::string> out(words_.begin(), words_.end());
  std::sort(out.begin(), out.end());
  return out;
}

Lexicon::Lexicon(std::span<const std::string> words) : WordSet(words) {
  if (empty()) throw ValidationError("lexicon is empty");
}

std::vector<std::string> read_word_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open word file " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    words.push_back(line.substr(first, last - first + 1));
  }
  return words;
}

Lexicon load_lexicon(const std::filesystem::path& path) { return Lexicon(read_word_file(path)); }

StopList load_stoplist(const std::filesystem::path& path) { return StopList(read_word_file(path)); }

const Lexicon& default_lexicon() {
  static const Lexicon lexicon(kDefaultLexiconWords);
  return lexicon;
}

const StopList& default_stoplist() {
  static const StopList stoplist(kDefaultStopWords);
  return stoplist;
}

std::vector<std::string> preprocess_tokenize(std::string_view text, const StopList& stoplist) {
  auto tokens = raw_tokens(text);
  std::erase_if(tokens, [&](const std::string& t) { return stoplist.contains(t); });
  return tokens;
}

bool is_negative_comment(std::string_view text, const Lexicon& lexicon) {
  const auto tokens = raw_tokens(text);
  return std::any_of(tokens.begin(), tokens.end(), [&](const std::string& t) { return lexicon.contains(t); });
}

GramCounts extract_ngrams(std::span<const std::string> tokens, int n) {
  if (n < 1) throw ValidationError("n-gram order must be >= 1");
  GramCounts counts;
  const auto order = static_cast<std::size_t>(n);
  if (tokens.size() < order) return counts;
  for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
    Gram gram = tokens[i];
    for (std::size_t j = 1; j < order; ++j) {
      gram += ' ';
      gram += tokens[i + j];
    }
    ++counts[gram];
  }
  return counts;
}

int gram_order(const Gram& gram) { return 1 + static_cast<int>(std::count(gram.begin(), gram.end(), ' ')); }

Vocabulary::Vocabulary(std::vector<Gram> grams, std::set<int> orders)
    : grams_(std::move(grams)), orders_(std::move(orders)) {
  for (std::size_t i = 0; i < grams_.size(); ++i) {
    if (i > 0 && !(grams_[i - 1] < grams_[i])) throw ValidationError("vocabulary grams must be sorted and unique");
    if (!orders_.contains(gram_order(grams_[i]))) {
      throw ValidationError("vocabulary gram '" + grams_[i] + "' has an order outside the vocabulary orders");
    }
    index_.emplace(grams_[i], static_cast<long long>(i));
  }
}

long long Vocabulary::index_of(const Gram& gram) const {
  auto it = index_.find(gram);
  return it == index_.end() ? -1 : it->second;
}

namespace {

void validate_orders(const std::set<int>& orders) {
  if (orders.empty()) throw ConfigError("n-gram orders must not be empty");
  for (int n : orders) {
    if (n < 1 || n > 3) throw ConfigError("n-gram order " + std::to_string(n) + " outside {1,2,3}");
  }
}

// All grams of the requested orders over a session's comments.
GramCounts session_grams(const MediaSession& session, const StopList& stoplist, const std::set<int>& orders) {
  GramCounts total;
  for (const auto& comment : session.comments) {
    const auto tokens = preprocess_tokenize(comment.text, stoplist);
    for (int n : orders) {
      for (const auto& [gram, count] : extract_ngrams(tokens, n)) total[gram] += count;
    }
  }
  return total;
}

}  // namespace

Vocabulary build_vocabulary(std::span<const MediaSession> sessions, const StopList& stoplist,
                            const std::set<int>& orders, int min_df) {
  if (sessions.empty()) throw ValidationError("cannot build a vocabulary from zero sessions");
  validate_orders(orders);
  std::map<Gram, int> df;
  for (const auto& session : sessions) {
    for (const auto& [gram, count] : session_grams(session, stoplist, orders)) ++df[gram];
  }
  std::vector<Gram> grams;
  for (const auto& [gram, count] : df) {
    if (count >= min_df) grams.push_back(gram);
  }
  if (grams.empty()) throw ValidationError("vocabulary is empty after min_df pruning");
  return Vocabulary(std::move(grams), orders);
}

SparseCounts vectorize_text(const MediaSession& session, const Vocabulary& vocab, const StopList& stoplist) {
  SparseCounts v(static_cast<Eigen::Index>(vocab.size()));
  // GramCounts iterates in gram order, which is index order.
  for (const auto& [gram, count] : session_grams(session, stoplist, vocab.orders())) {
    const long long j = vocab.index_of(gram);
    if (j >= 0) v.insert(static_cast<Eigen::Index>(j)) = count;
  }
  return v;
}

Eigen::SparseMatrix<double, Eigen::RowMajor> vectorize_corpus(std::span<const MediaSession> sessions,
                                                              const Vocabulary& vocab, const StopList& stoplist) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    const auto v = vectorize_text(sessions[i], vocab, stoplist);
    for (SparseCounts::InnerIterator it(v); it; ++it) {
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(it.index()), it.value());
    }
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> x(static_cast<Eigen::Index>(sessions.size()),
                                                 static_cast<Eigen::Index>(vocab.size()));
  x.setFromTriplets(triplets.begin(), triplets.end());
  return x;
}

}  // namespace sessionscreen
