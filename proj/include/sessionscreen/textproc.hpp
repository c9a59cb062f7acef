#pragma once

#include <Eigen/SparseCore>

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace sessionscreen {

struct MediaSession;

// A set of lowercase single-token words. Backs both the profanity lexicon
// and the stop list.
class WordSet {
 public:
  WordSet() = default;
  // Entries are lowercased; entries that do not reduce to exactly one token
  // are rejected.
  explicit WordSet(std::span<const std::string> words);

  bool contains(std::string_view token) const;
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  std::vector<std::string> sorted() const;

 private:
  std::unordered_set<std::string> words_;
};

// Negative-word dictionary used to tag comments. Never empty.
class Lexicon : public WordSet {
 public:
  explicit Lexicon(std::span<const std::string> words);
};

class StopList : public WordSet {
 public:
  StopList() = default;
  explicit StopList(std::span<const std::string> words) : WordSet(words) {}
};

// One word per line, '#' starts a comment, blank lines ignored.
std::vector<std::string> read_word_file(const std::filesystem::path& path);
Lexicon load_lexicon(const std::filesystem::path& path);
StopList load_stoplist(const std::filesystem::path& path);

// Bundled defaults, identical to data/lexicon_default.txt and
// data/stoplist_default.txt.
const Lexicon& default_lexicon();
const StopList& default_stoplist();

// Lowercase, split on whitespace, strip ASCII punctuation and symbols from
// every token, then drop empty and stop-listed tokens. Bytes >= 0x80 are
// kept so UTF-8 letters survive.
std::vector<std::string> preprocess_tokenize(std::string_view text, const StopList& stoplist);

// True iff any unigram of the text (stop words kept) is in the lexicon.
bool is_negative_comment(std::string_view text, const Lexicon& lexicon);

// An n-gram is its tokens joined by single spaces. Tokens never contain a
// space and every token byte sorts above it, so string order on grams is
// lexicographic order on the token tuples.
using Gram = std::string;
using GramCounts = std::map<Gram, int>;

GramCounts extract_ngrams(std::span<const std::string> tokens, int n);

using SparseCounts = Eigen::SparseVector<double>;

class Vocabulary {
 public:
  Vocabulary() = default;
  // grams must be sorted and unique; each gram's order must be in orders.
  Vocabulary(std::vector<Gram> grams, std::set<int> orders);

  std::size_t size() const { return grams_.size(); }
  const std::set<int>& orders() const { return orders_; }
  const std::vector<Gram>& grams() const { return grams_; }
  // -1 when absent.
  long long index_of(const Gram& gram) const;

 private:
  std::vector<Gram> grams_;
  std::map<Gram, long long> index_;
  std::set<int> orders_;
};

// Number of tokens in a gram.
int gram_order(const Gram& gram);

// Vocabulary over every comment of every session. Grams occurring in fewer
// than min_df sessions are dropped; indices follow lexicographic gram order.
Vocabulary build_vocabulary(std::span<const MediaSession> sessions, const StopList& stoplist,
                            const std::set<int>& orders, int min_df = 2);

// Entry j is the total count of gram j over the session's comments.
SparseCounts vectorize_text(const MediaSession& session, const Vocabulary& vocab,
                            const StopList& stoplist);

// Rows are vectorize_text of each session.
Eigen::SparseMatrix<double, Eigen::RowMajor> vectorize_corpus(std::span<const MediaSession> sessions,
                                                              const Vocabulary& vocab,
                                                              const StopList& stoplist);

}  // namespace sessionscreen
