#ifndef LSCD_CORPUS_H_
#define LSCD_CORPUS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lscd {

// Inclusive range of publication years.
struct YearRange {
  int first = 0;
  int last = 0;

  bool contains(int year) const { return year >= first && year <= last; }
  bool operator==(const YearRange &) const = default;
};

// Parses "1750-1799" or "1750:1799". Throws ParameterError.
YearRange parse_year_range(std::string_view text);

struct Sentence {
  int year = 0;
  std::vector<std::string> tokens;

  bool operator==(const Sentence &) const = default;
};

// Time-stamped tokenized sentences of one period. Immutable after
// construction; the constructor enforces that every sentence is non-empty and
// lies inside the declared year range.
class TokenizedCorpus {
 public:
  TokenizedCorpus() = default;
  TokenizedCorpus(std::string period_label, YearRange year_range,
                  std::vector<Sentence> sentences);

  const std::string &period_label() const { return period_label_; }
  const YearRange &year_range() const { return year_range_; }
  const std::vector<Sentence> &sentences() const { return sentences_; }
  uint64_t token_total() const { return token_total_; }
  bool empty() const { return sentences_.empty(); }

  bool operator==(const TokenizedCorpus &) const = default;

 private:
  std::string period_label_;
  YearRange year_range_;
  std::vector<Sentence> sentences_;
  uint64_t token_total_ = 0;
};

// Reads the "<year>\t<lemma> <lemma> ..." format. Sentences outside
// year_range are skipped. Lines with a year but no tokens are skipped with a
// warning. Throws FormatError (with 1-based line number) and IoError.
TokenizedCorpus load_corpus(const std::string &path, YearRange year_range,
                            const std::string &period_label);

// Same, reading from an in-memory buffer. `source` names the buffer in
// error messages.
TokenizedCorpus parse_corpus(std::string_view text, YearRange year_range,
                             const std::string &period_label,
                             const std::string &source = "<memory>");

void save_corpus(const TokenizedCorpus &corpus, const std::string &path);

// Returns the sentences whose year lies in `range`, relabelled.
TokenizedCorpus restrict_years(const TokenizedCorpus &corpus, YearRange range);

using WordCounts = std::unordered_map<std::string, uint64_t>;

WordCounts count_words(const TokenizedCorpus &corpus);
uint64_t count_word(const TokenizedCorpus &corpus, std::string_view word);

// Word <-> dense id map with raw counts. Ids are assigned by descending
// count, ties broken lexicographically.
class Vocabulary {
 public:
  Vocabulary() = default;

  size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

  std::optional<int> id(std::string_view word) const;
  bool contains(std::string_view word) const { return id(word).has_value(); }
  const std::string &word(int id) const { return words_[id]; }
  uint64_t count(int id) const { return counts_[id]; }
  // Raw count of `word` or 0 when it is not in the vocabulary.
  uint64_t count(std::string_view word) const;

  const std::vector<std::string> &words() const { return words_; }
  const std::vector<uint64_t> &counts() const { return counts_; }
  uint64_t min_count() const { return min_count_; }
  // Corpus token total before min_count filtering.
  uint64_t total_tokens() const { return total_tokens_; }

  // Count divided by the pre-filtering token total.
  double relative_frequency(int id) const;

 private:
  friend Vocabulary build_vocabulary(const TokenizedCorpus &, uint64_t);

  std::unordered_map<std::string, int> word_to_id_;
  std::vector<std::string> words_;
  std::vector<uint64_t> counts_;
  uint64_t min_count_ = 1;
  uint64_t total_tokens_ = 0;
};

Vocabulary build_vocabulary(const TokenizedCorpus &corpus, uint64_t min_count);

// Frequent-word subsampling. Each occurrence of a word with relative
// frequency f above `threshold` is dropped with probability
// 1 - sqrt(threshold / f). Sentences left empty are removed. std::nullopt
// returns the corpus unchanged.
TokenizedCorpus subsample(const TokenizedCorpus &corpus,
                          const Vocabulary &vocab,
                          std::optional<double> threshold, uint64_t seed);

// Raw count of `word` over the corpus token total. Throws NumericalError on
// an empty corpus.
double normalized_frequency(const TokenizedCorpus &corpus,
                            std::string_view word);

// Returns a copy with the sentence order permuted by `seed`.
TokenizedCorpus shuffle_sentences(const TokenizedCorpus &corpus,
                                  uint64_t seed);

// One word per line, blank lines ignored. Duplicates are a FormatError.
std::vector<std::string> load_word_list(const std::string &path);

}  // namespace lscd

#endif  // LSCD_CORPUS_H_
