#include "lscd/corpus.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "lscd/error.h"
#include "lscd/log.h"
#include "lscd/random.h"

namespace lscd {
namespace {

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path);
  return buffer.str();
}

bool parse_int(std::string_view text, int *value) {
  if (text.empty()) return false;
  const char *begin = text.data();
  const char *end = begin + text.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, *value);
  return ec == std::errc() && ptr == end;
}

}  // namespace

YearRange parse_year_range(std::string_view text) {
  size_t split = text.find_first_of("-:", 1);
  int first = 0;
  int last = 0;
  if (split == std::string_view::npos ||
      !parse_int(text.substr(0, split), &first) ||
      !parse_int(text.substr(split + 1), &last) || first > last) {
    throw ParameterError("invalid year range '" + std::string(text) +
                         "', expected FIRST-LAST");
  }
  return {first, last};
}

TokenizedCorpus::TokenizedCorpus(std::string period_label,
                                 YearRange year_range,
                                 std::vector<Sentence> sentences)
    : period_label_(std::move(period_label)),
      year_range_(year_range),
      sentences_(std::move(sentences)) {
  for (const Sentence &sentence : sentences_) {
    if (sentence.tokens.empty()) {
      throw ParameterError("corpus " + period_label_ +
                           " contains an empty sentence");
    }
    if (!year_range_.contains(sentence.year)) {
      throw ParameterError("sentence year " + std::to_string(sentence.year) +
                           " outside the range of corpus " + period_label_);
    }
    token_total_ += sentence.tokens.size();
  }
}

TokenizedCorpus parse_corpus(std::string_view text, YearRange year_range,
                             const std::string &period_label,
                             const std::string &source) {
  std::vector<Sentence> sentences;
  size_t line_number = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    const size_t tab = line.find('\t');
    int year = 0;
    if (tab == std::string_view::npos) {
      throw FormatError(source + ":" + std::to_string(line_number) +
                        ": missing tab after year");
    }
    if (!parse_int(line.substr(0, tab), &year)) {
      throw FormatError(source + ":" + std::to_string(line_number) +
                        ": year is not an integer");
    }
    if (!year_range.contains(year)) continue;

    Sentence sentence;
    sentence.year = year;
    std::string_view rest = line.substr(tab + 1);
    size_t start = 0;
    while (start <= rest.size()) {
      size_t space = rest.find(' ', start);
      if (space == std::string_view::npos) space = rest.size();
      if (space > start) {
        sentence.tokens.emplace_back(rest.substr(start, space - start));
      }
      start = space + 1;
    }
    if (sentence.tokens.empty()) {
      log_warning(source + ":" + std::to_string(line_number) +
                  ": sentence without tokens skipped");
      continue;
    }
    sentences.push_back(std::move(sentence));
  }
  return TokenizedCorpus(period_label, year_range, std::move(sentences));
}

TokenizedCorpus load_corpus(const std::string &path, YearRange year_range,
                            const std::string &period_label) {
  return parse_corpus(read_file(path), year_range, period_label, path);
}

void save_corpus(const TokenizedCorpus &corpus, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (const Sentence &sentence : corpus.sentences()) {
    out << sentence.year << '\t';
    for (size_t i = 0; i < sentence.tokens.size(); ++i) {
      if (i > 0) out << ' ';
      out << sentence.tokens[i];
    }
    out << '\n';
  }
  if (!out) throw IoError("error writing " + path);
}

TokenizedCorpus restrict_years(const TokenizedCorpus &corpus,
                               YearRange range) {
  YearRange clipped{std::max(range.first, corpus.year_range().first),
                    std::min(range.last, corpus.year_range().last)};
  std::vector<Sentence> kept;
  for (const Sentence &sentence : corpus.sentences()) {
    if (clipped.contains(sentence.year)) kept.push_back(sentence);
  }
  return TokenizedCorpus(corpus.period_label(), clipped, std::move(kept));
}

WordCounts count_words(const TokenizedCorpus &corpus) {
  WordCounts counts;
  for (const Sentence &sentence : corpus.sentences()) {
    for (const std::string &token : sentence.tokens) ++counts[token];
  }
  return counts;
}

uint64_t count_word(const TokenizedCorpus &corpus, std::string_view word) {
  uint64_t count = 0;
  for (const Sentence &sentence : corpus.sentences()) {
    count += std::count(sentence.tokens.begin(), sentence.tokens.end(), word);
  }
  return count;
}

std::optional<int> Vocabulary::id(std::string_view word) const {
  auto it = word_to_id_.find(std::string(word));
  if (it == word_to_id_.end()) return std::nullopt;
  return it->second;
}

uint64_t Vocabulary::count(std::string_view word) const {
  auto found = id(word);
  return found ? counts_[*found] : 0;
}

double Vocabulary::relative_frequency(int id) const {
  if (total_tokens_ == 0) return 0.0;
  return static_cast<double>(counts_[id]) / static_cast<double>(total_tokens_);
}

Vocabulary build_vocabulary(const TokenizedCorpus &corpus,
                            uint64_t min_count) {
  if (min_count == 0) throw ParameterError("min_count must be positive");
  WordCounts counts = count_words(corpus);

  std::vector<std::pair<std::string, uint64_t>> entries;
  for (auto &[word, count] : counts) {
    if (count >= min_count) entries.emplace_back(word, count);
  }
  std::sort(entries.begin(), entries.end(), [](const auto &a, const auto &b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary vocab;
  vocab.min_count_ = min_count;
  vocab.total_tokens_ = corpus.token_total();
  vocab.words_.reserve(entries.size());
  vocab.counts_.reserve(entries.size());
  for (auto &[word, count] : entries) {
    vocab.word_to_id_.emplace(word, static_cast<int>(vocab.words_.size()));
    vocab.words_.push_back(word);
    vocab.counts_.push_back(count);
  }
  return vocab;
}

TokenizedCorpus subsample(const TokenizedCorpus &corpus,
                          const Vocabulary &vocab,
                          std::optional<double> threshold, uint64_t seed) {
  if (!threshold) return corpus;
  if (!(*threshold > 0.0 && *threshold < 1.0)) {
    throw ParameterError("subsampling threshold must lie in (0, 1)");
  }

  // Keep probability per vocabulary id; out-of-vocabulary tokens are kept.
  std::vector<double> keep(vocab.size(), 1.0);
  for (size_t i = 0; i < vocab.size(); ++i) {
    const double f = vocab.relative_frequency(static_cast<int>(i));
    if (f > *threshold) keep[i] = std::sqrt(*threshold / f);
  }

  Rng rng(seed);
  std::vector<Sentence> sentences;
  sentences.reserve(corpus.sentences().size());
  for (const Sentence &sentence : corpus.sentences()) {
    Sentence kept;
    kept.year = sentence.year;
    for (const std::string &token : sentence.tokens) {
      auto id = vocab.id(token);
      if (id && keep[*id] < 1.0 && rng.uniform() >= keep[*id]) continue;
      kept.tokens.push_back(token);
    }
    if (!kept.tokens.empty()) sentences.push_back(std::move(kept));
  }
  return TokenizedCorpus(corpus.period_label(), corpus.year_range(),
                         std::move(sentences));
}

double normalized_frequency(const TokenizedCorpus &corpus,
                            std::string_view word) {
  if (corpus.token_total() == 0) {
    throw NumericalError("normalized frequency undefined on empty corpus " +
                         corpus.period_label());
  }
  return static_cast<double>(count_word(corpus, word)) /
         static_cast<double>(corpus.token_total());
}

TokenizedCorpus shuffle_sentences(const TokenizedCorpus &corpus,
                                  uint64_t seed) {
  std::vector<Sentence> sentences = corpus.sentences();
  Rng rng(seed);
  // Fisher-Yates with the portable integer draw.
  for (size_t i = sentences.size(); i > 1; --i) {
    std::swap(sentences[i - 1], sentences[rng.below(i)]);
  }
  return TokenizedCorpus(corpus.period_label(), corpus.year_range(),
                         std::move(sentences));
}

std::vector<std::string> load_word_list(const std::string &path) {
  std::string text = read_file(path);
  std::vector<std::string> words;
  std::unordered_set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // Trim surrounding blanks.
    size_t b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    size_t e = line.find_last_not_of(" \t");
    std::string word = line.substr(b, e - b + 1);
    if (!seen.insert(word).second) {
      throw FormatError(path + ":" + std::to_string(line_number) +
                        ": duplicate word '" + word + "'");
    }
    words.push_back(std::move(word));
  }
  return words;
}

}  // namespace lscd
