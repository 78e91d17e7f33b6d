#include "lscd/measures.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "lscd/error.h"
#include "lscd/log.h"

namespace lscd {
namespace {

void check_lengths(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw ParameterError("vector lengths differ (" + std::to_string(u.size()) +
                         " vs " + std::to_string(v.size()) + ")");
  }
}

std::vector<double> to_distribution(std::span<const double> x,
                                    NegativeStrategy strategy, double offset) {
  std::vector<double> p(x.size());
  double mass = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    switch (strategy) {
      case NegativeStrategy::kClip: p[i] = std::max(x[i], 0.0); break;
      case NegativeStrategy::kAbs: p[i] = std::abs(x[i]); break;
      case NegativeStrategy::kShift: p[i] = x[i] - offset; break;
    }
    mass += p[i];
  }
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw NumericalError("vector has zero mass after negative handling");
  }
  for (double &value : p) value /= mass;
  return p;
}

// sum_i p_i log2(p_i / m_i), skipping p_i = 0.
double relative_entropy_to_mixture(const std::vector<double> &p,
                                   const std::vector<double> &m) {
  double sum = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) sum += p[i] * std::log2(p[i] / m[i]);
  }
  return sum;
}

}  // namespace

double cosine_distance(std::span<const double> u, std::span<const double> v) {
  check_lengths(u, v);
  double dot = 0.0;
  double uu = 0.0;
  double vv = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) {
    throw NumericalError("cosine distance undefined for a zero vector");
  }
  const double distance = 1.0 - dot / std::sqrt(uu * vv);
  return std::clamp(distance, 0.0, 2.0);
}

NegativeStrategy parse_negative_strategy(std::string_view name) {
  if (name == "clip") return NegativeStrategy::kClip;
  if (name == "shift") return NegativeStrategy::kShift;
  if (name == "abs") return NegativeStrategy::kAbs;
  throw ParameterError("unknown negative strategy '" + std::string(name) + "'");
}

const char *negative_strategy_name(NegativeStrategy strategy) {
  switch (strategy) {
    case NegativeStrategy::kClip: return "clip";
    case NegativeStrategy::kShift: return "shift";
    case NegativeStrategy::kAbs: return "abs";
  }
  return "?";
}

double jensen_shannon_distance(std::span<const double> u,
                               std::span<const double> v,
                               NegativeStrategy strategy) {
  check_lengths(u, v);
  double offset = 0.0;
  if (strategy == NegativeStrategy::kShift) {
    for (double x : u) offset = std::min(offset, x);
    for (double x : v) offset = std::min(offset, x);
  }
  const std::vector<double> p = to_distribution(u, strategy, offset);
  const std::vector<double> q = to_distribution(v, strategy, offset);
  std::vector<double> m(p.size());
  for (size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
  const double divergence = 0.5 * relative_entropy_to_mixture(p, m) +
                            0.5 * relative_entropy_to_mixture(q, m);
  return std::clamp(std::sqrt(std::max(divergence, 0.0)), 0.0, 1.0);
}

double frequency_difference(uint64_t count_a, uint64_t total_a,
                            uint64_t count_b, uint64_t total_b) {
  const double fa = (static_cast<double>(count_a) + 0.5) /
                    (static_cast<double>(total_a) + 0.5);
  const double fb = (static_cast<double>(count_b) + 0.5) /
                    (static_cast<double>(total_b) + 0.5);
  return std::abs(std::log(fa) - std::log(fb));
}

double frequency_difference(const TokenizedCorpus &corpus_a,
                            const TokenizedCorpus &corpus_b,
                            std::string_view word) {
  return frequency_difference(count_word(corpus_a, word), corpus_a.token_total(),
                              count_word(corpus_b, word),
                              corpus_b.token_total());
}

const char *measure_tag(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::kCosine: return "CD";
    case MeasureKind::kJensenShannon: return "JSD";
    case MeasureKind::kFrequency: return "FD";
    case MeasureKind::kKnnCosine: return "KNN-CD";
  }
  return "?";
}

std::vector<std::string> ChangeRanking::flagged() const {
  std::vector<std::string> words;
  for (const RankedWord &entry : entries) {
    if (entry.flagged) words.push_back(entry.word);
  }
  return words;
}

ChangeRanking make_ranking(std::vector<RankedWord> entries,
                           MeasureKind measure) {
  double max_score = 0.0;
  bool any = false;
  for (const RankedWord &entry : entries) {
    if (entry.flagged) continue;
    max_score = any ? std::max(max_score, entry.score) : entry.score;
    any = true;
  }
  for (RankedWord &entry : entries) {
    if (entry.flagged) entry.score = max_score;
  }
  std::sort(entries.begin(), entries.end(),
            [](const RankedWord &a, const RankedWord &b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.flagged != b.flagged) return a.flagged;
              return a.word < b.word;
            });
  return {std::move(entries), measure};
}

namespace {

void check_targets(const std::vector<std::string> &targets) {
  if (targets.empty()) throw ParameterError("empty target set");
  std::unordered_set<std::string_view> seen;
  for (const std::string &target : targets) {
    if (!seen.insert(target).second) {
      throw ParameterError("duplicate target '" + target + "'");
    }
  }
}

double score_target(const AlignedPair &pair, const MeasureOptions &options,
                    const std::string &word) {
  if (options.kind == MeasureKind::kKnnCosine) {
    const SecondOrderVectors vectors =
        knn_local_neighborhood(pair.space_a, pair.space_b, word, options.knn_k);
    return cosine_distance(as_span(vectors.in_a), as_span(vectors.in_b));
  }
  if (!pair.space_a.contains(word) || !pair.space_b.contains(word)) {
    throw MissingWordError("'" + word + "' missing from an aligned space");
  }
  const Eigen::VectorXd u = pair.space_a.row(word);
  const Eigen::VectorXd v = pair.space_b.row(word);
  if (options.kind == MeasureKind::kJensenShannon) {
    return jensen_shannon_distance(as_span(u), as_span(v),
                                   options.negative_strategy);
  }
  return cosine_distance(as_span(u), as_span(v));
}

}  // namespace

ChangeRanking rank_targets(const AlignedPair &pair,
                           const MeasureOptions &options,
                           const std::vector<std::string> &targets) {
  check_targets(targets);
  if (options.kind == MeasureKind::kFrequency) {
    throw ParameterError("FD is computed from corpora, not aligned spaces");
  }
  std::vector<RankedWord> entries;
  entries.reserve(targets.size());
  for (const std::string &word : targets) {
    RankedWord entry{word, 0.0, false};
    try {
      entry.score = score_target(pair, options, word);
    } catch (const MissingWordError &e) {
      log_warning(std::string(e.what()) + "; ranked as maximally changed");
      entry.flagged = true;
    } catch (const NumericalError &e) {
      log_warning("'" + word + "': " + e.what() +
                  "; ranked as maximally changed");
      entry.flagged = true;
    }
    entries.push_back(std::move(entry));
  }
  return make_ranking(std::move(entries), options.kind);
}

ChangeRanking rank_targets_by_frequency(
    const TokenizedCorpus &corpus_a, const TokenizedCorpus &corpus_b,
    const std::vector<std::string> &targets) {
  check_targets(targets);
  const WordCounts counts_a = count_words(corpus_a);
  const WordCounts counts_b = count_words(corpus_b);
  auto lookup = [](const WordCounts &counts, const std::string &word) {
    auto it = counts.find(word);
    return it == counts.end() ? uint64_t{0} : it->second;
  };
  std::vector<RankedWord> entries;
  for (const std::string &word : targets) {
    entries.push_back(
        {word,
         frequency_difference(lookup(counts_a, word), corpus_a.token_total(),
                              lookup(counts_b, word), corpus_b.token_total()),
         false});
  }
  return make_ranking(std::move(entries), MeasureKind::kFrequency);
}

std::string format_ranking(const ChangeRanking &ranking) {
  std::string out;
  char buffer[64];
  for (const RankedWord &entry : ranking.entries) {
    std::snprintf(buffer, sizeof(buffer), "%.6f", entry.score);
    out += entry.word;
    out += '\t';
    out += buffer;
    out += '\n';
  }
  return out;
}

void write_ranking(const ChangeRanking &ranking, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << format_ranking(ranking);
  if (!out) throw IoError("error writing " + path);
}

ChangeRanking read_ranking(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<RankedWord> entries;
  std::unordered_set<std::string> seen;
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_number);
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError(where + ": missing tab");
    std::string word = line.substr(0, tab);
    char *end = nullptr;
    const std::string value = line.substr(tab + 1);
    const double score = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0' || !std::isfinite(score)) {
      throw FormatError(where + ": invalid score '" + value + "'");
    }
    if (!seen.insert(word).second) {
      throw FormatError(where + ": duplicate word '" + word + "'");
    }
    entries.push_back({std::move(word), score, false});
  }
  return make_ranking(std::move(entries), MeasureKind::kCosine);
}

}  // namespace lscd
