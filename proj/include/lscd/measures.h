#ifndef LSCD_MEASURES_H_
#define LSCD_MEASURES_H_

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lscd/align.h"
#include "lscd/corpus.h"

namespace lscd {

// 1 - cos(u, v), in [0, 2]. Throws NumericalError when either vector is zero
// and ParameterError on a length mismatch.
double cosine_distance(std::span<const double> u, std::span<const double> v);

enum class NegativeStrategy { kClip, kShift, kAbs };

NegativeStrategy parse_negative_strategy(std::string_view name);
const char *negative_strategy_name(NegativeStrategy strategy);

// Square root of the base-2 Jensen-Shannon divergence, in [0, 1]. Negative
// entries are removed first: clip maps x to max(x, 0), abs to |x|, and shift
// subtracts min(0, smallest entry of u and v) from both vectors. Each vector
// is then L1-normalized; zero mass throws NumericalError.
double jensen_shannon_distance(std::span<const double> u,
                               std::span<const double> v,
                               NegativeStrategy strategy = NegativeStrategy::kClip);

// |ln f_a - ln f_b| with f = (count + 0.5) / (total + 0.5).
double frequency_difference(uint64_t count_a, uint64_t total_a,
                            uint64_t count_b, uint64_t total_b);
double frequency_difference(const TokenizedCorpus &corpus_a,
                            const TokenizedCorpus &corpus_b,
                            std::string_view word);

enum class MeasureKind { kCosine, kJensenShannon, kFrequency, kKnnCosine };

const char *measure_tag(MeasureKind kind);

struct RankedWord {
  std::string word;
  double score = 0.0;
  bool flagged = false;  // unresolvable, assigned the maximal observed score
};

// Targets sorted by score descending. Equal scores list flagged words first,
// then lexicographically.
struct ChangeRanking {
  std::vector<RankedWord> entries;
  MeasureKind measure = MeasureKind::kCosine;

  std::vector<std::string> flagged() const;
};

struct MeasureOptions {
  MeasureKind kind = MeasureKind::kCosine;
  NegativeStrategy negative_strategy = NegativeStrategy::kClip;
  int knn_k = 10;
};

// Scores every target on an aligned pair. Targets that are missing from a
// space, or whose distance is undefined, receive the maximal observed score
// and are flagged with a warning. Throws ParameterError on an empty target
// set or when the measure is FD.
ChangeRanking rank_targets(const AlignedPair &pair,
                           const MeasureOptions &options,
                           const std::vector<std::string> &targets);

// Frequency-difference ranking straight from the corpora.
ChangeRanking rank_targets_by_frequency(const TokenizedCorpus &corpus_a,
                                        const TokenizedCorpus &corpus_b,
                                        const std::vector<std::string> &targets);

// Sorts and fills in scores for flagged entries.
ChangeRanking make_ranking(std::vector<RankedWord> entries,
                           MeasureKind measure);

// "word<TAB>score" lines, descending, six decimals.
void write_ranking(const ChangeRanking &ranking, const std::string &path);
std::string format_ranking(const ChangeRanking &ranking);
ChangeRanking read_ranking(const std::string &path);

}  // namespace lscd

#endif  // LSCD_MEASURES_H_
