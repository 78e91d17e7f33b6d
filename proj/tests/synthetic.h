#ifndef LSCD_TESTS_SYNTHETIC_H_
#define LSCD_TESTS_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "lscd/corpus.h"
#include "lscd/eval.h"

namespace lscd::testing {

// Two periods drawn from the same topic model. Every focus word has a home
// topic whose private context words surround it. In period b the changed
// words swap topics with a donor word in a graded fraction of their
// sentences; the gold score of a target is that fraction (0 for the stable
// targets).
struct SyntheticBenchmark {
  TokenizedCorpus corpus_a;
  TokenizedCorpus corpus_b;
  std::vector<std::string> targets;  // changed first, then stable
  GoldRanking gold;
};

inline constexpr int kChangedWords = 5;
inline constexpr int kStableWords = 15;

SyntheticBenchmark make_synthetic_benchmark(uint64_t seed,
                                            int sentences_per_period = 4200);

// Writes corpora, targets and gold as files below `dir` and returns a
// config text (without alignment, space or measure keys) pointing at them.
std::string write_benchmark_files(const SyntheticBenchmark &bench,
                                  const std::string &dir);

}  // namespace lscd::testing

#endif  // LSCD_TESTS_SYNTHETIC_H_
