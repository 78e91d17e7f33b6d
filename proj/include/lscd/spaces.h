#ifndef LSCD_SPACES_H_
#define LSCD_SPACES_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lscd/corpus.h"
#include "lscd/vector_space.h"

namespace lscd {

// Symmetric window co-occurrence counts. Entry (w, c) counts how often c
// occurs within `window` positions of w in the same sentence. Rows and
// columns follow vocabulary id order. Tokens outside the vocabulary keep
// their position but contribute no pairs. With workers > 1 sentences are
// sharded across threads; integer accumulation makes the result identical to
// the sequential build.
VectorSpace build_count_matrix(const TokenizedCorpus &corpus,
                               const Vocabulary &vocab, int window,
                               int workers = 1);

// Shifted PPMI with context distribution smoothing:
//   max(0, log(P(w,c) / (P(w) * P_a(c))) - log(shift_k))
// where P_a(c) = n(c)^a / sum_c' n(c')^a.
VectorSpace ppmi_transform(const VectorSpace &counts, double shift_k = 1.0,
                           double context_smoothing = 0.75);

// Context selection by tf-idf over year-slice documents. For each vocabulary
// word, co-occurring vocabulary words (anywhere in the same sentence) are
// ranked by tf * log(D / df), then by tf, then lexicographically, and the
// first top_n are kept.
using ContextSelection = std::map<std::string, std::set<std::string>>;

ContextSelection tfidf_select_contexts(const TokenizedCorpus &corpus,
                                       const Vocabulary &vocab, int top_n);

// Zeroes every count (w, c) whose context c was not selected for w. Rows
// missing from the selection are cleared entirely.
VectorSpace mask_contexts(const VectorSpace &counts,
                          const ContextSelection &selection);

enum class BinarizeThreshold { kColumnMean, kZero };

// Maps each entry to 1 when strictly above its column threshold, else 0.
// The context matrix of an SGNS space is dropped.
VectorSpace binarize(const VectorSpace &space,
                     BinarizeThreshold threshold = BinarizeThreshold::kColumnMean);

struct SgnsHyperparameters {
  int dimension = 100;
  int window = 10;
  int negative_samples = 1;
  int epochs = 5;
  double initial_learning_rate = 0.025;
  // Final learning rate as a fraction of the initial one.
  double min_learning_rate_fraction = 1e-4;
  double unigram_exponent = 0.75;
  bool shuffle_sentences = false;
  uint64_t seed = 1;
};

// Throws ParameterError for non-positive sizes or rates.
void validate(const SgnsHyperparameters &hyper);

// Per-epoch mean of log s(u.v) + sum_i log s(-u.v_i) over the pairs
// processed, evaluated before each update.
struct SgnsTrace {
  std::vector<double> epoch_objective;
  uint64_t pairs_per_epoch = 0;
};

// Skip-gram with negative sampling, single-threaded and bit-deterministic
// for a fixed seed. Rows of words present in `init` start from its values
// (word and, when available, context matrix); other word rows start from
// uniform noise in [-0.5/d, 0.5/d) and other context rows from zero.
VectorSpace train_sgns(const TokenizedCorpus &corpus, const Vocabulary &vocab,
                       const SgnsHyperparameters &hyper,
                       const VectorSpace *init = nullptr,
                       SgnsTrace *trace = nullptr);

}  // namespace lscd

#endif  // LSCD_SPACES_H_
