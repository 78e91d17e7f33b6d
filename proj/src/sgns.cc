#include <algorithm>
#include <cmath>
#include <numeric>

#include "lscd/error.h"
#include "lscd/log.h"
#include "lscd/random.h"
#include "lscd/spaces.h"

namespace lscd {
namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigmoid(x)) without overflow.
double log_sigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

// Samples ids from count^exponent by inverse transform on the cumulative
// distribution.
class NoiseDistribution {
 public:
  NoiseDistribution(const std::vector<uint64_t> &counts, double exponent) {
    cumulative_.reserve(counts.size());
    double total = 0.0;
    for (uint64_t count : counts) {
      total += std::pow(static_cast<double>(count), exponent);
      cumulative_.push_back(total);
    }
    for (double &c : cumulative_) c /= total;
  }

  int sample(Rng &rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<int>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

double dot(const double *a, const double *b, int n) {
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace

void validate(const SgnsHyperparameters &hyper) {
  if (hyper.dimension <= 0) throw ParameterError("dimension must be positive");
  if (hyper.window <= 0) throw ParameterError("window must be positive");
  if (hyper.negative_samples <= 0) {
    throw ParameterError("negative_samples must be positive");
  }
  if (hyper.epochs < 0) throw ParameterError("epochs must be non-negative");
  if (!(hyper.initial_learning_rate > 0.0)) {
    throw ParameterError("initial learning rate must be positive");
  }
  if (!(hyper.min_learning_rate_fraction > 0.0 &&
        hyper.min_learning_rate_fraction <= 1.0)) {
    throw ParameterError("min learning rate fraction must lie in (0, 1]");
  }
  if (!std::isfinite(hyper.unigram_exponent)) {
    throw ParameterError("unigram exponent must be finite");
  }
}

VectorSpace train_sgns(const TokenizedCorpus &corpus, const Vocabulary &vocab,
                       const SgnsHyperparameters &hyper,
                       const VectorSpace *init, SgnsTrace *trace) {
  validate(hyper);
  const int v = static_cast<int>(vocab.size());
  const int d = hyper.dimension;
  if (v < hyper.negative_samples + 1) {
    throw ParameterError("vocabulary of " + std::to_string(v) +
                         " words is too small for " +
                         std::to_string(hyper.negative_samples) +
                         " negative samples");
  }
  if (init) {
    if (init->kind() != SpaceKind::kSgns || init->is_sparse()) {
      throw ParameterError("SGNS initialization requires a dense sgns space");
    }
    if (init->dims() != d) {
      throw ParameterError("initialization dimension " +
                           std::to_string(init->dims()) +
                           " differs from hyperparameter dimension " +
                           std::to_string(d));
    }
  }

  Rng rng(hyper.seed);
  DenseMatrix word(v, d);
  DenseMatrix context = DenseMatrix::Zero(v, d);
  const double scale = 0.5 / d;
  for (int i = 0; i < v; ++i) {
    for (int j = 0; j < d; ++j) word(i, j) = rng.uniform(-scale, scale);
  }
  if (init) {
    size_t ignored = 0;
    for (int r = 0; r < init->rows(); ++r) {
      auto id = vocab.id(init->row_words()[r]);
      if (!id) {
        ++ignored;
        continue;
      }
      word.row(*id) = init->dense().row(r);
      if (init->context_matrix()) {
        context.row(*id) = init->context_matrix()->row(r);
      }
    }
    if (ignored > 0) {
      log_info("sgns: " + std::to_string(ignored) +
               " initialization rows outside the vocabulary ignored");
    }
  }

  std::vector<std::vector<int>> sentences;
  sentences.reserve(corpus.sentences().size());
  uint64_t pairs_per_epoch = 0;
  for (const Sentence &sentence : corpus.sentences()) {
    std::vector<int> ids;
    ids.reserve(sentence.tokens.size());
    for (const std::string &token : sentence.tokens) {
      auto id = vocab.id(token);
      ids.push_back(id ? *id : -1);
    }
    const int n = static_cast<int>(ids.size());
    for (int i = 0; i < n; ++i) {
      if (ids[i] < 0) continue;
      for (int j = std::max(0, i - hyper.window);
           j <= std::min(n - 1, i + hyper.window); ++j) {
        if (j != i && ids[j] >= 0) ++pairs_per_epoch;
      }
    }
    sentences.push_back(std::move(ids));
  }
  if (trace) {
    trace->epoch_objective.clear();
    trace->pairs_per_epoch = pairs_per_epoch;
  }

  const NoiseDistribution noise(vocab.counts(), hyper.unigram_exponent);
  const double total_pairs =
      static_cast<double>(pairs_per_epoch) * hyper.epochs + 1.0;
  const double min_rate =
      hyper.initial_learning_rate * hyper.min_learning_rate_fraction;
  std::vector<double> gradient(d);
  std::vector<size_t> order(sentences.size());
  std::iota(order.begin(), order.end(), 0);
  uint64_t processed = 0;

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    if (hyper.shuffle_sentences) {
      for (size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.below(i)]);
      }
    }
    double objective = 0.0;
    uint64_t epoch_pairs = 0;
    for (size_t s : order) {
      const std::vector<int> &ids = sentences[s];
      const int n = static_cast<int>(ids.size());
      for (int i = 0; i < n; ++i) {
        const int center = ids[i];
        if (center < 0) continue;
        double *u = word.row(center).data();
        for (int j = std::max(0, i - hyper.window);
             j <= std::min(n - 1, i + hyper.window); ++j) {
          const int target = ids[j];
          if (j == i || target < 0) continue;
          const double rate = std::max(
              min_rate, hyper.initial_learning_rate *
                            (1.0 - static_cast<double>(processed) / total_pairs));
          ++processed;
          ++epoch_pairs;
          std::fill(gradient.begin(), gradient.end(), 0.0);

          // Observed pair, label 1.
          double *c = context.row(target).data();
          double f = dot(u, c, d);
          objective += log_sigmoid(f);
          double g = rate * (1.0 - sigmoid(f));
          for (int k = 0; k < d; ++k) {
            gradient[k] += g * c[k];
            c[k] += g * u[k];
          }
          // Noise pairs, label 0.
          for (int k = 0; k < hyper.negative_samples; ++k) {
            const int negative = noise.sample(rng);
            if (negative == target) continue;
            double *nv = context.row(negative).data();
            f = dot(u, nv, d);
            objective += log_sigmoid(-f);
            g = -rate * sigmoid(f);
            for (int t = 0; t < d; ++t) {
              gradient[t] += g * nv[t];
              nv[t] += g * u[t];
            }
          }
          for (int k = 0; k < d; ++k) u[k] += gradient[k];
        }
      }
    }
    const double mean =
        epoch_pairs > 0 ? objective / static_cast<double>(epoch_pairs) : 0.0;
    if (trace) trace->epoch_objective.push_back(mean);
    log_info("sgns epoch " + std::to_string(epoch + 1) + "/" +
             std::to_string(hyper.epochs) +
             " mean objective " + std::to_string(mean));
  }

  if (!word.allFinite() || !context.allFinite()) {
    throw NumericalError("SGNS training diverged (non-finite weights)");
  }
  return VectorSpace::make_dense(SpaceKind::kSgns, vocab.words(),
                                 std::move(word), std::move(context));
}

}  // namespace lscd
