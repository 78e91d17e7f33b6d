#include "lscd/spaces.h"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_map>

#include "lscd/error.h"

namespace lscd {
namespace {

using PairCounts = std::unordered_map<uint64_t, uint64_t>;

uint64_t pair_key(int row, int col) {
  return (static_cast<uint64_t>(row) << 32) | static_cast<uint32_t>(col);
}

std::vector<int> to_ids(const Sentence &sentence, const Vocabulary &vocab) {
  std::vector<int> ids;
  ids.reserve(sentence.tokens.size());
  for (const std::string &token : sentence.tokens) {
    auto id = vocab.id(token);
    ids.push_back(id ? *id : -1);
  }
  return ids;
}

void accumulate_pairs(const std::vector<Sentence> &sentences, size_t begin,
                      size_t end, const Vocabulary &vocab, int window,
                      PairCounts *counts) {
  for (size_t s = begin; s < end; ++s) {
    const std::vector<int> ids = to_ids(sentences[s], vocab);
    const int n = static_cast<int>(ids.size());
    for (int i = 0; i < n; ++i) {
      if (ids[i] < 0) continue;
      const int lo = std::max(0, i - window);
      const int hi = std::min(n - 1, i + window);
      for (int j = lo; j <= hi; ++j) {
        if (j == i || ids[j] < 0) continue;
        ++(*counts)[pair_key(ids[i], ids[j])];
      }
    }
  }
}

}  // namespace

VectorSpace build_count_matrix(const TokenizedCorpus &corpus,
                               const Vocabulary &vocab, int window,
                               int workers) {
  if (vocab.empty()) {
    throw ParameterError("cannot build a count space from an empty vocabulary");
  }
  if (window <= 0) throw ParameterError("window must be positive");
  workers = std::max(1, workers);

  const std::vector<Sentence> &sentences = corpus.sentences();
  PairCounts merged;
  if (workers == 1 || sentences.size() < 2) {
    accumulate_pairs(sentences, 0, sentences.size(), vocab, window, &merged);
  } else {
    std::vector<PairCounts> shards(workers);
    std::vector<std::thread> threads;
    const size_t chunk = (sentences.size() + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const size_t begin = std::min(sentences.size(), w * chunk);
      const size_t end = std::min(sentences.size(), begin + chunk);
      threads.emplace_back(accumulate_pairs, std::cref(sentences), begin, end,
                           std::cref(vocab), window, &shards[w]);
    }
    for (std::thread &t : threads) t.join();
    for (PairCounts &shard : shards) {
      for (const auto &[key, count] : shard) merged[key] += count;
    }
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(merged.size());
  for (const auto &[key, count] : merged) {
    triplets.emplace_back(static_cast<int>(key >> 32),
                          static_cast<int>(key & 0xffffffffu),
                          static_cast<double>(count));
  }
  const auto n = static_cast<Eigen::Index>(vocab.size());
  SparseMatrix matrix(n, n);
  matrix.setFromTriplets(triplets.begin(), triplets.end());
  return VectorSpace::make_sparse(SpaceKind::kCount, vocab.words(),
                                  std::move(matrix), vocab.words());
}

VectorSpace ppmi_transform(const VectorSpace &counts, double shift_k,
                           double context_smoothing) {
  if (counts.kind() != SpaceKind::kCount || !counts.is_sparse()) {
    throw ParameterError("ppmi_transform expects a count space");
  }
  if (!(shift_k >= 1.0)) throw ParameterError("shift_k must be >= 1");
  if (!(context_smoothing > 0.0 && context_smoothing <= 1.0)) {
    throw ParameterError("context smoothing must lie in (0, 1]");
  }

  const SparseMatrix &m = counts.sparse();
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(m.rows());
  Eigen::VectorXd col_sums = Eigen::VectorXd::Zero(m.cols());
  double total = 0.0;
  for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
      if (it.value() < 0.0) {
        throw ParameterError("negative co-occurrence count");
      }
      row_sums[r] += it.value();
      col_sums[it.col()] += it.value();
      total += it.value();
    }
  }
  if (total <= 0.0) {
    throw NumericalError("PPMI undefined: co-occurrence matrix is all zero");
  }

  Eigen::VectorXd smoothed_context(m.cols());
  double smoothed_total = 0.0;
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    smoothed_context[c] =
        col_sums[c] > 0.0 ? std::pow(col_sums[c], context_smoothing) : 0.0;
    smoothed_total += smoothed_context[c];
  }

  const double log_shift = std::log(shift_k);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(m.nonZeros());
  for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
    const double p_word = row_sums[r] / total;
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
      if (it.value() == 0.0) continue;
      const double p_joint = it.value() / total;
      const double p_context = smoothed_context[it.col()] / smoothed_total;
      const double value =
          std::log(p_joint / (p_word * p_context)) - log_shift;
      if (value > 0.0) {
        triplets.emplace_back(static_cast<int>(r), it.col(), value);
      }
    }
  }
  SparseMatrix ppmi(m.rows(), m.cols());
  ppmi.setFromTriplets(triplets.begin(), triplets.end());
  return VectorSpace::make_sparse(SpaceKind::kPpmi, counts.row_words(),
                                  std::move(ppmi), *counts.column_labels());
}

ContextSelection tfidf_select_contexts(const TokenizedCorpus &corpus,
                                       const Vocabulary &vocab, int top_n) {
  if (top_n <= 0) throw ParameterError("tf-idf top_n must be positive");
  const size_t v = vocab.size();

  // Document frequency over year slices.
  std::map<int, std::vector<bool>> seen_by_year;
  std::vector<std::unordered_map<int, uint64_t>> tf(v);
  for (const Sentence &sentence : corpus.sentences()) {
    std::vector<bool> &seen = seen_by_year[sentence.year];
    if (seen.empty()) seen.assign(v, false);
    std::map<int, uint64_t> sentence_counts;
    for (const std::string &token : sentence.tokens) {
      if (auto id = vocab.id(token)) {
        ++sentence_counts[*id];
        seen[*id] = true;
      }
    }
    for (const auto &[w, w_count] : sentence_counts) {
      for (const auto &[c, c_count] : sentence_counts) {
        const uint64_t pairs = w == c ? w_count * (c_count - 1)
                                      : w_count * c_count;
        if (pairs > 0) tf[w][c] += pairs;
      }
    }
  }
  const double documents = static_cast<double>(seen_by_year.size());
  std::vector<uint64_t> df(v, 0);
  for (const auto &[year, seen] : seen_by_year) {
    for (size_t i = 0; i < v; ++i) df[i] += seen[i] ? 1 : 0;
  }

  struct Candidate {
    double score;
    uint64_t tf;
    const std::string *word;
  };
  ContextSelection selection;
  for (size_t w = 0; w < v; ++w) {
    std::vector<Candidate> candidates;
    candidates.reserve(tf[w].size());
    for (const auto &[c, count] : tf[w]) {
      const double idf = std::log(documents / static_cast<double>(df[c]));
      candidates.push_back(
          {static_cast<double>(count) * idf, count, &vocab.word(c)});
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate &a, const Candidate &b) {
                if (a.score != b.score) return a.score > b.score;
                if (a.tf != b.tf) return a.tf > b.tf;
                return *a.word < *b.word;
              });
    std::set<std::string> &chosen = selection[vocab.word(static_cast<int>(w))];
    for (size_t i = 0; i < candidates.size() && i < static_cast<size_t>(top_n);
         ++i) {
      chosen.insert(*candidates[i].word);
    }
  }
  return selection;
}

VectorSpace mask_contexts(const VectorSpace &counts,
                          const ContextSelection &selection) {
  if (!counts.is_sparse() || !counts.column_labels()) {
    throw ParameterError("context masking needs a space with column labels");
  }
  const SparseMatrix &m = counts.sparse();
  const std::vector<std::string> &labels = *counts.column_labels();
  std::vector<Eigen::Triplet<double>> triplets;
  for (int r = 0; r < counts.rows(); ++r) {
    auto found = selection.find(counts.row_words()[r]);
    if (found == selection.end()) continue;
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
      if (found->second.count(labels[it.col()])) {
        triplets.emplace_back(r, it.col(), it.value());
      }
    }
  }
  SparseMatrix masked(m.rows(), m.cols());
  masked.setFromTriplets(triplets.begin(), triplets.end());
  return VectorSpace::make_sparse(counts.kind(), counts.row_words(),
                                  std::move(masked), labels);
}

VectorSpace binarize(const VectorSpace &space, BinarizeThreshold threshold) {
  const int rows = space.rows();
  const int dims = space.dims();
  Eigen::VectorXd thresholds = Eigen::VectorXd::Zero(dims);

  if (space.is_sparse()) {
    const SparseMatrix &m = space.sparse();
    if (threshold == BinarizeThreshold::kColumnMean && rows > 0) {
      for (int r = 0; r < rows; ++r) {
        for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
          thresholds[it.col()] += it.value();
        }
      }
      thresholds /= static_cast<double>(rows);
    }
    if ((thresholds.array() < 0.0).any()) {
      // Implicit zeros would map to 1; fall back to the dense path.
      VectorSpace dense = VectorSpace::make_dense(
          space.kind(), space.row_words(), DenseMatrix(m));
      VectorSpace binary = binarize(dense, threshold);
      SparseMatrix back = binary.dense().sparseView();
      return VectorSpace::make_sparse(space.kind(), space.row_words(),
                                      std::move(back), *space.column_labels());
    }
    std::vector<Eigen::Triplet<double>> triplets;
    for (int r = 0; r < rows; ++r) {
      for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
        if (it.value() > thresholds[it.col()]) {
          triplets.emplace_back(r, it.col(), 1.0);
        }
      }
    }
    SparseMatrix binary(rows, dims);
    binary.setFromTriplets(triplets.begin(), triplets.end());
    return VectorSpace::make_sparse(space.kind(), space.row_words(),
                                    std::move(binary), *space.column_labels());
  }

  const DenseMatrix &m = space.dense();
  if (threshold == BinarizeThreshold::kColumnMean && rows > 0) {
    thresholds = m.colwise().mean().transpose();
  }
  DenseMatrix binary(rows, dims);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < dims; ++c) {
      binary(r, c) = m(r, c) > thresholds[c] ? 1.0 : 0.0;
    }
  }
  return VectorSpace::make_dense(space.kind(), space.row_words(),
                                 std::move(binary));
}

}  // namespace lscd
