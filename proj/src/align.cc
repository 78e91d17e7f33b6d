#include "lscd/align.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <Eigen/SVD>

#include "lscd/error.h"
#include "lscd/log.h"

namespace lscd {
namespace {

// Columns of `space` whose label is in `labels`, re-ordered to `labels`.
SparseMatrix restrict_columns(const VectorSpace &space,
                              const std::vector<std::string> &labels) {
  std::unordered_map<std::string, int> new_index;
  for (size_t i = 0; i < labels.size(); ++i) {
    new_index.emplace(labels[i], static_cast<int>(i));
  }
  const std::vector<std::string> &old_labels = *space.column_labels();
  std::vector<int> remap(old_labels.size(), -1);
  for (size_t c = 0; c < old_labels.size(); ++c) {
    auto it = new_index.find(old_labels[c]);
    if (it != new_index.end()) remap[c] = it->second;
  }
  const SparseMatrix &m = space.sparse();
  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
      if (remap[it.col()] >= 0) {
        triplets.emplace_back(static_cast<int>(r), remap[it.col()],
                              it.value());
      }
    }
  }
  SparseMatrix out(m.rows(), static_cast<Eigen::Index>(labels.size()));
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

std::vector<std::string> select_anchors(const VectorSpace &a,
                                        const VectorSpace &b,
                                        const AnchorPolicy &policy,
                                        const AnchorFrequencies &frequencies) {
  std::vector<std::string> shared = shared_row_words(a, b);
  if (std::holds_alternative<AllShared>(policy)) return shared;

  if (const auto *top = std::get_if<TopFrequency>(&policy)) {
    if (!frequencies.vocab_a || !frequencies.vocab_b) {
      throw ParameterError(
          "top-frequency anchors need the vocabularies of both periods");
    }
    if (top->n <= 0) throw ParameterError("anchor count must be positive");
    std::vector<std::pair<double, std::string>> ranked;
    for (const std::string &word : shared) {
      auto ia = frequencies.vocab_a->id(word);
      auto ib = frequencies.vocab_b->id(word);
      const double fa = ia ? frequencies.vocab_a->relative_frequency(*ia) : 0.0;
      const double fb = ib ? frequencies.vocab_b->relative_frequency(*ib) : 0.0;
      ranked.emplace_back(std::min(fa, fb), word);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto &x, const auto &y) {
      if (x.first != y.first) return x.first > y.first;
      return x.second < y.second;
    });
    if (ranked.size() > static_cast<size_t>(top->n)) ranked.resize(top->n);
    std::vector<std::string> anchors;
    for (auto &[f, word] : ranked) anchors.push_back(word);
    std::sort(anchors.begin(), anchors.end());
    return anchors;
  }

  const auto &list = std::get<WordList>(policy);
  std::unordered_set<std::string> in_both(shared.begin(), shared.end());
  std::set<std::string> anchors;
  size_t missing = 0;
  for (const std::string &word : list.words) {
    if (in_both.count(word)) {
      anchors.insert(word);
    } else {
      ++missing;
    }
  }
  if (missing > 0) {
    log_warning("procrustes: " + std::to_string(missing) +
                " anchor words missing from one of the spaces");
  }
  return {anchors.begin(), anchors.end()};
}

void preprocess(DenseMatrix *m, bool length_normalize, bool mean_center) {
  if (length_normalize) {
    for (Eigen::Index i = 0; i < m->rows(); ++i) {
      const double norm = m->row(i).norm();
      if (norm > 0.0) m->row(i) /= norm;
    }
  }
  if (mean_center && m->rows() > 0) {
    const Eigen::RowVectorXd mean = m->colwise().mean();
    m->rowwise() -= mean;
  }
}

DenseMatrix gather(const DenseMatrix &m, const std::vector<int> &rows) {
  DenseMatrix out(rows.size(), m.cols());
  for (size_t i = 0; i < rows.size(); ++i) out.row(i) = m.row(rows[i]);
  return out;
}

Eigen::VectorXd residual_norms(const DenseMatrix &source,
                               const DenseMatrix &target,
                               const DenseMatrix &q) {
  return (source * q - target).rowwise().norm();
}

double cosine_or_zero(double dot, double norm_a, double norm_b) {
  if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
  return dot / (norm_a * norm_b);
}

// k nearest shared neighbors of row `index` in `space`.
std::vector<std::string> nearest_shared(const VectorSpace &space,
                                        const std::string &word, int k,
                                        const std::vector<std::string> &shared) {
  const int index = *space.row_of(word);
  const Eigen::VectorXd dots = space.multiply(space.row(index));
  const Eigen::VectorXd norms = space.row_norms();
  std::vector<std::pair<double, const std::string *>> candidates;
  candidates.reserve(shared.size());
  for (const std::string &other : shared) {
    if (other == word) continue;
    const int j = *space.row_of(other);
    candidates.emplace_back(cosine_or_zero(dots[j], norms[index], norms[j]),
                            &other);
  }
  const size_t take = std::min(candidates.size(), static_cast<size_t>(k));
  std::partial_sort(candidates.begin(), candidates.begin() + take,
                    candidates.end(), [](const auto &x, const auto &y) {
                      if (x.first != y.first) return x.first > y.first;
                      return *x.second < *y.second;
                    });
  std::vector<std::string> neighbors;
  for (size_t i = 0; i < take; ++i) neighbors.push_back(*candidates[i].second);
  return neighbors;
}

}  // namespace

const char *align_method_tag(AlignMethod method) {
  switch (method) {
    case AlignMethod::kColumnIntersection: return "CI";
    case AlignMethod::kProcrustes: return "OP";
    case AlignMethod::kVectorInit: return "VI";
    case AlignMethod::kWordInjection: return "WI";
    case AlignMethod::kKnn: return "KNN";
  }
  return "?";
}

std::vector<std::string> shared_row_words(const VectorSpace &a,
                                          const VectorSpace &b) {
  std::vector<std::string> shared;
  for (const std::string &word : a.row_words()) {
    if (b.contains(word)) shared.push_back(word);
  }
  std::sort(shared.begin(), shared.end());
  return shared;
}

AlignedPair column_intersection(const VectorSpace &a, const VectorSpace &b) {
  if (!a.column_labels() || !b.column_labels() || !a.is_sparse() ||
      !b.is_sparse()) {
    throw ParameterError("column intersection needs labelled sparse spaces");
  }
  std::vector<std::string> cols_a = *a.column_labels();
  std::vector<std::string> cols_b = *b.column_labels();
  std::sort(cols_a.begin(), cols_a.end());
  std::sort(cols_b.begin(), cols_b.end());
  std::vector<std::string> shared_cols;
  std::set_intersection(cols_a.begin(), cols_a.end(), cols_b.begin(),
                        cols_b.end(), std::back_inserter(shared_cols));
  if (shared_cols.empty()) {
    throw AlignmentError("column intersection is empty");
  }

  AlignedPair pair;
  pair.method = AlignMethod::kColumnIntersection;
  pair.space_a = VectorSpace::make_sparse(a.kind(), a.row_words(),
                                          restrict_columns(a, shared_cols),
                                          shared_cols);
  pair.space_b = VectorSpace::make_sparse(b.kind(), b.row_words(),
                                          restrict_columns(b, shared_cols),
                                          shared_cols);
  pair.shared_rows = shared_row_words(a, b);
  if (pair.shared_rows.empty()) {
    throw AlignmentError("spaces share no row words");
  }
  return pair;
}

DenseMatrix procrustes_rotation(const DenseMatrix &source,
                                const DenseMatrix &target) {
  const Eigen::MatrixXd cross = source.transpose() * target;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(cross,
                                     Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

AlignedPair orthogonal_procrustes(const VectorSpace &a, const VectorSpace &b,
                                  const OpOptions &opts,
                                  const AnchorFrequencies &frequencies) {
  if (a.is_sparse() || b.is_sparse()) {
    throw ParameterError("orthogonal Procrustes needs dense spaces");
  }
  if (a.dims() != b.dims()) {
    throw ParameterError("orthogonal Procrustes needs equal dimensionality (" +
                         std::to_string(a.dims()) + " vs " +
                         std::to_string(b.dims()) + ")");
  }
  if (opts.noise_aware) {
    const auto &na = *opts.noise_aware;
    if (!(na.drop_fraction > 0.0 && na.drop_fraction < 0.5)) {
      throw ParameterError("noise-aware drop fraction must lie in (0, 0.5)");
    }
    if (na.max_rounds <= 0) {
      throw ParameterError("noise-aware max_rounds must be positive");
    }
  }

  const std::vector<std::string> candidates =
      select_anchors(a, b, opts.anchors, frequencies);
  if (candidates.empty()) throw AlignmentError("no anchor rows for Procrustes");
  if (static_cast<int>(candidates.size()) < a.dims()) {
    log_warning("procrustes: only " + std::to_string(candidates.size()) +
                " anchors for " + std::to_string(a.dims()) + " dimensions");
  }

  DenseMatrix source(candidates.size(), a.dims());
  DenseMatrix target(candidates.size(), b.dims());
  for (size_t i = 0; i < candidates.size(); ++i) {
    source.row(i) = a.dense().row(*a.row_of(candidates[i]));
    target.row(i) = b.dense().row(*b.row_of(candidates[i]));
  }
  preprocess(&source, opts.length_normalize, opts.mean_center);
  preprocess(&target, opts.length_normalize, opts.mean_center);

  const int n = static_cast<int>(candidates.size());
  std::vector<int> kept(n);
  std::iota(kept.begin(), kept.end(), 0);
  DenseMatrix q = procrustes_rotation(source, target);

  ProcrustesReport report;
  auto objective = [&](const std::vector<int> &rows) {
    return (gather(source, rows) * q - gather(target, rows)).squaredNorm();
  };
  report.round_objectives.push_back(objective(kept));

  if (opts.noise_aware) {
    const int drop = static_cast<int>(
        std::ceil(opts.noise_aware->drop_fraction * n));
    const int keep_count = std::max(1, n - drop);
    for (int round = 0; round < opts.noise_aware->max_rounds; ++round) {
      const Eigen::VectorXd residuals = residual_norms(source, target, q);
      std::vector<int> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return residuals[x] < residuals[y];
      });
      std::vector<int> next(order.begin(), order.begin() + keep_count);
      std::sort(next.begin(), next.end());
      if (next == kept) break;
      kept = std::move(next);
      q = procrustes_rotation(gather(source, kept), gather(target, kept));
      report.round_objectives.push_back(objective(kept));
      ++report.rounds;
    }
  }

  const Eigen::VectorXd final_residuals =
      residual_norms(gather(source, kept), gather(target, kept), q);
  for (size_t i = 0; i < kept.size(); ++i) {
    report.anchors.push_back(candidates[kept[i]]);
    report.anchor_residuals.push_back(final_residuals[i]);
  }

  AlignedPair pair;
  pair.method = AlignMethod::kProcrustes;
  pair.space_a = VectorSpace::make_dense(a.kind(), a.row_words(),
                                         a.dense() * q);
  pair.space_b = b.without_context();
  pair.shared_rows = shared_row_words(a, b);
  pair.transform = std::move(q);
  pair.report = std::move(report);
  return pair;
}

AlignedPair vector_initialization_align(const TokenizedCorpus &corpus_b,
                                        const VectorSpace &model_a,
                                        const Vocabulary &vocab_b,
                                        const SgnsHyperparameters &hyper,
                                        VectorInitMode mode) {
  if (model_a.kind() != SpaceKind::kSgns || model_a.is_sparse()) {
    throw ParameterError("vector initialization needs an sgns model");
  }
  if (model_a.dims() != hyper.dimension) {
    throw ParameterError("model dimension " + std::to_string(model_a.dims()) +
                         " differs from hyperparameter dimension " +
                         std::to_string(hyper.dimension));
  }
  if (mode == VectorInitMode::kFullModel && !model_a.context_matrix()) {
    throw ParameterError(
        "full-model initialization needs the context matrix of the first model");
  }
  const VectorSpace init = mode == VectorInitMode::kFullModel
                               ? model_a
                               : model_a.without_context();
  AlignedPair pair;
  pair.method = AlignMethod::kVectorInit;
  pair.space_a = model_a;
  pair.space_b = train_sgns(corpus_b, vocab_b, hyper, &init);
  pair.shared_rows = shared_row_words(pair.space_a, pair.space_b);
  if (pair.shared_rows.empty()) {
    throw AlignmentError("spaces share no row words");
  }
  return pair;
}

TokenizedCorpus word_injection_merge(const TokenizedCorpus &corpus_a,
                                     const TokenizedCorpus &corpus_b,
                                     const std::set<std::string> &targets,
                                     InjectionSide side) {
  if (targets.empty()) {
    throw ParameterError("word injection needs at least one target");
  }
  std::unordered_set<std::string> marked;
  for (const std::string &target : targets) {
    marked.insert(target + kInjectionSuffix);
  }
  for (const TokenizedCorpus *corpus : {&corpus_a, &corpus_b}) {
    for (const Sentence &sentence : corpus->sentences()) {
      for (const std::string &token : sentence.tokens) {
        if (marked.count(token)) {
          throw ParameterError("marked token '" + token +
                               "' already occurs in corpus " +
                               corpus->period_label());
        }
      }
    }
  }

  std::vector<Sentence> merged;
  merged.reserve(corpus_a.sentences().size() + corpus_b.sentences().size());
  auto append = [&](const TokenizedCorpus &corpus, bool mark) {
    for (Sentence sentence : corpus.sentences()) {
      if (mark) {
        for (std::string &token : sentence.tokens) {
          if (targets.count(token)) token += kInjectionSuffix;
        }
      }
      merged.push_back(std::move(sentence));
    }
  };
  append(corpus_a, side == InjectionSide::kMarkA);
  append(corpus_b, side == InjectionSide::kMarkB);

  const YearRange range{
      std::min(corpus_a.year_range().first, corpus_b.year_range().first),
      std::max(corpus_a.year_range().last, corpus_b.year_range().last)};
  return TokenizedCorpus(
      corpus_a.period_label() + "+" + corpus_b.period_label(), range,
      std::move(merged));
}

AlignedPair split_injected_space(const VectorSpace &merged,
                                 const std::set<std::string> &targets,
                                 InjectionSide side) {
  std::vector<std::string> plain;
  std::vector<std::string> marked;
  std::vector<std::string> marked_renamed;
  for (const std::string &target : targets) {
    if (merged.contains(target)) plain.push_back(target);
    if (merged.contains(target + kInjectionSuffix)) {
      marked.push_back(target + kInjectionSuffix);
      marked_renamed.push_back(target);
    }
  }
  VectorSpace plain_space = merged.select_rows(plain);
  VectorSpace marked_space =
      merged.select_rows(marked).rename_rows(std::move(marked_renamed));

  AlignedPair pair;
  pair.method = AlignMethod::kWordInjection;
  if (side == InjectionSide::kMarkB) {
    pair.space_a = std::move(plain_space);
    pair.space_b = std::move(marked_space);
  } else {
    pair.space_a = std::move(marked_space);
    pair.space_b = std::move(plain_space);
  }
  pair.shared_rows = shared_row_words(pair.space_a, pair.space_b);
  return pair;
}

SecondOrderVectors knn_local_neighborhood(const VectorSpace &a,
                                          const VectorSpace &b,
                                          const std::string &word, int k) {
  if (k <= 0) throw ParameterError("k must be positive");
  if (!a.contains(word) || !b.contains(word)) {
    throw MissingWordError("word '" + word + "' missing from one of the spaces");
  }
  const std::vector<std::string> shared = shared_row_words(a, b);
  std::vector<std::string> na = nearest_shared(a, word, k, shared);
  std::vector<std::string> nb = nearest_shared(b, word, k, shared);
  std::set<std::string> merged(na.begin(), na.end());
  merged.insert(nb.begin(), nb.end());

  SecondOrderVectors out;
  out.neighbors.assign(merged.begin(), merged.end());
  auto similarities = [&](const VectorSpace &space) {
    const Eigen::VectorXd center = space.row(word);
    const double center_norm = center.norm();
    Eigen::VectorXd sims(out.neighbors.size());
    for (size_t i = 0; i < out.neighbors.size(); ++i) {
      const Eigen::VectorXd other = space.row(out.neighbors[i]);
      sims[i] = cosine_or_zero(center.dot(other), center_norm, other.norm());
    }
    return sims;
  };
  out.in_a = similarities(a);
  out.in_b = similarities(b);
  return out;
}

}  // namespace lscd
