#ifndef LSCD_ALIGN_H_
#define LSCD_ALIGN_H_

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "lscd/corpus.h"
#include "lscd/spaces.h"
#include "lscd/vector_space.h"

namespace lscd {

enum class AlignMethod { kColumnIntersection, kProcrustes, kVectorInit,
                         kWordInjection, kKnn };

const char *align_method_tag(AlignMethod method);

// Diagnostics of an orthogonal Procrustes fit.
struct ProcrustesReport {
  std::vector<std::string> anchors;        // anchors of the final fit
  std::vector<double> round_objectives;    // sum of squared residuals per fit
  std::vector<double> anchor_residuals;    // final residual norm per anchor
  int rounds = 0;
};

// Two spaces in a shared coordinate system.
struct AlignedPair {
  VectorSpace space_a;
  VectorSpace space_b;
  std::vector<std::string> shared_rows;  // lexicographic
  AlignMethod method = AlignMethod::kProcrustes;
  std::optional<DenseMatrix> transform;   // Q, for Procrustes
  std::optional<ProcrustesReport> report;
};

// Restricts two sparse spaces to their shared context columns, ordered
// lexicographically. Throws AlignmentError when no column or no row is
// shared.
AlignedPair column_intersection(const VectorSpace &a, const VectorSpace &b);

struct AllShared {};
// The n shared words with the highest min(f_a, f_b) relative frequency.
struct TopFrequency {
  int n = 5000;
};
struct WordList {
  std::vector<std::string> words;
};
using AnchorPolicy = std::variant<AllShared, TopFrequency, WordList>;

struct NoiseAwareOptions {
  double drop_fraction = 0.15;
  int max_rounds = 5;
};

struct OpOptions {
  bool mean_center = true;
  bool length_normalize = true;
  AnchorPolicy anchors = AllShared{};
  std::optional<NoiseAwareOptions> noise_aware;
};

// Period vocabularies, needed only by the TopFrequency anchor policy.
struct AnchorFrequencies {
  const Vocabulary *vocab_a = nullptr;
  const Vocabulary *vocab_b = nullptr;
};

// Orthogonal Q minimizing ||A Q - B||_F over the anchor rows, from the SVD of
// A^T B. Mean centering and length normalization apply to the anchor rows
// used in the fit only; Q is then applied to every row of `a`. The
// noise-aware variant repeatedly refits on the anchors with the smallest
// residuals under the current Q, discarding drop_fraction of them, until the
// kept set stops changing or max_rounds is reached.
AlignedPair orthogonal_procrustes(const VectorSpace &a, const VectorSpace &b,
                                  const OpOptions &opts,
                                  const AnchorFrequencies &frequencies = {});

// Bare Procrustes solution for paired row matrices.
DenseMatrix procrustes_rotation(const DenseMatrix &source,
                                const DenseMatrix &target);

enum class VectorInitMode { kWordOnly, kFullModel };

// Trains the second-period space starting from `model_a`.
AlignedPair vector_initialization_align(const TokenizedCorpus &corpus_b,
                                        const VectorSpace &model_a,
                                        const Vocabulary &vocab_b,
                                        const SgnsHyperparameters &hyper,
                                        VectorInitMode mode);

enum class InjectionSide { kMarkB, kMarkA };

inline constexpr const char *kInjectionSuffix = "_";

// Concatenates both corpora, rewriting target occurrences on the marked side
// to "<word>_". Throws ParameterError on an empty target set or when a
// marked token already occurs in either corpus.
TokenizedCorpus word_injection_merge(const TokenizedCorpus &corpus_a,
                                     const TokenizedCorpus &corpus_b,
                                     const std::set<std::string> &targets,
                                     InjectionSide side = InjectionSide::kMarkB);

// Splits a space built on an injected corpus into a pair whose rows are the
// targets: the unmarked rows on one side, the marked rows (renamed back) on
// the other.
AlignedPair split_injected_space(const VectorSpace &merged,
                                 const std::set<std::string> &targets,
                                 InjectionSide side = InjectionSide::kMarkB);

struct SecondOrderVectors {
  std::vector<std::string> neighbors;  // lexicographic
  Eigen::VectorXd in_a;
  Eigen::VectorXd in_b;
};

// Union of the k nearest neighbors of `word` in each space (cosine, over the
// shared vocabulary, ties lexicographic) and the word's similarity to each
// of them in both spaces.
SecondOrderVectors knn_local_neighborhood(const VectorSpace &a,
                                          const VectorSpace &b,
                                          const std::string &word, int k);

// Rows present in both spaces, sorted.
std::vector<std::string> shared_row_words(const VectorSpace &a,
                                          const VectorSpace &b);

}  // namespace lscd

#endif  // LSCD_ALIGN_H_
