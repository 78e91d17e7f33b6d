#include <cmath>

#include "doctest.h"
#include "lscd/error.h"
#include "lscd/random.h"
#include "lscd/spaces.h"

using namespace lscd;

namespace {

// Sentences from two disjoint topics, so co-occurrence has structure to learn.
TokenizedCorpus topical_corpus(uint64_t seed, int sentences) {
  Rng rng(seed);
  std::vector<Sentence> out;
  for (int s = 0; s < sentences; ++s) {
    const int topic = static_cast<int>(rng.below(2));
    Sentence sentence{1900, {}};
    for (int i = 0; i < 8; ++i) {
      sentence.tokens.push_back("t" + std::to_string(topic) + "_" +
                                std::to_string(rng.below(10)));
    }
    out.push_back(std::move(sentence));
  }
  return TokenizedCorpus("t", {1900, 1900}, std::move(out));
}

SgnsHyperparameters small_hyper() {
  SgnsHyperparameters h;
  h.dimension = 16;
  h.window = 3;
  h.negative_samples = 3;
  h.epochs = 5;
  h.seed = 42;
  return h;
}

double cosine(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
  return a.dot(b) / (a.norm() * b.norm());
}

}  // namespace

TEST_CASE("output shapes") {
  const TokenizedCorpus c = topical_corpus(1, 50);
  const Vocabulary v = build_vocabulary(c, 1);
  const VectorSpace s = train_sgns(c, v, small_hyper());
  CHECK(s.kind() == SpaceKind::kSgns);
  CHECK_FALSE(s.is_sparse());
  CHECK(s.rows() == static_cast<int>(v.size()));
  CHECK(s.dims() == 16);
  REQUIRE(s.context_matrix());
  CHECK(s.context_matrix()->rows() == s.rows());
  CHECK(s.context_matrix()->cols() == 16);
  CHECK(s.row_words() == v.words());
}

TEST_CASE("bit-deterministic for a fixed seed") {
  const TokenizedCorpus c = topical_corpus(2, 100);
  const Vocabulary v = build_vocabulary(c, 1);
  SgnsHyperparameters h = small_hyper();
  const VectorSpace a = train_sgns(c, v, h);
  const VectorSpace b = train_sgns(c, v, h);
  CHECK(a.dense() == b.dense());
  CHECK(*a.context_matrix() == *b.context_matrix());
  h.seed = 43;
  CHECK_FALSE(train_sgns(c, v, h).dense() == a.dense());

  h.shuffle_sentences = true;
  CHECK(train_sgns(c, v, h).dense() == train_sgns(c, v, h).dense());
}

TEST_CASE("the objective improves from the first to the last epoch") {
  const TokenizedCorpus c = topical_corpus(3, 200);
  const Vocabulary v = build_vocabulary(c, 1);
  SgnsHyperparameters h = small_hyper();
  h.epochs = 8;
  SgnsTrace trace;
  train_sgns(c, v, h, nullptr, &trace);
  REQUIRE(trace.epoch_objective.size() == 8);
  CHECK(trace.pairs_per_epoch > 0);
  CHECK(trace.epoch_objective.back() > trace.epoch_objective.front());
}

TEST_CASE("training separates the two topics") {
  const TokenizedCorpus c = topical_corpus(4, 400);
  const Vocabulary v = build_vocabulary(c, 1);
  SgnsHyperparameters h = small_hyper();
  h.epochs = 10;
  const VectorSpace s = train_sgns(c, v, h);
  double within = 0.0;
  double across = 0.0;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      if (i == j) continue;
      const std::string a = "t0_" + std::to_string(i);
      within += cosine(s.row(a), s.row("t0_" + std::to_string(j)));
      across += cosine(s.row(a), s.row("t1_" + std::to_string(j)));
    }
  }
  CHECK(within > across);
}

TEST_CASE("initialization with zero epochs passes values through") {
  const TokenizedCorpus c = topical_corpus(5, 50);
  const Vocabulary v = build_vocabulary(c, 1);
  SgnsHyperparameters h = small_hyper();
  const VectorSpace init = train_sgns(c, v, h);
  h.epochs = 0;
  h.seed = 99;
  const VectorSpace copy = train_sgns(c, v, h, &init);
  CHECK(copy.dense() == init.dense());
  CHECK(*copy.context_matrix() == *init.context_matrix());

  // Word matrix only: context rows restart from zero.
  const VectorSpace words_only = init.without_context();
  const VectorSpace partial = train_sgns(c, v, h, &words_only);
  CHECK(partial.dense() == init.dense());
  CHECK(partial.context_matrix()->isZero(0.0));
}

TEST_CASE("rows absent from init start from seeded noise") {
  const TokenizedCorpus c = topical_corpus(6, 50);
  const Vocabulary v = build_vocabulary(c, 1);
  SgnsHyperparameters h = small_hyper();
  h.epochs = 0;
  DenseMatrix one(1, 16);
  one.setConstant(0.25);
  const VectorSpace init = VectorSpace::make_dense(
      SpaceKind::kSgns, {"t0_0", "not_in_vocab"},
      (DenseMatrix(2, 16) << one, one).finished());
  const VectorSpace s = train_sgns(c, v, h, &init);
  CHECK(s.row("t0_0") == one.row(0).transpose());
  const double bound = 0.5 / 16;
  CHECK(s.row("t1_0").cwiseAbs().maxCoeff() <= bound);
  CHECK(s.row("t1_0").cwiseAbs().maxCoeff() > 0.0);
  CHECK(s.context_matrix()->isZero(0.0));
}

TEST_CASE("parameter errors") {
  const TokenizedCorpus c = topical_corpus(7, 20);
  const Vocabulary v = build_vocabulary(c, 1);
  SgnsHyperparameters h = small_hyper();

  SUBCASE("vocabulary smaller than k + 1") {
    const TokenizedCorpus tiny("t", {1, 1}, {{1, {"a", "b"}}});
    h.negative_samples = 2;
    CHECK_THROWS_AS(train_sgns(tiny, build_vocabulary(tiny, 1), h), ParameterError);
  }
  SUBCASE("init dimension mismatch") {
    const VectorSpace init = VectorSpace::make_dense(
        SpaceKind::kSgns, {"t0_0"}, DenseMatrix::Zero(1, 4));
    CHECK_THROWS_AS(train_sgns(c, v, h, &init), ParameterError);
  }
  SUBCASE("init of the wrong kind") {
    const VectorSpace counts = build_count_matrix(c, v, 2);
    CHECK_THROWS_AS(train_sgns(c, v, h, &counts), ParameterError);
  }
  SUBCASE("non-positive hyperparameters") {
    h.dimension = 0;
    CHECK_THROWS_AS(validate(h), ParameterError);
    h = small_hyper();
    h.initial_learning_rate = 0.0;
    CHECK_THROWS_AS(validate(h), ParameterError);
    h = small_hyper();
    h.epochs = -1;
    CHECK_THROWS_AS(validate(h), ParameterError);
  }
}
