#include "lscd/corpus.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "doctest.h"
#include "lscd/error.h"
#include "lscd/log.h"
#include "lscd/random.h"

using namespace lscd;

namespace {

const YearRange kAll{-100000, 100000};

TokenizedCorpus random_corpus(uint64_t seed, int sentences) {
  Rng rng(seed);
  std::vector<Sentence> out;
  for (int s = 0; s < sentences; ++s) {
    Sentence sentence{1700 + static_cast<int>(rng.below(200)), {}};
    const int length = 1 + static_cast<int>(rng.below(15));
    for (int i = 0; i < length; ++i) {
      const int id = static_cast<int>(40.0 * rng.uniform() * rng.uniform());
      sentence.tokens.push_back("w" + std::to_string(id));
    }
    out.push_back(std::move(sentence));
  }
  return TokenizedCorpus("t", {1700, 1899}, std::move(out));
}

std::string temp_path(const std::string &name) {
  std::filesystem::create_directories(LSCD_TEST_TMP);
  return std::string(LSCD_TEST_TMP) + "/corpus_test_" + name;
}

}  // namespace

TEST_CASE("parse_corpus reads year, tab and lemmas") {
  const TokenizedCorpus c =
      parse_corpus("1755\tder Hund bellen\n", {1750, 1799}, "t1");
  REQUIRE(c.sentences().size() == 1);
  CHECK(c.sentences()[0].year == 1755);
  CHECK(c.sentences()[0].tokens ==
        std::vector<std::string>{"der", "Hund", "bellen"});
  CHECK(c.token_total() == 3);
  CHECK(c.period_label() == "t1");
}

TEST_CASE("out-of-range sentences are skipped") {
  const TokenizedCorpus c =
      parse_corpus("1820\ta b\n1760\tc\n", {1750, 1799}, "t1");
  REQUIRE(c.sentences().size() == 1);
  CHECK(c.sentences()[0].tokens == std::vector<std::string>{"c"});
}

TEST_CASE("malformed lines name their line number") {
  try {
    parse_corpus("1755\ta\n1755 der Hund\n", kAll, "t", "toy.txt");
    FAIL("expected a FormatError");
  } catch (const FormatError &e) {
    CHECK(std::string(e.what()).find("toy.txt:2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_corpus("17x5\ta\n", kAll, "t"), FormatError);
  CHECK_THROWS_AS(parse_corpus("\ta\n", kAll, "t"), FormatError);
}

TEST_CASE("a year without tokens is skipped with a warning") {
  ScopedLogCapture capture;
  const TokenizedCorpus c = parse_corpus("1755\t\n1756\tx\n", kAll, "t");
  CHECK(c.sentences().size() == 1);
  CHECK(capture.warnings().size() == 1);
}

TEST_CASE("CRLF endings, blank lines and repeated spaces are tolerated") {
  const TokenizedCorpus c = parse_corpus("1755\ta  b \r\n\n1756\tc\r\n", kAll, "t");
  REQUIRE(c.sentences().size() == 2);
  CHECK(c.sentences()[0].tokens == std::vector<std::string>{"a", "b"});
}

TEST_CASE("tokens are verbatim") {
  const TokenizedCorpus c = parse_corpus("1800\tHund hund HUND\n", kAll, "t");
  CHECK(count_words(c).size() == 3);
}

TEST_CASE("load_corpus round-trips through save_corpus") {
  const TokenizedCorpus c = random_corpus(1, 50);
  const std::string path = temp_path("roundtrip.txt");
  save_corpus(c, path);
  CHECK(load_corpus(path, {1700, 1899}, "t") == c);
  CHECK_THROWS_AS(load_corpus(temp_path("missing.txt"), kAll, "t"), IoError);
}

TEST_CASE("TokenizedCorpus enforces its invariants") {
  CHECK_THROWS_AS(TokenizedCorpus("t", {1800, 1850}, {{1900, {"a"}}}),
                  ParameterError);
  CHECK_THROWS_AS(TokenizedCorpus("t", {1800, 1850}, {{1800, {}}}),
                  ParameterError);
  const TokenizedCorpus c("t", {1800, 1850}, {{1800, {"a", "b"}}, {1810, {"c"}}});
  CHECK(c.token_total() == 3);
}

TEST_CASE("restricting twice equals restricting to the intersection") {
  const TokenizedCorpus c = random_corpus(2, 300);
  for (const auto &[r1, r2] : std::vector<std::pair<YearRange, YearRange>>{
           {{1700, 1800}, {1750, 1850}},
           {{1720, 1730}, {1700, 1899}},
           {{1700, 1750}, {1800, 1850}}}) {
    const YearRange both{std::max(r1.first, r2.first), std::min(r1.last, r2.last)};
    const TokenizedCorpus twice = restrict_years(restrict_years(c, r1), r2);
    const TokenizedCorpus once = restrict_years(c, both);
    CHECK(twice.sentences() == once.sentences());
  }
}

TEST_CASE("parse_year_range") {
  CHECK(parse_year_range("1750-1799") == YearRange{1750, 1799});
  CHECK(parse_year_range("1750:1799") == YearRange{1750, 1799});
  CHECK_THROWS_AS(parse_year_range("1799-1750"), ParameterError);
  CHECK_THROWS_AS(parse_year_range("17x0-1799"), ParameterError);
}

TEST_CASE("build_vocabulary filters by count and orders ids") {
  const TokenizedCorpus c("t", kAll, {{1, {"a", "a", "b", "a"}}, {1, {"a", "a"}}});
  const Vocabulary filtered = build_vocabulary(c, 2);
  CHECK(filtered.words() == std::vector<std::string>{"a"});
  CHECK(filtered.total_tokens() == 6);
  CHECK(filtered.count("a") == 5);
  CHECK(filtered.count("b") == 0);
  const Vocabulary all = build_vocabulary(c, 1);
  CHECK(all.words() == std::vector<std::string>{"a", "b"});
  CHECK(*all.id("b") == 1);
  CHECK_FALSE(all.id("z").has_value());

  const Vocabulary empty = build_vocabulary(TokenizedCorpus(), 1);
  CHECK(empty.empty());
  CHECK(empty.total_tokens() == 0);
}

TEST_CASE("vocabulary ids: count descending then lexicographic, brute force") {
  const TokenizedCorpus c = random_corpus(3, 200);
  std::map<std::string, uint64_t> counts;
  for (const Sentence &s : c.sentences()) {
    for (const std::string &t : s.tokens) ++counts[t];
  }
  std::vector<std::pair<std::string, uint64_t>> expected(counts.begin(),
                                                         counts.end());
  std::stable_sort(expected.begin(), expected.end(),
                   [](const auto &x, const auto &y) { return x.second > y.second; });
  const Vocabulary v = build_vocabulary(c, 1);
  REQUIRE(v.size() == expected.size());
  for (size_t i = 0; i < expected.size(); ++i) {
    CHECK(v.word(static_cast<int>(i)) == expected[i].first);
    CHECK(v.count(static_cast<int>(i)) == expected[i].second);
  }

  // Same multiset in a different order gives the same ids.
  std::vector<Sentence> reversed = c.sentences();
  std::reverse(reversed.begin(), reversed.end());
  const Vocabulary v2 =
      build_vocabulary(TokenizedCorpus("t", c.year_range(), reversed), 1);
  CHECK(v2.words() == v.words());
}

TEST_CASE("subsample") {
  const TokenizedCorpus c = random_corpus(4, 400);
  const Vocabulary v = build_vocabulary(c, 1);

  SUBCASE("none is the identity") {
    CHECK(subsample(c, v, std::nullopt, 1) == c);
  }
  SUBCASE("deterministic per seed") {
    CHECK(subsample(c, v, 0.01, 9) == subsample(c, v, 0.01, 9));
    CHECK_FALSE(subsample(c, v, 0.01, 9) == subsample(c, v, 0.01, 10));
  }
  SUBCASE("rare words are always kept") {
    const double threshold = 0.02;
    const TokenizedCorpus s = subsample(c, v, threshold, 3);
    const WordCounts before = count_words(c);
    const WordCounts after = count_words(s);
    for (const auto &[word, n] : before) {
      const double f = static_cast<double>(n) / c.token_total();
      if (f <= threshold) CHECK(after.at(word) == n);
    }
    CHECK(s.token_total() < c.token_total());
  }
  SUBCASE("drop rate follows 1 - sqrt(t/f)") {
    // One dominant word: f = 0.9, keep probability sqrt(0.01 / 0.9).
    std::vector<Sentence> sentences;
    for (int i = 0; i < 2000; ++i) {
      sentences.push_back({1, {"x", "x", "x", "x", "x", "x", "x", "x", "x",
                               "y" + std::to_string(i % 500)}});
    }
    const TokenizedCorpus big("t", kAll, sentences);
    const TokenizedCorpus s = subsample(big, build_vocabulary(big, 1), 0.01, 5);
    const double kept = static_cast<double>(count_word(s, "x")) / 18000.0;
    CHECK(kept == doctest::Approx(std::sqrt(0.01 / 0.9)).epsilon(0.1));
  }
  SUBCASE("threshold outside (0, 1)") {
    CHECK_THROWS_AS(subsample(c, v, 0.0, 1), ParameterError);
    CHECK_THROWS_AS(subsample(c, v, 1.0, 1), ParameterError);
  }
}

TEST_CASE("normalized_frequency") {
  const TokenizedCorpus c("t", kAll, {{1, {"a", "b", "a", "c", "d"}},
                                      {1, {"e", "f", "g", "h", "i"}}});
  CHECK(normalized_frequency(c, "a") == doctest::Approx(0.2));
  CHECK(normalized_frequency(c, "zzz") == 0.0);
  CHECK(normalized_frequency(TokenizedCorpus("t", kAll, {{1, {"x"}}}), "x") ==
        1.0);
  CHECK_THROWS_AS(normalized_frequency(TokenizedCorpus(), "x"), NumericalError);

  const TokenizedCorpus r = random_corpus(5, 100);
  double sum = 0.0;
  for (const auto &[word, n] : count_words(r)) {
    const double f = normalized_frequency(r, word);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    sum += f;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("shuffle_sentences permutes deterministically") {
  const TokenizedCorpus c = random_corpus(6, 100);
  const TokenizedCorpus s = shuffle_sentences(c, 1);
  CHECK(s == shuffle_sentences(c, 1));
  CHECK_FALSE(s.sentences() == c.sentences());
  CHECK(count_words(s) == count_words(c));
}

TEST_CASE("load_word_list") {
  const std::string path = temp_path("words.txt");
  {
    std::ofstream out(path);
    out << "alpha\n\n  beta \r\ngamma\n";
  }
  CHECK(load_word_list(path) == std::vector<std::string>{"alpha", "beta", "gamma"});
  {
    std::ofstream out(path);
    out << "alpha\nalpha\n";
  }
  CHECK_THROWS_AS(load_word_list(path), FormatError);
}
