#ifndef LSCD_EVAL_H_
#define LSCD_EVAL_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lscd/measures.h"

namespace lscd {

// Gold degree of change per word; higher means more change.
struct GoldRanking {
  std::map<std::string, double> scores;
  std::string source_note;
};

enum class GoldOrientation { kChange, kRelatedness };

GoldOrientation parse_gold_orientation(std::string_view name);

// Reads "word<TAB>value" lines. Relatedness values are negated so that the
// stored score grows with the degree of change. Throws FormatError on
// duplicates, non-numeric values or an empty file.
GoldRanking load_gold(const std::string &path, GoldOrientation orientation);

struct EvalReport {
  double rho = 0.0;
  int n = 0;
  std::vector<std::string> missing_words;  // sorted
};

// Average (fractional) ranks, 1 = highest value.
std::vector<double> fractional_ranks(const std::vector<double> &values);

// Pearson correlation of the fractional ranks over the words present in
// both rankings. Throws EvaluationError with fewer than two common words and
// NumericalError when either side has zero rank variance.
EvalReport spearman(const ChangeRanking &predicted, const GoldRanking &gold);

// Ranking converted into a gold map, e.g. to evaluate two predictions
// against each other.
GoldRanking as_gold(const ChangeRanking &ranking);

struct LeaderboardEntry {
  std::string name;
  std::string space;
  std::string alignment;
  std::string measure;
  EvalReport report;
};

// Entries sorted by rho descending, ties by name.
std::vector<LeaderboardEntry> sort_leaderboard(
    std::vector<LeaderboardEntry> entries);

// Column-aligned plain-text table with rho to three decimals.
std::string format_leaderboard(const std::vector<LeaderboardEntry> &entries);
// Tab-separated twin with a header row.
std::string format_leaderboard_tsv(
    const std::vector<LeaderboardEntry> &entries);

}  // namespace lscd

#endif  // LSCD_EVAL_H_
