#include "lscd/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>

#include "lscd/error.h"

namespace lscd {

GoldOrientation parse_gold_orientation(std::string_view name) {
  if (name == "change") return GoldOrientation::kChange;
  if (name == "relatedness") return GoldOrientation::kRelatedness;
  throw ParameterError("unknown gold orientation '" + std::string(name) + "'");
}

GoldRanking load_gold(const std::string &path, GoldOrientation orientation) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  GoldRanking gold;
  gold.source_note = path;
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(line_number);
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError(where + ": missing tab");
    const std::string word = line.substr(0, tab);
    const std::string value = line.substr(tab + 1);
    char *end = nullptr;
    const double score = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0' || !std::isfinite(score)) {
      throw FormatError(where + ": non-numeric value '" + value + "'");
    }
    const double stored =
        orientation == GoldOrientation::kRelatedness ? -score : score;
    if (!gold.scores.emplace(word, stored).second) {
      throw FormatError(where + ": duplicate word '" + word + "'");
    }
  }
  if (gold.scores.empty()) throw FormatError(path + ": no gold entries");
  return gold;
}

std::vector<double> fractional_ranks(const std::vector<double> &values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] > values[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share the mean of ranks i+1..j+1.
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

EvalReport spearman(const ChangeRanking &predicted, const GoldRanking &gold) {
  std::vector<double> x;
  std::vector<double> y;
  std::set<std::string> predicted_words;
  EvalReport report;
  for (const RankedWord &entry : predicted.entries) {
    predicted_words.insert(entry.word);
    auto it = gold.scores.find(entry.word);
    if (it == gold.scores.end()) {
      report.missing_words.push_back(entry.word);
      continue;
    }
    x.push_back(entry.score);
    y.push_back(it->second);
  }
  for (const auto &[word, score] : gold.scores) {
    if (!predicted_words.count(word)) report.missing_words.push_back(word);
  }
  std::sort(report.missing_words.begin(), report.missing_words.end());

  report.n = static_cast<int>(x.size());
  if (report.n < 2) {
    throw EvaluationError("need at least two words shared with the gold "
                          "ranking, found " + std::to_string(report.n));
  }
  const std::vector<double> rx = fractional_ranks(x);
  const std::vector<double> ry = fractional_ranks(y);
  const double mean = (report.n + 1) / 2.0;  // mean of any rank vector
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (int i = 0; i < report.n; ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw NumericalError("Spearman correlation undefined: zero rank variance");
  }
  report.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  return report;
}

GoldRanking as_gold(const ChangeRanking &ranking) {
  GoldRanking gold;
  for (const RankedWord &entry : ranking.entries) {
    gold.scores.emplace(entry.word, entry.score);
  }
  gold.source_note = "ranking";
  return gold;
}

std::vector<LeaderboardEntry> sort_leaderboard(
    std::vector<LeaderboardEntry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const LeaderboardEntry &a, const LeaderboardEntry &b) {
              if (a.report.rho != b.report.rho) {
                return a.report.rho > b.report.rho;
              }
              return a.name < b.name;
            });
  return entries;
}

namespace {

std::string format_rho(double rho) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.3f", rho);
  return buffer;
}

}  // namespace

std::string format_leaderboard(const std::vector<LeaderboardEntry> &entries) {
  const std::vector<LeaderboardEntry> sorted = sort_leaderboard(entries);
  std::vector<std::vector<std::string>> rows = {
      {"Name", "Space", "Align", "Measure", "Spearman"}};
  for (const LeaderboardEntry &e : sorted) {
    rows.push_back({e.name, e.space.empty() ? "-" : e.space,
                    e.alignment.empty() ? "-" : e.alignment,
                    e.measure.empty() ? "-" : e.measure,
                    format_rho(e.report.rho)});
  }
  std::vector<size_t> widths(5, 0);
  for (const auto &row : rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  std::string out;
  for (const auto &row : rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += "  ";
      // Right-align the score column.
      const std::string pad(widths[c] - row[c].size(), ' ');
      out += c + 1 == row.size() ? pad + row[c] : row[c] + pad;
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  }
  return out;
}

std::string format_leaderboard_tsv(
    const std::vector<LeaderboardEntry> &entries) {
  std::string out = "name\tspace\talign\tmeasure\tspearman\tn\n";
  for (const LeaderboardEntry &e : sort_leaderboard(entries)) {
    out += e.name + '\t' + e.space + '\t' + e.alignment + '\t' + e.measure +
           '\t' + format_rho(e.report.rho) + '\t' +
           std::to_string(e.report.n) + '\n';
  }
  return out;
}

}  // namespace lscd
