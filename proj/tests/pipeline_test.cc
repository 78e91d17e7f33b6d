#include "lscd/pipeline.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "lscd/error.h"
#include "lscd/log.h"
#include "synthetic.h"

using namespace lscd;
namespace fs = std::filesystem;

namespace {

const testing::SyntheticBenchmark &bench() {
  static const testing::SyntheticBenchmark b = testing::make_synthetic_benchmark(3, 1500);
  return b;
}

std::string scratch(const std::string &name) {
  const fs::path dir = fs::path(LSCD_TEST_TMP) / ("pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

PipelineConfig config_for(const std::string &dir, const ConfigMap &extra) {
  ConfigMap settings = parse_config_text(testing::write_benchmark_files(bench(), dir));
  for (const auto &[k, v] : extra) settings[k] = v;
  settings["output_dir"] = dir + "/out";
  return config_from_map(settings);
}

PipelineConfig in_memory(const ConfigMap &settings) {
  PipelineConfig c = config_from_map(settings);
  c.corpus_a.path = "unused";
  c.corpus_b.path = "unused";
  c.targets = "unused";
  return c;
}

std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const ConfigMap kSmallSgns = {{"space", "sgns"},          {"space.dimension", "20"},
                              {"space.epochs", "3"},      {"space.negative", "3"},
                              {"space.window", "4"}};

ConfigMap sgns_with(ConfigMap extra) {
  ConfigMap m = kSmallSgns;
  for (auto &[k, v] : extra) m[k] = v;
  return m;
}

std::vector<std::string> top(const ChangeRanking &r, size_t n) {
  std::vector<std::string> out;
  for (size_t i = 0; i < n && i < r.entries.size(); ++i) out.push_back(r.entries[i].word);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> changed_words() {
  std::vector<std::string> out(bench().targets.begin(),
                               bench().targets.begin() + testing::kChangedWords);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("count vectors with column intersection find the changed words") {
  const PipelineConfig c =
      in_memory({{"space", "count"}, {"alignment", "CI"}, {"space.window", "10"}});
  const PipelineResult r =
      execute_pipeline(c, bench().corpus_a, bench().corpus_b, bench().targets, &bench().gold);
  CHECK(r.ranking.entries.size() == bench().targets.size());
  CHECK(r.ranking.measure == MeasureKind::kCosine);
  CHECK(top(r.ranking, testing::kChangedWords) == changed_words());
  REQUIRE(r.report);
  CHECK(r.report->n == static_cast<int>(bench().targets.size()));
  CHECK(r.report->rho > 0.7);
  CHECK_FALSE(r.procrustes);
  CHECK_FALSE(r.timings.empty());
}

TEST_CASE("frequency baseline goes straight from the corpora") {
  const PipelineConfig c = in_memory({{"alignment", "none"}, {"measure", "FD"}});
  const PipelineResult r =
      execute_pipeline(c, bench().corpus_a, bench().corpus_b, bench().targets);
  CHECK(r.ranking.measure == MeasureKind::kFrequency);
  CHECK_FALSE(r.report);
  const ChangeRanking direct =
      rank_targets_by_frequency(bench().corpus_a, bench().corpus_b, bench().targets);
  REQUIRE(direct.entries.size() == r.ranking.entries.size());
  for (size_t i = 0; i < direct.entries.size(); ++i) {
    CHECK(direct.entries[i].word == r.ranking.entries[i].word);
    CHECK(direct.entries[i].score == r.ranking.entries[i].score);
  }
}

TEST_CASE("every alignment method runs end to end") {
  const std::vector<ConfigMap> configs = {
      {{"space", "ppmi"}, {"alignment", "CI"}},
      {{"space", "ppmi"}, {"alignment", "CI"}, {"space.tfidf_top_n", "20"}},
      {{"space", "ppmi"}, {"alignment", "WI"}},
      {{"space", "count"}, {"alignment", "WI"}, {"alignment.wi_mark", "a"}},
      {{"space", "ppmi"}, {"alignment", "CI"}, {"measure", "JSD"}},
      sgns_with({{"alignment", "OP"}}),
      sgns_with({{"alignment", "OP"}, {"alignment.noise_drop", "0.1"}}),
      sgns_with({{"alignment", "OP"}, {"binarize", "true"}}),
      sgns_with({{"alignment", "OP"}, {"alignment.anchors", "top_frequency"},
                 {"alignment.anchor_count", "30"}}),
      sgns_with({{"alignment", "OP"}, {"measure", "JSD"},
                 {"measure.negative_strategy", "shift"}}),
      sgns_with({{"alignment", "VI"}}),
      sgns_with({{"alignment", "VI"}, {"alignment.vi_mode", "word_only"}}),
      sgns_with({{"alignment", "KNN"}, {"alignment.knn_k", "5"}}),
      sgns_with({{"alignment", "OP"}, {"space.subsample", "0.01"}}),
  };
  for (const ConfigMap &settings : configs) {
    CAPTURE(format_config(settings));
    const PipelineResult r = execute_pipeline(in_memory(settings), bench().corpus_a,
                                              bench().corpus_b, bench().targets,
                                              &bench().gold);
    CHECK(r.ranking.entries.size() == bench().targets.size());
    CHECK(r.ranking.flagged().empty());
    REQUIRE(r.report);
    // Few epochs leave SGNS too noisy for a quality bar; count spaces are exact.
    if (settings.at("space") == "sgns") {
      CHECK(std::isfinite(r.report->rho));
    } else {
      CHECK(r.report->rho > 0.6);
    }
    const bool op = settings.at("alignment") == "OP";
    CHECK(r.procrustes.has_value() == op);
  }
}

TEST_CASE("measure options follow the alignment") {
  CHECK(measure_options(in_memory(sgns_with({{"alignment", "KNN"}}))).kind ==
        MeasureKind::kKnnCosine);
  const MeasureOptions jsd = measure_options(in_memory(
      sgns_with({{"alignment", "OP"}, {"measure", "JSD"}, {"measure.negative_strategy", "abs"}})));
  CHECK(jsd.kind == MeasureKind::kJensenShannon);
  CHECK(jsd.negative_strategy == NegativeStrategy::kAbs);
}

TEST_CASE("period seeds differ") {
  PipelineConfig c;
  c.seed = 10;
  CHECK(period_seed(c, 0) == 10);
  CHECK(period_seed(c, 1) == 11);
}

TEST_CASE("invalid combinations fail before any work") {
  const PipelineConfig c = in_memory({{"space", "sgns"}, {"alignment", "CI"}});
  try {
    execute_pipeline(c, bench().corpus_a, bench().corpus_b, bench().targets);
    FAIL("expected a ValidationError");
  } catch (const ValidationError &e) {
    CHECK(std::string(e.what()).find("space/alignment") != std::string::npos);
  }
  PipelineConfig bad = c;
  bad.corpus_a.path = "/nonexistent/a.txt";
  CHECK_THROWS_AS(run_pipeline(bad), ValidationError);
}

TEST_CASE("run_pipeline writes ranking, report, manifest and alignment") {
  const std::string dir = scratch("outputs");
  const PipelineConfig c =
      config_for(dir, sgns_with({{"alignment", "OP"}, {"name", "op-run"}}));
  const RunOutputs out = run_pipeline(c);
  CHECK(out.output_dir == dir + "/out");
  CHECK(fs::exists(out.ranking_path));
  CHECK(fs::exists(out.manifest_path));
  REQUIRE_FALSE(out.report_path.empty());

  const ChangeRanking ranking = read_ranking(out.ranking_path);
  CHECK(ranking.entries.size() == bench().targets.size());

  const LeaderboardEntry entry = read_report(out.report_path);
  CHECK(entry.name == "op-run");
  CHECK(entry.space == "SGNS");
  CHECK(entry.alignment == "OP");
  CHECK(entry.measure == "CD");
  CHECK(entry.report.rho == doctest::Approx(out.result.report->rho).epsilon(1e-12));

  const std::string alignment = slurp(dir + "/out/alignment.tsv");
  CHECK(alignment.rfind("anchor\tresidual\n", 0) == 0);

  const auto manifest = nlohmann::json::parse(slurp(out.manifest_path));
  CHECK(manifest["seed"] == c.seed);
  CHECK(manifest["config"]["alignment"] == "OP");
  CHECK(manifest["inputs"]["corpus_a"]["fnv1a64"] == file_checksum(c.corpus_a.path));
  CHECK(manifest["outputs"]["ranking_fnv1a64"] == file_checksum(out.ranking_path));
  CHECK(manifest["timings"].size() >= 4);
}

TEST_CASE("identical config and seed give byte-identical rankings") {
  for (const ConfigMap &settings :
       {ConfigMap{{"space", "ppmi"}, {"alignment", "CI"}}, sgns_with({{"alignment", "VI"}})}) {
    const std::string dir = scratch("determinism");
    PipelineConfig c = config_for(dir, settings);
    const std::string first = slurp(run_pipeline(c).ranking_path);
    c.output_dir = dir + "/again";
    CHECK(slurp(run_pipeline(c).ranking_path) == first);
  }
}

TEST_CASE("a manifest reproduces its run") {
  const std::string dir = scratch("manifest");
  const PipelineConfig c = config_for(dir, sgns_with({{"alignment", "OP"}, {"seed", "5"}}));
  const RunOutputs first = run_pipeline(c);

  PipelineConfig again = config_from_manifest(first.manifest_path);
  CHECK(config_to_map(again) == config_to_map(c));
  again.output_dir = dir + "/rerun";
  CHECK(slurp(run_pipeline(again).ranking_path) == slurp(first.ranking_path));

  std::ofstream(c.targets, std::ios::app) << "";
  {
    ScopedLogCapture capture;
    config_from_manifest(first.manifest_path);
    CHECK(capture.warnings().empty());
  }
  std::ofstream(c.corpus_b.path, std::ios::app) << "1900\textra line\n";
  ScopedLogCapture capture;
  config_from_manifest(first.manifest_path);
  CHECK(capture.warnings().size() == 1);
}

TEST_CASE("manifest and report format errors") {
  const std::string dir = scratch("formats");
  std::ofstream(dir + "/bad.json") << "{not json";
  CHECK_THROWS_AS(config_from_manifest(dir + "/bad.json"), FormatError);
  std::ofstream(dir + "/noconfig.json") << "{\"seed\": 1}";
  CHECK_THROWS_AS(config_from_manifest(dir + "/noconfig.json"), FormatError);
  std::ofstream(dir + "/report.json") << "{\"name\": \"x\"}";
  CHECK_THROWS_AS(read_report(dir + "/report.json"), FormatError);
  CHECK_THROWS_AS(config_from_manifest(dir + "/absent.json"), IoError);
}

TEST_CASE("missing inputs are I/O errors") {
  const std::string dir = scratch("missing");
  PipelineConfig c = config_for(dir, {{"space", "count"}, {"alignment", "CI"}});
  c.corpus_b.path = dir + "/nope.txt";
  CHECK_THROWS_AS(run_pipeline(c), IoError);
}

TEST_CASE("output directory resolution") {
  PipelineConfig c;
  c.name = "exp";
  c.output_dir = "/tmp/explicit";
  CHECK(resolve_output_dir(c) == "/tmp/explicit");
  c.output_dir.clear();
  ::setenv("LSCD_OUTPUT_DIR", "/tmp/from-env", 1);
  CHECK(resolve_output_dir(c) == "/tmp/from-env");
  ::unsetenv("LSCD_OUTPUT_DIR");
  CHECK(resolve_output_dir(c) == "lscd-runs/exp");
}

TEST_CASE("file_checksum is FNV-1a 64") {
  const std::string dir = scratch("checksum");
  std::ofstream(dir + "/empty");
  std::ofstream(dir + "/a") << "a";
  CHECK(file_checksum(dir + "/empty") == "cbf29ce484222325");
  CHECK(file_checksum(dir + "/a") == "af63dc4c8601ec8c");
}
