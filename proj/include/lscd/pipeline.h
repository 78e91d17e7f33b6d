#ifndef LSCD_PIPELINE_H_
#define LSCD_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lscd/align.h"
#include "lscd/config.h"
#include "lscd/corpus.h"
#include "lscd/eval.h"
#include "lscd/measures.h"
#include "lscd/spaces.h"

namespace lscd {

// One period after preprocessing: the corpus the space was trained on, its
// vocabulary and the space itself.
struct PeriodModel {
  TokenizedCorpus corpus;
  Vocabulary vocab;
  VectorSpace space;
};

// Seed used for everything random in period a; period b uses seed + 1.
uint64_t period_seed(const PipelineConfig &config, int period);

// Count, PPMI (optionally tf-idf masked) or SGNS space of one period.
PeriodModel build_period_model(const TokenizedCorpus &corpus,
                               const PipelineConfig &config, int period);

// Aligns two period models per config.alignment (CI, OP, VI or KNN). VI
// retrains period b from a, so `b.space` is ignored in that case. Word
// injection works on corpora and goes through align_by_injection.
AlignedPair align_period_models(const PeriodModel &a, const PeriodModel &b,
                                const PipelineConfig &config);

AlignedPair align_by_injection(const TokenizedCorpus &corpus_a,
                               const TokenizedCorpus &corpus_b,
                               const std::vector<std::string> &targets,
                               const PipelineConfig &config);

MeasureOptions measure_options(const PipelineConfig &config);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct PipelineResult {
  ChangeRanking ranking;
  std::optional<EvalReport> report;
  std::optional<ProcrustesReport> procrustes;
  std::vector<StageTiming> timings;
};

// In-memory run on already loaded inputs. Throws ValidationError when the
// configuration is not runnable; paths in `config` are ignored.
PipelineResult execute_pipeline(const PipelineConfig &config,
                                const TokenizedCorpus &corpus_a,
                                const TokenizedCorpus &corpus_b,
                                const std::vector<std::string> &targets,
                                const GoldRanking *gold = nullptr);

struct RunOutputs {
  PipelineResult result;
  std::string output_dir;
  std::string ranking_path;
  std::string report_path;  // empty without gold
  std::string manifest_path;
};

// Output directory: config.output_dir, else $LSCD_OUTPUT_DIR, else
// "lscd-runs/<name>".
std::string resolve_output_dir(const PipelineConfig &config);

// Validates, loads the files named in `config`, runs and writes ranking.tsv,
// report.json (with gold), alignment.tsv (Procrustes only) and
// manifest.json into the output directory.
RunOutputs run_pipeline(const PipelineConfig &config);

// 64-bit FNV-1a of a file's bytes as 16 hex digits.
std::string file_checksum(const std::string &path);

// Configuration recorded in a manifest written by run_pipeline.
PipelineConfig config_from_manifest(const std::string &path);

// Report JSON as written by run_pipeline, as a leaderboard row.
LeaderboardEntry read_report(const std::string &path);

}  // namespace lscd

#endif  // LSCD_PIPELINE_H_
