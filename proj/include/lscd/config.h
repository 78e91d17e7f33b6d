#ifndef LSCD_CONFIG_H_
#define LSCD_CONFIG_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lscd/align.h"
#include "lscd/corpus.h"
#include "lscd/eval.h"
#include "lscd/measures.h"
#include "lscd/spaces.h"

namespace lscd {

struct CorpusSource {
  std::string path;
  YearRange years{-1000000, 1000000};
  std::string label;
};

enum class AnchorChoice { kAllShared, kTopFrequency, kWordList };

// One experiment: corpus -> space -> alignment -> measure -> evaluation.
struct PipelineConfig {
  std::string name = "run";
  CorpusSource corpus_a{"", {-1000000, 1000000}, "t1"};
  CorpusSource corpus_b{"", {-1000000, 1000000}, "t2"};
  std::string targets;
  std::string gold;
  GoldOrientation gold_orientation = GoldOrientation::kChange;
  uint64_t min_count = 1;

  SpaceKind space = SpaceKind::kCount;
  int window = 10;
  double shift_k = 1.0;
  double smoothing = 0.75;
  std::optional<int> tfidf_top_n;
  SgnsHyperparameters sgns;  // window and seed mirror the fields above
  std::optional<double> subsample;

  std::optional<AlignMethod> alignment;  // empty means none
  bool mean_center = true;
  bool length_normalize = true;
  AnchorChoice anchors = AnchorChoice::kAllShared;
  int anchor_count = 5000;
  std::string anchor_file;
  std::optional<NoiseAwareOptions> noise_aware;
  VectorInitMode vi_mode = VectorInitMode::kFullModel;
  InjectionSide wi_side = InjectionSide::kMarkB;
  int knn_k = 10;

  MeasureKind measure = MeasureKind::kCosine;
  NegativeStrategy negative_strategy = NegativeStrategy::kClip;
  bool binarize = false;
  BinarizeThreshold binarize_threshold = BinarizeThreshold::kColumnMean;

  uint64_t seed = 1;
  int workers = 1;
  std::string output_dir;
};

// Ordered key -> value settings as written in a config file.
using ConfigMap = std::map<std::string, std::string>;

// All recognized keys, in documentation order.
const std::vector<std::string> &config_keys();

// Parses "key = value" lines; '#' starts a comment. Throws ValidationError
// on malformed lines.
ConfigMap parse_config_text(std::string_view text,
                            const std::string &source = "<config>");
ConfigMap load_config_file(const std::string &path);

// Applies settings over `config`. Throws ValidationError on unknown keys and
// unparsable values.
void apply_config(const ConfigMap &settings, PipelineConfig *config);
PipelineConfig config_from_map(const ConfigMap &settings);

// Canonical settings for every key, suitable for a manifest or a config
// file that reproduces the run.
ConfigMap config_to_map(const PipelineConfig &config);
std::string format_config(const ConfigMap &settings);

// Compatibility and range checks. Each violation names the fields involved,
// e.g. "measure/alignment: ...". Empty iff the configuration is runnable.
std::vector<std::string> validate_config(const PipelineConfig &config);

}  // namespace lscd

#endif  // LSCD_CONFIG_H_
