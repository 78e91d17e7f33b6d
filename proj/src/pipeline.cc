#include "lscd/pipeline.h"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "json.hpp"
#include "lscd/error.h"
#include "lscd/log.h"

namespace lscd {
namespace {

using Json = nlohmann::json;
using Clock = std::chrono::steady_clock;

class StageTimer {
 public:
  explicit StageTimer(std::vector<StageTiming> *timings) : timings_(timings) {}

  template <typename F>
  auto run(const std::string &stage, F &&body) {
    const auto start = Clock::now();
    struct Record {
      std::vector<StageTiming> *timings;
      std::string stage;
      Clock::time_point start;
      ~Record() {
        timings->push_back(
            {stage, std::chrono::duration<double>(Clock::now() - start).count()});
      }
    } record{timings_, stage, start};
    log_info("stage " + stage);
    return body();
  }

 private:
  std::vector<StageTiming> *timings_;
};

const char *space_tag(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::kCount: return "CNT";
    case SpaceKind::kPpmi: return "PPMI";
    case SpaceKind::kSgns: return "SGNS";
  }
  return "?";
}

SgnsHyperparameters period_hyper(const PipelineConfig &config, int period) {
  SgnsHyperparameters hyper = config.sgns;
  hyper.window = config.window;
  hyper.seed = period_seed(config, period);
  return hyper;
}

// Corpus and vocabulary of a period, before any space is built.
PeriodModel prepare_period(const TokenizedCorpus &corpus,
                           const PipelineConfig &config, int period) {
  PeriodModel model;
  model.vocab = build_vocabulary(corpus, config.min_count);
  if (model.vocab.empty()) {
    throw ParameterError("period " + corpus.period_label() +
                         " has no word with count >= " +
                         std::to_string(config.min_count));
  }
  model.corpus = config.space == SpaceKind::kSgns
                     ? subsample(corpus, model.vocab, config.subsample,
                                 period_seed(config, period))
                     : corpus;
  return model;
}

VectorSpace build_space(const PeriodModel &model, const PipelineConfig &config,
                        int period) {
  if (config.space == SpaceKind::kSgns) {
    return train_sgns(model.corpus, model.vocab, period_hyper(config, period));
  }
  VectorSpace counts = build_count_matrix(model.corpus, model.vocab,
                                          config.window, config.workers);
  if (config.space == SpaceKind::kCount) return counts;
  if (config.tfidf_top_n) {
    counts = mask_contexts(
        counts, tfidf_select_contexts(model.corpus, model.vocab,
                                      *config.tfidf_top_n));
  }
  return ppmi_transform(counts, config.shift_k, config.smoothing);
}

std::string hex64(uint64_t value) {
  char buffer[24];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(value));
  return buffer;
}

void write_text(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("error writing " + path);
}

Json read_json(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception &e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace

uint64_t period_seed(const PipelineConfig &config, int period) {
  return config.seed + static_cast<uint64_t>(period);
}

PeriodModel build_period_model(const TokenizedCorpus &corpus,
                               const PipelineConfig &config, int period) {
  PeriodModel model = prepare_period(corpus, config, period);
  model.space = build_space(model, config, period);
  return model;
}

AlignedPair align_period_models(const PeriodModel &a, const PeriodModel &b,
                                const PipelineConfig &config) {
  if (!config.alignment) throw ParameterError("no alignment method configured");
  switch (*config.alignment) {
    case AlignMethod::kColumnIntersection:
      return column_intersection(a.space, b.space);
    case AlignMethod::kProcrustes: {
      OpOptions opts;
      opts.mean_center = config.mean_center;
      opts.length_normalize = config.length_normalize;
      opts.noise_aware = config.noise_aware;
      switch (config.anchors) {
        case AnchorChoice::kAllShared: opts.anchors = AllShared{}; break;
        case AnchorChoice::kTopFrequency:
          opts.anchors = TopFrequency{config.anchor_count};
          break;
        case AnchorChoice::kWordList:
          opts.anchors = WordList{load_word_list(config.anchor_file)};
          break;
      }
      return orthogonal_procrustes(a.space, b.space, opts, {&a.vocab, &b.vocab});
    }
    case AlignMethod::kVectorInit:
      return vector_initialization_align(b.corpus, a.space, b.vocab,
                                         period_hyper(config, 1),
                                         config.vi_mode);
    case AlignMethod::kKnn: {
      AlignedPair pair;
      pair.method = AlignMethod::kKnn;
      pair.space_a = a.space;
      pair.space_b = b.space;
      pair.shared_rows = shared_row_words(a.space, b.space);
      if (pair.shared_rows.empty()) {
        throw AlignmentError("spaces share no row words");
      }
      return pair;
    }
    case AlignMethod::kWordInjection:
      throw ParameterError("word injection aligns corpora, not spaces");
  }
  throw ParameterError("unknown alignment method");
}

AlignedPair align_by_injection(const TokenizedCorpus &corpus_a,
                               const TokenizedCorpus &corpus_b,
                               const std::vector<std::string> &targets,
                               const PipelineConfig &config) {
  const std::set<std::string> target_set(targets.begin(), targets.end());
  const TokenizedCorpus merged =
      word_injection_merge(corpus_a, corpus_b, target_set, config.wi_side);
  const PeriodModel model = build_period_model(merged, config, 0);
  return split_injected_space(model.space, target_set, config.wi_side);
}

MeasureOptions measure_options(const PipelineConfig &config) {
  MeasureOptions options;
  options.kind = config.alignment == AlignMethod::kKnn ? MeasureKind::kKnnCosine
                                                       : config.measure;
  options.negative_strategy = config.negative_strategy;
  options.knn_k = config.knn_k;
  return options;
}

PipelineResult execute_pipeline(const PipelineConfig &config,
                                const TokenizedCorpus &corpus_a,
                                const TokenizedCorpus &corpus_b,
                                const std::vector<std::string> &targets,
                                const GoldRanking *gold) {
  const std::vector<std::string> violations = validate_config(config);
  if (!violations.empty()) {
    std::string message = "invalid configuration:";
    for (const std::string &v : violations) message += "\n  " + v;
    throw ValidationError(message);
  }
  PipelineResult result;
  StageTimer timer(&result.timings);

  if (config.measure == MeasureKind::kFrequency) {
    result.ranking = timer.run("measure", [&] {
      return rank_targets_by_frequency(corpus_a, corpus_b, targets);
    });
  } else {
    AlignedPair pair;
    if (config.alignment == AlignMethod::kWordInjection) {
      pair = timer.run("space+align", [&] {
        return align_by_injection(corpus_a, corpus_b, targets, config);
      });
    } else {
      const PeriodModel a = timer.run(
          "space_a", [&] { return build_period_model(corpus_a, config, 0); });
      const PeriodModel b = timer.run("space_b", [&] {
        return config.alignment == AlignMethod::kVectorInit
                   ? prepare_period(corpus_b, config, 1)
                   : build_period_model(corpus_b, config, 1);
      });
      pair = timer.run("align", [&] { return align_period_models(a, b, config); });
    }
    if (config.binarize) {
      timer.run("binarize", [&] {
        pair.space_a = lscd::binarize(pair.space_a, config.binarize_threshold);
        pair.space_b = lscd::binarize(pair.space_b, config.binarize_threshold);
        return 0;
      });
    }
    result.procrustes = pair.report;
    result.ranking = timer.run("measure", [&] {
      return rank_targets(pair, measure_options(config), targets);
    });
  }

  if (gold) {
    result.report = timer.run("evaluate", [&] { return spearman(result.ranking, *gold); });
  }
  return result;
}

std::string resolve_output_dir(const PipelineConfig &config) {
  if (!config.output_dir.empty()) return config.output_dir;
  if (const char *env = std::getenv("LSCD_OUTPUT_DIR"); env && *env) {
    return env;
  }
  return "lscd-runs/" + config.name;
}

std::string file_checksum(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  uint64_t hash = 0xcbf29ce484222325ULL;
  char buffer[1 << 16];
  while (in) {
    in.read(buffer, sizeof(buffer));
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  return hex64(hash);
}

RunOutputs run_pipeline(const PipelineConfig &config) {
  const std::vector<std::string> violations = validate_config(config);
  if (!violations.empty()) {
    std::string message = "invalid configuration:";
    for (const std::string &v : violations) message += "\n  " + v;
    throw ValidationError(message);
  }

  std::vector<StageTiming> load_timings;
  StageTimer timer(&load_timings);
  const TokenizedCorpus corpus_a = timer.run("load_a", [&] {
    return load_corpus(config.corpus_a.path, config.corpus_a.years,
                       config.corpus_a.label);
  });
  const TokenizedCorpus corpus_b = timer.run("load_b", [&] {
    return load_corpus(config.corpus_b.path, config.corpus_b.years,
                       config.corpus_b.label);
  });
  const std::vector<std::string> targets = load_word_list(config.targets);
  std::optional<GoldRanking> gold;
  if (!config.gold.empty()) gold = load_gold(config.gold, config.gold_orientation);

  RunOutputs outputs;
  outputs.result = execute_pipeline(config, corpus_a, corpus_b, targets,
                                    gold ? &*gold : nullptr);
  outputs.result.timings.insert(outputs.result.timings.begin(),
                                load_timings.begin(), load_timings.end());

  outputs.output_dir = resolve_output_dir(config);
  std::error_code ec;
  std::filesystem::create_directories(outputs.output_dir, ec);
  if (ec) {
    throw IoError("cannot create " + outputs.output_dir + ": " + ec.message());
  }
  const std::filesystem::path dir(outputs.output_dir);
  outputs.ranking_path = (dir / "ranking.tsv").string();
  outputs.manifest_path = (dir / "manifest.json").string();
  write_ranking(outputs.result.ranking, outputs.ranking_path);

  const std::string space =
      config.measure == MeasureKind::kFrequency ? "" : space_tag(config.space);
  const std::string align =
      config.alignment ? align_method_tag(*config.alignment) : "";
  if (outputs.result.report) {
    const EvalReport &report = *outputs.result.report;
    Json json = {{"name", config.name},
                 {"space", space},
                 {"alignment", align},
                 {"measure", measure_tag(config.measure)},
                 {"rho", report.rho},
                 {"n", report.n},
                 {"missing_words", report.missing_words},
                 {"gold", config.gold}};
    outputs.report_path = (dir / "report.json").string();
    write_text(outputs.report_path, json.dump(2) + "\n");
  }
  const std::string alignment_path = (dir / "alignment.tsv").string();
  if (outputs.result.procrustes) {
    const ProcrustesReport &op = *outputs.result.procrustes;
    std::string text = "anchor\tresidual\n";
    char buffer[32];
    for (size_t i = 0; i < op.anchors.size(); ++i) {
      std::snprintf(buffer, sizeof(buffer), "%.9g", op.anchor_residuals[i]);
      text += op.anchors[i] + '\t' + buffer + '\n';
    }
    write_text(alignment_path, text);
  } else {
    std::filesystem::remove(alignment_path, ec);
  }

  Json inputs = Json::object();
  auto record_input = [&](const std::string &key, const std::string &path) {
    if (!path.empty()) {
      inputs[key] = {{"path", path}, {"fnv1a64", file_checksum(path)}};
    }
  };
  record_input("corpus_a", config.corpus_a.path);
  record_input("corpus_b", config.corpus_b.path);
  record_input("targets", config.targets);
  record_input("gold", config.gold);
  if (config.anchors == AnchorChoice::kWordList) {
    record_input("anchor_file", config.anchor_file);
  }
  Json timings = Json::array();
  for (const StageTiming &t : outputs.result.timings) {
    timings.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
  }
  Json manifest = {
      {"config", config_to_map(config)},
      {"seed", config.seed},
      {"inputs", inputs},
      {"timings", timings},
      {"outputs",
       {{"ranking", "ranking.tsv"},
        {"ranking_fnv1a64", file_checksum(outputs.ranking_path)}}},
  };
  if (outputs.result.report) manifest["outputs"]["report"] = "report.json";
  write_text(outputs.manifest_path, manifest.dump(2) + "\n");
  return outputs;
}

PipelineConfig config_from_manifest(const std::string &path) {
  const Json manifest = read_json(path);
  if (!manifest.contains("config") || !manifest["config"].is_object()) {
    throw FormatError(path + ": manifest has no config object");
  }
  ConfigMap settings;
  for (const auto &[key, value] : manifest["config"].items()) {
    if (!value.is_string()) {
      throw FormatError(path + ": config value of '" + key + "' is not a string");
    }
    settings[key] = value.get<std::string>();
  }
  const PipelineConfig config = config_from_map(settings);
  if (manifest.contains("inputs")) {
    for (const auto &[key, input] : manifest["inputs"].items()) {
      const std::string input_path = input.value("path", "");
      const std::string recorded = input.value("fnv1a64", "");
      std::error_code ec;
      if (input_path.empty() || !std::filesystem::exists(input_path, ec)) {
        continue;
      }
      if (file_checksum(input_path) != recorded) {
        log_warning(key + " (" + input_path +
                    ") changed since the manifest was written");
      }
    }
  }
  return config;
}

LeaderboardEntry read_report(const std::string &path) {
  const Json json = read_json(path);
  try {
    LeaderboardEntry entry;
    entry.name = json.at("name").get<std::string>();
    entry.space = json.value("space", "");
    entry.alignment = json.value("alignment", "");
    entry.measure = json.value("measure", "");
    entry.report.rho = json.at("rho").get<double>();
    entry.report.n = json.at("n").get<int>();
    entry.report.missing_words =
        json.value("missing_words", std::vector<std::string>{});
    return entry;
  } catch (const Json::exception &e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace lscd
