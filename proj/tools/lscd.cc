// Command-line front end: one subcommand per stage plus whole-pipeline runs.
//
// Every subcommand accepts --config FILE and one --<key> flag per config key
// (e.g. --space.window 5); flags override values from the file.
//
// Exit codes: 0 success, 1 validation error, 2 I/O or format error,
// 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lscd/align.h"
#include "lscd/config.h"
#include "lscd/corpus.h"
#include "lscd/error.h"
#include "lscd/eval.h"
#include "lscd/log.h"
#include "lscd/measures.h"
#include "lscd/pipeline.h"
#include "lscd/spaces.h"
#include "lscd/vector_space.h"

namespace {

using lscd::PipelineConfig;

constexpr int kExitValidation = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

// Config file plus per-key overrides gathered by one subcommand.
struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option *> options;

  void attach(CLI::App *app) {
    app->add_option("--config", config_file, "key = value configuration file");
    for (const std::string &key : lscd::config_keys()) {
      options[key] = app->add_option("--" + key, values[key])->group("Config keys");
    }
  }

  PipelineConfig resolve(PipelineConfig base = {}) const {
    if (!config_file.empty()) {
      lscd::apply_config(lscd::load_config_file(config_file), &base);
    }
    lscd::ConfigMap overrides;
    for (const auto &[key, option] : options) {
      if (option->count() > 0) overrides[key] = values.at(key);
    }
    lscd::apply_config(overrides, &base);
    return base;
  }
};

void write_or_print(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw lscd::IoError("cannot write " + path);
  out << text;
  if (!out) throw lscd::IoError("error writing " + path);
}

std::string fixed(double value, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", digits, value);
  return buffer;
}

const lscd::CorpusSource &period_source(const PipelineConfig &config,
                                        const std::string &period) {
  if (period == "a") return config.corpus_a;
  if (period == "b") return config.corpus_b;
  throw lscd::ParameterError("period must be a or b, got '" + period + "'");
}

lscd::TokenizedCorpus load_source(const lscd::CorpusSource &source,
                                  const std::string &key) {
  if (source.path.empty()) {
    throw lscd::ValidationError(key + ".path: required");
  }
  return lscd::load_corpus(source.path, source.years, source.label);
}

int run_ingest(const ConfigFlags &flags, const std::string &period,
               const std::string &out) {
  const PipelineConfig config = flags.resolve();
  const lscd::TokenizedCorpus corpus =
      load_source(period_source(config, period), "corpus_" + period);
  const lscd::Vocabulary vocab =
      lscd::build_vocabulary(corpus, config.min_count);
  std::cout << "label\t" << corpus.period_label() << "\n"
            << "sentences\t" << corpus.sentences().size() << "\n"
            << "tokens\t" << corpus.token_total() << "\n"
            << "types\t" << lscd::count_words(corpus).size() << "\n"
            << "vocabulary\t" << vocab.size() << "\n";
  if (!out.empty()) lscd::save_corpus(corpus, out);
  return 0;
}

int run_train(const ConfigFlags &flags, const std::string &period,
              const std::string &out) {
  const PipelineConfig config = flags.resolve();
  const lscd::TokenizedCorpus corpus =
      load_source(period_source(config, period), "corpus_" + period);
  const lscd::PeriodModel model =
      lscd::build_period_model(corpus, config, period == "a" ? 0 : 1);
  lscd::save_space(model.space, out);
  std::cout << lscd::space_kind_name(model.space.kind()) << "\t"
            << model.space.rows() << "x" << model.space.dims() << "\n";
  return 0;
}

int run_align(const ConfigFlags &flags, const std::string &space_a,
              const std::string &space_b, const std::string &out_a,
              const std::string &out_b) {
  const PipelineConfig config = flags.resolve();
  if (config.alignment != lscd::AlignMethod::kColumnIntersection &&
      config.alignment != lscd::AlignMethod::kProcrustes) {
    throw lscd::ValidationError(
        "alignment: the align subcommand handles CI and OP; VI and WI need "
        "corpora and KNN is applied at measure time (use pipeline)");
  }
  lscd::PeriodModel a;
  lscd::PeriodModel b;
  a.space = lscd::load_space(space_a);
  b.space = lscd::load_space(space_b);
  if (config.alignment == lscd::AlignMethod::kProcrustes &&
      config.anchors == lscd::AnchorChoice::kTopFrequency) {
    a.vocab = lscd::build_vocabulary(load_source(config.corpus_a, "corpus_a"),
                                     config.min_count);
    b.vocab = lscd::build_vocabulary(load_source(config.corpus_b, "corpus_b"),
                                     config.min_count);
  }
  const lscd::AlignedPair pair = lscd::align_period_models(a, b, config);
  lscd::save_space(pair.space_a, out_a);
  lscd::save_space(pair.space_b, out_b);
  std::cout << "shared_rows\t" << pair.shared_rows.size() << "\n";
  if (pair.report) {
    std::cout << "anchors\t" << pair.report->anchors.size() << "\n"
              << "rounds\t" << pair.report->rounds << "\n"
              << "objective\t" << pair.report->round_objectives.back() << "\n";
  }
  return 0;
}

int run_measure(const ConfigFlags &flags, const std::string &space_a,
                const std::string &space_b, const std::string &out) {
  const PipelineConfig config = flags.resolve();
  if (config.targets.empty()) throw lscd::ValidationError("targets: required");
  const std::vector<std::string> targets = lscd::load_word_list(config.targets);
  lscd::ChangeRanking ranking;
  if (config.measure == lscd::MeasureKind::kFrequency) {
    ranking = lscd::rank_targets_by_frequency(
        load_source(config.corpus_a, "corpus_a"),
        load_source(config.corpus_b, "corpus_b"), targets);
  } else {
    if (space_a.empty() || space_b.empty()) {
      throw lscd::ValidationError(
          "--space-a/--space-b: required for vector measures");
    }
    lscd::AlignedPair pair;
    pair.space_a = lscd::load_space(space_a);
    pair.space_b = lscd::load_space(space_b);
    pair.shared_rows = lscd::shared_row_words(pair.space_a, pair.space_b);
    if (config.binarize) {
      pair.space_a = lscd::binarize(pair.space_a, config.binarize_threshold);
      pair.space_b = lscd::binarize(pair.space_b, config.binarize_threshold);
    }
    ranking = lscd::rank_targets(pair, lscd::measure_options(config), targets);
  }
  write_or_print(out, lscd::format_ranking(ranking));
  return 0;
}

int run_evaluate(const ConfigFlags &flags, const std::string &ranking_path,
                 const std::string &out) {
  const PipelineConfig config = flags.resolve();
  if (config.gold.empty()) throw lscd::ValidationError("gold: required");
  const lscd::ChangeRanking ranking = lscd::read_ranking(ranking_path);
  const lscd::GoldRanking gold =
      lscd::load_gold(config.gold, config.gold_orientation);
  const lscd::EvalReport report = lscd::spearman(ranking, gold);
  std::cout << "rho\t" << fixed(report.rho, 6) << "\n"
            << "n\t" << report.n << "\n";
  for (const std::string &word : report.missing_words) {
    std::cout << "missing\t" << word << "\n";
  }
  if (!out.empty()) {
    const nlohmann::json json = {
        {"name", config.name},
        {"space", ""},
        {"alignment", ""},
        {"measure", lscd::measure_tag(config.measure)},
        {"rho", report.rho},
        {"n", report.n},
        {"missing_words", report.missing_words},
        {"gold", config.gold}};
    write_or_print(out, json.dump(2) + "\n");
  }
  return 0;
}

int run_pipeline_command(const ConfigFlags &flags, const std::string &manifest,
                         bool check) {
  PipelineConfig base;
  if (!manifest.empty()) base = lscd::config_from_manifest(manifest);
  const PipelineConfig config = flags.resolve(base);
  if (check) {
    const std::vector<std::string> violations = lscd::validate_config(config);
    for (const std::string &v : violations) std::cout << v << "\n";
    if (!violations.empty()) return kExitValidation;
    std::cout << "ok\n";
    return 0;
  }
  const lscd::RunOutputs outputs = lscd::run_pipeline(config);
  std::cout << "ranking\t" << outputs.ranking_path << "\n"
            << "manifest\t" << outputs.manifest_path << "\n";
  if (outputs.result.report) {
    std::cout << "report\t" << outputs.report_path << "\n"
              << "rho\t" << fixed(outputs.result.report->rho, 6) << "\n"
              << "n\t" << outputs.result.report->n << "\n";
  }
  for (const std::string &word : outputs.result.ranking.flagged()) {
    std::cout << "flagged\t" << word << "\n";
  }
  return 0;
}

int run_leaderboard(const std::vector<std::string> &reports, bool tsv,
                    const std::string &out) {
  std::vector<lscd::LeaderboardEntry> entries;
  for (const std::string &path : reports) {
    std::filesystem::path p(path);
    if (std::filesystem::is_directory(p)) p /= "report.json";
    entries.push_back(lscd::read_report(p.string()));
  }
  write_or_print(out, tsv ? lscd::format_leaderboard_tsv(entries)
                          : lscd::format_leaderboard(entries));
  return 0;
}

int exit_code(const lscd::Error &error) {
  switch (error.error_class()) {
    case lscd::ErrorClass::kValidation: return kExitValidation;
    case lscd::ErrorClass::kInput: return kExitInput;
    case lscd::ErrorClass::kNumerical: return kExitNumerical;
  }
  return kExitNumerical;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Lexical semantic change detection"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log stage progress to stderr");

  // Each subcommand owns its config flags; unique_ptr keeps their addresses
  // stable for CLI11's bound references.
  std::vector<std::unique_ptr<ConfigFlags>> all_flags;
  auto add_command = [&](const std::string &name, const std::string &help) {
    CLI::App *sub = app.add_subcommand(name, help);
    all_flags.push_back(std::make_unique<ConfigFlags>());
    all_flags.back()->attach(sub);
    return std::make_pair(sub, all_flags.back().get());
  };

  std::string period = "a";
  std::string out;
  std::string space_a;
  std::string space_b;
  std::string out_a;
  std::string out_b;
  std::string ranking_path;
  std::string manifest;
  bool check = false;
  bool tsv = false;
  std::vector<std::string> reports;

  auto [ingest, ingest_flags] =
      add_command("ingest", "Load a period corpus and print its statistics");
  ingest->add_option("--period", period, "a or b")->capture_default_str();
  ingest->add_option("--out", out, "Write the year-filtered corpus here");

  auto [train, train_flags] = add_command("train", "Build the space of one period");
  train->add_option("--period", period, "a or b")->capture_default_str();
  train->add_option("--out", out, "Space file")->required();

  auto [align, align_flags] = add_command("align", "Align two saved spaces (CI or OP)");
  align->add_option("--space-a", space_a)->required();
  align->add_option("--space-b", space_b)->required();
  align->add_option("--out-a", out_a)->required();
  align->add_option("--out-b", out_b)->required();

  auto [measure, measure_flags] =
      add_command("measure", "Rank targets by change on aligned spaces or corpora");
  measure->add_option("--space-a", space_a);
  measure->add_option("--space-b", space_b);
  measure->add_option("--out", out, "Ranking file (default stdout)");

  auto [evaluate, evaluate_flags] =
      add_command("evaluate", "Spearman correlation of a ranking with the gold");
  evaluate->add_option("--ranking", ranking_path)->required();
  evaluate->add_option("--out", out, "Write a JSON report");

  auto [pipeline, pipeline_flags] =
      add_command("pipeline", "Run a complete configured experiment");
  pipeline->add_option("--manifest", manifest, "Rerun the config of a manifest");
  pipeline->add_flag("--check", check, "Only validate the configuration");

  auto [leaderboard, leaderboard_flags] =
      add_command("leaderboard", "Tabulate report.json files or run directories");
  leaderboard->add_option("reports", reports)->required();
  leaderboard->add_flag("--tsv", tsv, "Tab-separated output");
  leaderboard->add_option("--out", out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }
  lscd::set_verbose_logging(verbose);

  try {
    if (*ingest) return run_ingest(*ingest_flags, period, out);
    if (*train) return run_train(*train_flags, period, out);
    if (*align) return run_align(*align_flags, space_a, space_b, out_a, out_b);
    if (*measure) return run_measure(*measure_flags, space_a, space_b, out);
    if (*evaluate) return run_evaluate(*evaluate_flags, ranking_path, out);
    if (*pipeline) return run_pipeline_command(*pipeline_flags, manifest, check);
    if (*leaderboard) {
      (void)leaderboard_flags;
      return run_leaderboard(reports, tsv, out);
    }
  } catch (const lscd::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::filesystem::filesystem_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
