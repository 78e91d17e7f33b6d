#include "lscd/config.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "lscd/error.h"

namespace lscd {
namespace {

std::string trim(std::string_view text) {
  const size_t b = text.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const size_t e = text.find_last_not_of(" \t\r");
  return std::string(text.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(const std::string &key, const std::string &value,
                            const std::string &expected) {
  throw ValidationError(key + ": invalid value '" + value + "' (expected " +
                        expected + ")");
}

long long to_integer(const std::string &key, const std::string &value) {
  long long result = 0;
  auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), result);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    bad_value(key, value, "an integer");
  }
  return result;
}

double to_real(const std::string &key, const std::string &value) {
  double result = 0.0;
  auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), result);
  if (ec != std::errc() || ptr != value.data() + value.size() ||
      !std::isfinite(result)) {
    bad_value(key, value, "a real number");
  }
  return result;
}

bool to_bool(const std::string &key, const std::string &value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value, "true or false");
}

bool is_none(const std::string &value) {
  return value.empty() || value == "none" || value == "None";
}

std::string real_text(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string years_text(const YearRange &range) {
  return std::to_string(range.first) + "-" + std::to_string(range.last);
}

struct KeyHandler {
  std::function<void(PipelineConfig *, const std::string &, const std::string &)>
      set;
  std::function<std::string(const PipelineConfig &)> get;
};

// Table of every recognized key. Order here defines config_keys().
const std::vector<std::pair<std::string, KeyHandler>> &handlers() {
  using C = PipelineConfig;
  using S = const std::string &;
  static const std::vector<std::pair<std::string, KeyHandler>> table = {
      {"name", {[](C *c, S, S v) { c->name = v; },
                [](const C &c) { return c.name; }}},
      {"corpus_a.path", {[](C *c, S, S v) { c->corpus_a.path = v; },
                         [](const C &c) { return c.corpus_a.path; }}},
      {"corpus_a.years",
       {[](C *c, S k, S v) {
          try {
            c->corpus_a.years = parse_year_range(v);
          } catch (const ParameterError &) {
            bad_value(k, v, "FIRST-LAST");
          }
        },
        [](const C &c) { return years_text(c.corpus_a.years); }}},
      {"corpus_a.label", {[](C *c, S, S v) { c->corpus_a.label = v; },
                          [](const C &c) { return c.corpus_a.label; }}},
      {"corpus_b.path", {[](C *c, S, S v) { c->corpus_b.path = v; },
                         [](const C &c) { return c.corpus_b.path; }}},
      {"corpus_b.years",
       {[](C *c, S k, S v) {
          try {
            c->corpus_b.years = parse_year_range(v);
          } catch (const ParameterError &) {
            bad_value(k, v, "FIRST-LAST");
          }
        },
        [](const C &c) { return years_text(c.corpus_b.years); }}},
      {"corpus_b.label", {[](C *c, S, S v) { c->corpus_b.label = v; },
                          [](const C &c) { return c.corpus_b.label; }}},
      {"targets", {[](C *c, S, S v) { c->targets = v; },
                   [](const C &c) { return c.targets; }}},
      {"gold", {[](C *c, S, S v) { c->gold = is_none(v) ? "" : v; },
                [](const C &c) { return c.gold.empty() ? "none" : c.gold; }}},
      {"gold.orientation",
       {[](C *c, S k, S v) {
          try {
            c->gold_orientation = parse_gold_orientation(v);
          } catch (const ParameterError &) {
            bad_value(k, v, "change or relatedness");
          }
        },
        [](const C &c) {
          return std::string(c.gold_orientation == GoldOrientation::kChange
                                 ? "change"
                                 : "relatedness");
        }}},
      {"min_count",
       {[](C *c, S k, S v) {
          const long long n = to_integer(k, v);
          if (n <= 0) bad_value(k, v, "a positive integer");
          c->min_count = static_cast<uint64_t>(n);
        },
        [](const C &c) { return std::to_string(c.min_count); }}},
      {"space",
       {[](C *c, S k, S v) {
          try {
            c->space = parse_space_kind(v);
          } catch (const ParameterError &) {
            bad_value(k, v, "count, ppmi or sgns");
          }
        },
        [](const C &c) { return std::string(space_kind_name(c.space)); }}},
      {"space.window",
       {[](C *c, S k, S v) { c->window = static_cast<int>(to_integer(k, v)); },
        [](const C &c) { return std::to_string(c.window); }}},
      {"space.shift_k", {[](C *c, S k, S v) { c->shift_k = to_real(k, v); },
                         [](const C &c) { return real_text(c.shift_k); }}},
      {"space.smoothing",
       {[](C *c, S k, S v) { c->smoothing = to_real(k, v); },
        [](const C &c) { return real_text(c.smoothing); }}},
      {"space.tfidf_top_n",
       {[](C *c, S k, S v) {
          if (is_none(v)) {
            c->tfidf_top_n.reset();
          } else {
            c->tfidf_top_n = static_cast<int>(to_integer(k, v));
          }
        },
        [](const C &c) {
          return c.tfidf_top_n ? std::to_string(*c.tfidf_top_n)
                               : std::string("none");
        }}},
      {"space.dimension",
       {[](C *c, S k, S v) {
          c->sgns.dimension = static_cast<int>(to_integer(k, v));
        },
        [](const C &c) { return std::to_string(c.sgns.dimension); }}},
      {"space.negative",
       {[](C *c, S k, S v) {
          c->sgns.negative_samples = static_cast<int>(to_integer(k, v));
        },
        [](const C &c) { return std::to_string(c.sgns.negative_samples); }}},
      {"space.epochs",
       {[](C *c, S k, S v) {
          c->sgns.epochs = static_cast<int>(to_integer(k, v));
        },
        [](const C &c) { return std::to_string(c.sgns.epochs); }}},
      {"space.learning_rate",
       {[](C *c, S k, S v) { c->sgns.initial_learning_rate = to_real(k, v); },
        [](const C &c) { return real_text(c.sgns.initial_learning_rate); }}},
      {"space.unigram_exponent",
       {[](C *c, S k, S v) { c->sgns.unigram_exponent = to_real(k, v); },
        [](const C &c) { return real_text(c.sgns.unigram_exponent); }}},
      {"space.subsample",
       {[](C *c, S k, S v) {
          if (is_none(v)) {
            c->subsample.reset();
          } else {
            c->subsample = to_real(k, v);
          }
        },
        [](const C &c) {
          return c.subsample ? real_text(*c.subsample) : std::string("none");
        }}},
      {"space.shuffle",
       {[](C *c, S k, S v) { c->sgns.shuffle_sentences = to_bool(k, v); },
        [](const C &c) {
          return std::string(c.sgns.shuffle_sentences ? "true" : "false");
        }}},
      {"alignment",
       {[](C *c, S k, S v) {
          if (is_none(v)) {
            c->alignment.reset();
          } else if (v == "CI") {
            c->alignment = AlignMethod::kColumnIntersection;
          } else if (v == "OP") {
            c->alignment = AlignMethod::kProcrustes;
          } else if (v == "VI") {
            c->alignment = AlignMethod::kVectorInit;
          } else if (v == "WI") {
            c->alignment = AlignMethod::kWordInjection;
          } else if (v == "KNN") {
            c->alignment = AlignMethod::kKnn;
          } else {
            bad_value(k, v, "none, CI, OP, VI, WI or KNN");
          }
        },
        [](const C &c) {
          return c.alignment ? std::string(align_method_tag(*c.alignment))
                             : std::string("none");
        }}},
      {"alignment.mean_center",
       {[](C *c, S k, S v) { c->mean_center = to_bool(k, v); },
        [](const C &c) { return std::string(c.mean_center ? "true" : "false"); }}},
      {"alignment.length_normalize",
       {[](C *c, S k, S v) { c->length_normalize = to_bool(k, v); },
        [](const C &c) {
          return std::string(c.length_normalize ? "true" : "false");
        }}},
      {"alignment.anchors",
       {[](C *c, S k, S v) {
          if (v == "all_shared") {
            c->anchors = AnchorChoice::kAllShared;
          } else if (v == "top_frequency") {
            c->anchors = AnchorChoice::kTopFrequency;
          } else if (v == "word_list") {
            c->anchors = AnchorChoice::kWordList;
          } else {
            bad_value(k, v, "all_shared, top_frequency or word_list");
          }
        },
        [](const C &c) {
          switch (c.anchors) {
            case AnchorChoice::kAllShared: return std::string("all_shared");
            case AnchorChoice::kTopFrequency: return std::string("top_frequency");
            case AnchorChoice::kWordList: return std::string("word_list");
          }
          return std::string();
        }}},
      {"alignment.anchor_count",
       {[](C *c, S k, S v) {
          c->anchor_count = static_cast<int>(to_integer(k, v));
        },
        [](const C &c) { return std::to_string(c.anchor_count); }}},
      {"alignment.anchor_file",
       {[](C *c, S, S v) { c->anchor_file = is_none(v) ? "" : v; },
        [](const C &c) {
          return c.anchor_file.empty() ? std::string("none") : c.anchor_file;
        }}},
      {"alignment.noise_drop",
       {[](C *c, S k, S v) {
          if (is_none(v)) {
            c->noise_aware.reset();
          } else {
            if (!c->noise_aware) c->noise_aware.emplace();
            c->noise_aware->drop_fraction = to_real(k, v);
          }
        },
        [](const C &c) {
          return c.noise_aware ? real_text(c.noise_aware->drop_fraction)
                               : std::string("none");
        }}},
      {"alignment.noise_rounds",
       {[](C *c, S k, S v) {
          if (is_none(v)) return;
          if (!c->noise_aware) {
            throw ValidationError(std::string(k) +
                                  ": needs alignment.noise_drop to be set");
          }
          c->noise_aware->max_rounds = static_cast<int>(to_integer(k, v));
        },
        [](const C &c) {
          return c.noise_aware ? std::to_string(c.noise_aware->max_rounds)
                               : std::string("none");
        }}},
      {"alignment.vi_mode",
       {[](C *c, S k, S v) {
          if (v == "word_only") {
            c->vi_mode = VectorInitMode::kWordOnly;
          } else if (v == "full_model") {
            c->vi_mode = VectorInitMode::kFullModel;
          } else {
            bad_value(k, v, "word_only or full_model");
          }
        },
        [](const C &c) {
          return std::string(c.vi_mode == VectorInitMode::kWordOnly
                                 ? "word_only"
                                 : "full_model");
        }}},
      {"alignment.wi_mark",
       {[](C *c, S k, S v) {
          if (v == "b") {
            c->wi_side = InjectionSide::kMarkB;
          } else if (v == "a") {
            c->wi_side = InjectionSide::kMarkA;
          } else {
            bad_value(k, v, "a or b");
          }
        },
        [](const C &c) {
          return std::string(c.wi_side == InjectionSide::kMarkB ? "b" : "a");
        }}},
      {"alignment.knn_k",
       {[](C *c, S k, S v) { c->knn_k = static_cast<int>(to_integer(k, v)); },
        [](const C &c) { return std::to_string(c.knn_k); }}},
      {"measure",
       {[](C *c, S k, S v) {
          if (v == "CD") {
            c->measure = MeasureKind::kCosine;
          } else if (v == "JSD") {
            c->measure = MeasureKind::kJensenShannon;
          } else if (v == "FD") {
            c->measure = MeasureKind::kFrequency;
          } else {
            bad_value(k, v, "CD, JSD or FD");
          }
        },
        [](const C &c) { return std::string(measure_tag(c.measure)); }}},
      {"measure.negative_strategy",
       {[](C *c, S k, S v) {
          try {
            c->negative_strategy = parse_negative_strategy(v);
          } catch (const ParameterError &) {
            bad_value(k, v, "clip, shift or abs");
          }
        },
        [](const C &c) {
          return std::string(negative_strategy_name(c.negative_strategy));
        }}},
      {"binarize",
       {[](C *c, S k, S v) { c->binarize = to_bool(k, v); },
        [](const C &c) { return std::string(c.binarize ? "true" : "false"); }}},
      {"binarize.threshold",
       {[](C *c, S k, S v) {
          if (v == "column_mean") {
            c->binarize_threshold = BinarizeThreshold::kColumnMean;
          } else if (v == "zero") {
            c->binarize_threshold = BinarizeThreshold::kZero;
          } else {
            bad_value(k, v, "column_mean or zero");
          }
        },
        [](const C &c) {
          return std::string(c.binarize_threshold ==
                                     BinarizeThreshold::kColumnMean
                                 ? "column_mean"
                                 : "zero");
        }}},
      {"seed",
       {[](C *c, S k, S v) {
          const long long s = to_integer(k, v);
          if (s < 0) bad_value(k, v, "a non-negative integer");
          c->seed = static_cast<uint64_t>(s);
        },
        [](const C &c) { return std::to_string(c.seed); }}},
      {"workers",
       {[](C *c, S k, S v) { c->workers = static_cast<int>(to_integer(k, v)); },
        [](const C &c) { return std::to_string(c.workers); }}},
      {"output_dir", {[](C *c, S, S v) { c->output_dir = v; },
                      [](const C &c) { return c.output_dir; }}},
  };
  return table;
}

}  // namespace

const std::vector<std::string> &config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto &[key, handler] : handlers()) out.push_back(key);
    return out;
  }();
  return keys;
}

ConfigMap parse_config_text(std::string_view text, const std::string &source) {
  ConfigMap settings;
  std::istringstream in{std::string(text)};
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(source + ":" + std::to_string(line_number) +
                            ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    if (key.empty()) {
      throw ValidationError(source + ":" + std::to_string(line_number) +
                            ": empty key");
    }
    settings[key] = trim(std::string_view(stripped).substr(eq + 1));
  }
  return settings;
}

ConfigMap load_config_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

void apply_config(const ConfigMap &settings, PipelineConfig *config) {
  for (const auto &[key, value] : settings) {
    const auto &table = handlers();
    auto it = std::find_if(table.begin(), table.end(),
                           [&](const auto &entry) { return entry.first == key; });
    if (it == table.end()) throw ValidationError("unknown config key '" + key + "'");
    it->second.set(config, key, value);
  }
  config->sgns.window = config->window;
  config->sgns.seed = config->seed;
}

PipelineConfig config_from_map(const ConfigMap &settings) {
  PipelineConfig config;
  apply_config(settings, &config);
  return config;
}

ConfigMap config_to_map(const PipelineConfig &config) {
  ConfigMap settings;
  for (const auto &[key, handler] : handlers()) {
    settings[key] = handler.get(config);
  }
  return settings;
}

std::string format_config(const ConfigMap &settings) {
  std::string out;
  // Documentation order first, then anything unrecognized.
  for (const std::string &key : config_keys()) {
    auto it = settings.find(key);
    if (it != settings.end()) out += key + " = " + it->second + "\n";
  }
  for (const auto &[key, value] : settings) {
    if (std::find(config_keys().begin(), config_keys().end(), key) ==
        config_keys().end()) {
      out += key + " = " + value + "\n";
    }
  }
  return out;
}

std::vector<std::string> validate_config(const PipelineConfig &c) {
  std::vector<std::string> violations;
  auto add = [&](const std::string &message) { violations.push_back(message); };

  if (c.corpus_a.path.empty()) add("corpus_a.path: required");
  if (c.corpus_b.path.empty()) add("corpus_b.path: required");
  if (c.targets.empty()) add("targets: required");
  if (c.corpus_a.years.first > c.corpus_a.years.last) {
    add("corpus_a.years: first year after last year");
  }
  if (c.corpus_b.years.first > c.corpus_b.years.last) {
    add("corpus_b.years: first year after last year");
  }

  const bool fd = c.measure == MeasureKind::kFrequency;
  const bool vectors = c.space == SpaceKind::kSgns;
  if (fd && c.alignment) {
    add("measure/alignment: FD is corpus-level and requires alignment = none");
  }
  if (!fd && !c.alignment) {
    add("measure/alignment: " + std::string(measure_tag(c.measure)) +
        " compares vector spaces and needs an alignment method");
  }
  if (fd && c.binarize) {
    add("binarize/measure: FD has no vector space to binarize");
  }
  if (c.alignment) {
    switch (*c.alignment) {
      case AlignMethod::kColumnIntersection:
        if (vectors) {
          add("space/alignment: CI needs explicit context columns "
              "(count or ppmi space)");
        }
        break;
      case AlignMethod::kWordInjection:
        if (vectors) add("space/alignment: WI requires a count or ppmi space");
        break;
      case AlignMethod::kVectorInit:
        if (!vectors) add("space/alignment: VI requires an sgns space");
        break;
      case AlignMethod::kProcrustes:
        if (!vectors) {
          add("space/alignment: OP requires dense sgns spaces of equal "
              "dimension");
        }
        break;
      case AlignMethod::kKnn:
        if (c.measure != MeasureKind::kCosine) {
          add("measure/alignment: KNN second-order vectors are compared "
              "with CD");
        }
        break;
    }
  }

  if (c.window <= 0) add("space.window: must be positive");
  if (c.min_count == 0) add("min_count: must be positive");
  if (c.space == SpaceKind::kPpmi) {
    if (!(c.shift_k >= 1.0)) add("space.shift_k: must be >= 1");
    if (!(c.smoothing > 0.0 && c.smoothing <= 1.0)) {
      add("space.smoothing: must lie in (0, 1]");
    }
  }
  if (c.tfidf_top_n) {
    if (c.space != SpaceKind::kPpmi) {
      add("space/space.tfidf_top_n: tf-idf context selection applies to "
          "ppmi spaces");
    }
    if (*c.tfidf_top_n <= 0) add("space.tfidf_top_n: must be positive");
  }
  if (vectors) {
    if (c.sgns.dimension <= 0) add("space.dimension: must be positive");
    if (c.sgns.negative_samples <= 0) add("space.negative: must be positive");
    if (c.sgns.epochs < 0) add("space.epochs: must be non-negative");
    if (!(c.sgns.initial_learning_rate > 0.0)) {
      add("space.learning_rate: must be positive");
    }
  }
  if (c.subsample) {
    if (!vectors) add("space/space.subsample: subsampling applies to sgns");
    if (!(*c.subsample > 0.0 && *c.subsample < 1.0)) {
      add("space.subsample: must lie in (0, 1) or be none");
    }
  }
  if (c.alignment == AlignMethod::kProcrustes) {
    if (c.anchors == AnchorChoice::kWordList && c.anchor_file.empty()) {
      add("alignment.anchors/alignment.anchor_file: word_list anchors need "
          "an anchor file");
    }
    if (c.anchors == AnchorChoice::kTopFrequency && c.anchor_count <= 0) {
      add("alignment.anchor_count: must be positive");
    }
    if (c.noise_aware) {
      if (!(c.noise_aware->drop_fraction > 0.0 &&
            c.noise_aware->drop_fraction < 0.5)) {
        add("alignment.noise_drop: must lie in (0, 0.5)");
      }
      if (c.noise_aware->max_rounds <= 0) {
        add("alignment.noise_rounds: must be positive");
      }
    }
  }
  if (c.alignment == AlignMethod::kKnn && c.knn_k <= 0) {
    add("alignment.knn_k: must be positive");
  }
  if (c.workers <= 0) add("workers: must be positive");
  return violations;
}

}  // namespace lscd
