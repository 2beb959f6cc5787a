// Copyright 2026 The Lensum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lensum/cli.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lensum/backend.h"
#include "lensum/bertscore.h"
#include "lensum/corpus.h"
#include "lensum/error.h"
#include "lensum/evaluation.h"
#include "lensum/parallel.h"
#include "lensum/predictor.h"
#include "lensum/ranking.h"
#include "lensum/records.h"
#include "lensum/summarizer.h"
#include "lensum/templates.h"

namespace lensum {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

const std::vector<int> kSweepLengths = {5, 10, 15, 20, 25, 30, 35};

struct Options {
  std::string config_path;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::vector<std::string> overrides;

  std::string split;
  std::string variant;
  std::string model;
  std::string pseudo_lengths;
  std::string generations;
  std::string candidates;
  std::string references;
  std::string label;
  std::string lengths;
  std::string input;
  std::vector<std::string> inputs;
  std::vector<std::string> labels;
  int limit = 0;
};

// Everything a subcommand needs: the effective configuration and where
// to put results.
class Context {
 public:
  Context(std::string command, ordered_json config, fs::path base_dir,
          std::ostream& out, std::ostream& err)
      : command_(std::move(command)),
        config_(std::move(config)),
        base_dir_(std::move(base_dir)),
        out_(out),
        err_(err) {}

  const std::string& command() const { return command_; }
  const ordered_json& config() const { return config_; }
  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }

  std::uint64_t seed() const { return config_.value("seed", std::uint64_t{13}); }
  int workers() const { return config_.value("workers", 1); }

  const json Section(const std::string& name) const {
    if (!config_.contains(name)) return json::object();
    return json::parse(config_[name].dump());
  }

  fs::path Resolve(const std::string& path) const {
    fs::path p(path);
    return p.is_absolute() ? p : base_dir_ / p;
  }

  fs::path OutputDir() const {
    return Resolve(config_.value("output_dir", std::string("lensum-out")));
  }

  fs::path StepDir(const std::string& step) const { return OutputDir() / step; }

  CorpusFormat Format() const {
    return ParseCorpusFormat(Section("data").value("format", "dialogsum"));
  }

  std::vector<Example> LoadSplit(Split split) {
    const json data = Section("data");
    const std::string key(SplitName(split));
    if (!data.contains(key)) {
      throw Error("config has no data." + key + " path");
    }
    const fs::path path = Resolve(data.at(key).get<std::string>());
    if (!fs::exists(path)) {
      throw Error("data." + key + " file does not exist: " + path.string());
    }
    LoadOptions options;
    options.skip_invalid = data.value("skip_invalid", false);
    LoadResult result = LoadCorpusFile(path, Format(), split, options);
    if (result.skipped > 0) {
      err_ << "warning: skipped " << result.skipped << " invalid records in "
           << path.string() << "\n";
    }
    inputs_["data." + key] = data.at(key).get<std::string>();
    return std::move(result.examples);
  }

  DecodingConfig Decoding() const {
    json section = Section("decoding");
    if (!section.contains("seed")) section["seed"] = seed();
    return DecodingConfig::FromJson(section);
  }

  TrainingSettings Training() {
    json section = Section("training");
    if (!section.contains("seed")) section["seed"] = seed();
    TrainingSettings settings = TrainingSettings::FromJson(section);
    settings.on_epoch = [this](int epoch, double loss) {
      char line[64];
      std::snprintf(line, sizeof(line), "epoch %d loss %.6f\n", epoch, loss);
      err_ << line;
    };
    return settings;
  }

  RougeConfig Rouge() const {
    const json section = Section("rouge");
    RougeConfig config;
    config.n_values = section.value("n_values", config.n_values);
    config.use_lcs = section.value("use_lcs", config.use_lcs);
    config.lowercase = section.value("lowercase", config.lowercase);
    config.Validate();
    return config;
  }

  HashEmbedder Embedder() const {
    const json section = Section("bertscore");
    return HashEmbedder(section.value("dimension", 64),
                        section.value("context_weight", 0.0),
                        section.value("seed", seed()));
  }

  json BackendConfig() const {
    json backend = Section("backend");
    if (!backend.contains("kind")) backend["kind"] = "toy";
    if (backend.contains("table")) {
      backend["table"] = Resolve(backend["table"].get<std::string>()).string();
    }
    if (backend.contains("corpus") && backend["corpus"].contains("path")) {
      backend["corpus"]["path"] =
          Resolve(backend["corpus"]["path"].get<std::string>()).string();
    }
    return backend;
  }

  bool BackendIsOracle() const {
    const std::string kind = BackendConfig().value("kind", "toy");
    return kind == "length-obedient" || kind == "oracle" || kind == "lookup";
  }

  void NoteInput(const std::string& name, const std::string& value) {
    inputs_[name] = value;
  }

  // Writes `text` to step_dir/name and records it for the manifest.
  void Emit(const fs::path& step_dir, const std::string& name,
            std::string_view text) {
    WriteTextFile(step_dir / name, text);
    outputs_.push_back(name);
  }

  void Record(const std::string& name) { outputs_.push_back(name); }

  void WriteManifest(const fs::path& step_dir, ordered_json extra = nullptr) {
    ordered_json manifest;
    manifest["command"] = command_;
    manifest["tool"] = "lensum";
    manifest["version"] = kToolVersion;
    manifest["template_version"] = kTemplateVersion;
    manifest["seed"] = seed();
    manifest["config"] = config_;
    manifest["inputs"] = inputs_;
    manifest["outputs"] = outputs_;
    if (!extra.is_null()) manifest["details"] = std::move(extra);
    WriteTextFile(step_dir / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  std::string command_;
  ordered_json config_;
  fs::path base_dir_;
  std::ostream& out_;
  std::ostream& err_;
  ordered_json inputs_ = ordered_json::object();
  std::vector<std::string> outputs_;
};

std::string Fixed(double v, int digits) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.*f", digits, v);
  return buffer;
}

ordered_json LoadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path);
  try {
    ordered_json config = ordered_json::parse(in);
    if (!config.is_object()) throw Error("config root must be an object");
    return config;
  } catch (const json::exception& e) {
    throw Error("invalid config file " + path + ": " + e.what());
  }
}

// "a.b.c=value"; the value is read as JSON when it parses, else as text.
void ApplyOverride(ordered_json& config, const std::string& assignment) {
  size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error("override must look like key.path=value: " + assignment);
  }
  std::string key = assignment.substr(0, eq);
  std::string raw = assignment.substr(eq + 1);
  ordered_json value;
  try {
    value = ordered_json::parse(raw);
  } catch (const json::exception&) {
    value = raw;
  }
  ordered_json* node = &config;
  size_t start = 0;
  while (true) {
    size_t dot = key.find('.', start);
    std::string part = key.substr(start, dot - start);
    if (part.empty()) throw Error("bad override key: " + key);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    if (!node->contains(part) || !(*node)[part].is_object()) {
      (*node)[part] = ordered_json::object();
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

void SetDefault(ordered_json& config, const std::string& section,
                const std::string& key, const ordered_json& value) {
  if (!config.contains(section) || !config[section].is_object()) {
    config[section] = ordered_json::object();
  }
  config[section][key] = value;
}

Split SplitOr(const Context& ctx, const std::string& section,
              const std::string& key, const std::string& fallback) {
  return ParseSplit(ctx.Section(section).value(key, fallback));
}

std::vector<int> ParseLengths(const std::string& text) {
  std::vector<int> lengths;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (WordCount(item) == 0) continue;
    try {
      size_t used = 0;
      int value = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      lengths.push_back(value);
    } catch (const std::exception&) {
      throw Error("bad length '" + item + "' in --lengths");
    }
  }
  if (lengths.empty()) throw Error("--lengths is empty");
  return lengths;
}

// ---------------------------------------------------------------------------
// data

void RunDataStats(Context& ctx) {
  const fs::path dir = ctx.StepDir("data-stats");
  const json data = ctx.Section("data");
  std::vector<Split> splits;
  if (data.contains("split_filter")) {
    splits.push_back(ParseSplit(data["split_filter"].get<std::string>()));
  } else {
    for (Split split : {Split::kTrain, Split::kVal, Split::kTest}) {
      if (data.contains(std::string(SplitName(split)))) splits.push_back(split);
    }
  }
  if (splits.empty()) throw Error("config lists no data splits");

  ordered_json stats;
  stats["format"] = FormatName(ctx.Format());
  stats["splits"] = ordered_json::array();
  std::vector<Example> everything;
  std::string csv =
      "split,dialogues,summaries,mean_dialogue_words,mean_summary_words,"
      "mean_turns,compression_rate\n";
  std::string table =
      "| Split | Dialogues | Summaries | Dialogue words | Summary words | "
      "Turns | Comp. rate |\n|---|---|---|---|---|---|---|\n";
  for (Split split : splits) {
    std::vector<Example> corpus = ctx.LoadSplit(split);
    SplitStats s = ComputeSplitStats(split, corpus);
    stats["splits"].push_back({{"split", SplitName(split)},
                               {"dialogues", s.dialogues},
                               {"summaries", s.summaries},
                               {"mean_dialogue_words", s.mean_dialogue_words},
                               {"mean_summary_words", s.mean_summary_words},
                               {"mean_turns", s.mean_turns},
                               {"compression_rate", s.compression_rate}});
    csv += std::string(SplitName(split)) + "," + std::to_string(s.dialogues) +
           "," + std::to_string(s.summaries) + "," +
           Fixed(s.mean_dialogue_words, 6) + "," +
           Fixed(s.mean_summary_words, 6) + "," + Fixed(s.mean_turns, 6) + "," +
           Fixed(s.compression_rate, 6) + "\n";
    table += "| " + std::string(SplitName(split)) + " | " +
             std::to_string(s.dialogues) + " | " + std::to_string(s.summaries) +
             " | " + Fixed(s.mean_dialogue_words, 2) + " | " +
             Fixed(s.mean_summary_words, 2) + " | " + Fixed(s.mean_turns, 2) +
             " | " + Fixed(100.0 * s.compression_rate, 2) + "% |\n";
    everything.insert(everything.end(), corpus.begin(), corpus.end());
  }
  const double overall = CompressionRate(everything);
  stats["overall"] = {{"dialogues", everything.size()},
                      {"compression_rate", overall}};
  table += "\nOverall compression rate: " + Fixed(100.0 * overall, 2) + "%\n";
  csv += "all," + std::to_string(everything.size()) + ",,,,," +
         Fixed(overall, 6) + "\n";

  ctx.Emit(dir, "stats.json", stats.dump(2) + "\n");
  ctx.Emit(dir, "stats.csv", csv);
  ctx.Emit(dir, "stats.md", table);
  ctx.WriteManifest(dir);
  ctx.out() << table;
}

// ---------------------------------------------------------------------------
// predictor

LengthPredictor ObtainPredictor(Context& ctx, const Options& options,
                                PredictorVariant variant) {
  fs::path model = options.model.empty() ? ctx.StepDir("predictor-train") / "model"
                                         : ctx.Resolve(options.model);
  if (fs::exists(model / "manifest.json")) {
    ctx.NoteInput("predictor_model", model.string());
    return LoadPredictor(model);
  }
  if (!options.model.empty() || !ctx.BackendIsOracle()) {
    throw Error("missing upstream predictor model " + model.string() +
                " (run `predictor train` first)");
  }
  // Oracles need no training; they answer directly.
  LengthPredictor predictor;
  predictor.model = MakeBackend(ctx.BackendConfig());
  predictor.variant = variant;
  const json data = ctx.Section("data");
  predictor.fallback_length =
      data.contains("train") ? MeanReferenceLength(ctx.LoadSplit(Split::kTrain))
                             : 0.0;
  ctx.NoteInput("predictor_model", "oracle:" + predictor.model.type());
  return predictor;
}

PredictorVariant ConfiguredVariant(const Context& ctx) {
  const json section = ctx.Section("predictor");
  if (section.contains("variant")) {
    return ParsePredictorVariant(section["variant"].get<std::string>());
  }
  return DefaultVariant(ctx.Format());
}

void RunPredictorTrain(Context& ctx, const Options&) {
  const fs::path dir = ctx.StepDir("predictor-train");
  const PredictorVariant variant = ConfiguredVariant(ctx);
  std::vector<Example> train =
      ctx.LoadSplit(SplitOr(ctx, "predictor", "train_split", "train"));
  BackendHandle backend = MakeBackend(ctx.BackendConfig());
  LengthPredictor predictor =
      TrainPredictor(variant, train, backend, ctx.Training());
  SavePredictor(predictor, dir / "model");
  ctx.Record("model");
  ctx.WriteManifest(dir, {{"variant", VariantName(variant)},
                          {"pairs", BuildPredictorPairs(variant, train).size()},
                          {"fallback_length", predictor.fallback_length}});
  ctx.out() << "trained " << VariantName(variant) << " predictor on "
            << train.size() << " examples -> " << (dir / "model").string()
            << "\n";
}

void RunPredictorEval(Context& ctx, const Options& options) {
  const fs::path dir = ctx.StepDir("predictor-eval");
  const PredictorVariant variant = ConfiguredVariant(ctx);
  LengthPredictor predictor = ObtainPredictor(ctx, options, variant);
  const Split split = SplitOr(ctx, "predictor", "eval_split", "test");
  std::vector<Example> test = ctx.LoadSplit(split);
  std::vector<LengthPrediction> predictions =
      PredictCorpus(predictor, test, ctx.Decoding(), ctx.workers());
  const double delta = EvaluatePredictor(predictions, test);
  int fallbacks = 0;
  for (const LengthPrediction& p : predictions) fallbacks += p.fallback_used;

  ordered_json report = {{"variant", VariantName(predictor.variant)},
                         {"split", SplitName(split)},
                         {"examples", test.size()},
                         {"length_delta", delta},
                         {"fallbacks", fallbacks}};
  bool multi_reference = true;
  for (const Example& e : test) multi_reference &= e.refs.size() >= 2;
  report["inter_human_length_delta"] =
      multi_reference ? ordered_json(InterHumanLengthDelta(test))
                      : ordered_json();

  SaveLengthPredictions(dir / "predictions.jsonl", predictions);
  ctx.Record("predictions.jsonl");
  ctx.Emit(dir, "report.json", report.dump(2) + "\n");
  std::string csv = "variant,split,examples,length_delta,fallbacks\n" +
                    std::string(VariantName(predictor.variant)) + "," +
                    std::string(SplitName(split)) + "," +
                    std::to_string(test.size()) + "," + Fixed(delta, 6) + "," +
                    std::to_string(fallbacks) + "\n";
  ctx.Emit(dir, "report.csv", csv);
  ctx.WriteManifest(dir);
  ctx.out() << "| Model | Len. Delta |\n|---|---|\n| "
            << VariantName(predictor.variant) << " | " << Fixed(delta, 2)
            << " |\n";
  if (multi_reference) {
    ctx.out() << "| Inter-human | "
              << Fixed(report["inter_human_length_delta"].get<double>(), 2)
              << " |\n";
  }
}

void RunPredictorEmit(Context& ctx, const Options& options) {
  const fs::path dir = ctx.StepDir("predictor-emit");
  LengthPredictor predictor =
      ObtainPredictor(ctx, options, ConfiguredVariant(ctx));
  std::vector<Example> corpus =
      ctx.LoadSplit(SplitOr(ctx, "predictor", "emit_split", "test"));
  std::vector<LengthPrediction> predictions =
      PredictCorpus(predictor, corpus, ctx.Decoding(), ctx.workers());
  SaveLengthPredictions(dir / "pseudo_lengths.jsonl", predictions);
  ctx.Record("pseudo_lengths.jsonl");
  ctx.WriteManifest(dir);
  ctx.out() << "wrote " << predictions.size() << " pseudo lengths -> "
            << (dir / "pseudo_lengths.jsonl").string() << "\n";
}

// ---------------------------------------------------------------------------
// summarizer

SummarizerMode ConfiguredMode(const Context& ctx) {
  const json section = ctx.Section("summarizer");
  SummarizerMode mode;
  mode.length_aware = section.value("length_aware", true);
  mode.multitask = section.value("multitask", false);
  return mode;
}

Summarizer ObtainSummarizer(Context& ctx, const Options& options) {
  fs::path model = options.model.empty()
                       ? ctx.StepDir("summarizer-train") / "model"
                       : ctx.Resolve(options.model);
  if (fs::exists(model / "manifest.json")) {
    ctx.NoteInput("summarizer_model", model.string());
    return LoadSummarizer(model);
  }
  if (!options.model.empty() || !ctx.BackendIsOracle()) {
    throw Error("missing upstream summarizer model " + model.string() +
                " (run `summarizer train` first)");
  }
  Summarizer summarizer;
  summarizer.model = MakeBackend(ctx.BackendConfig());
  summarizer.mode = ConfiguredMode(ctx);
  ctx.NoteInput("summarizer_model", "oracle:" + summarizer.model.type());
  return summarizer;
}

void RunSummarizerTrain(Context& ctx, const Options&) {
  const fs::path dir = ctx.StepDir("summarizer-train");
  const SummarizerMode mode = ConfiguredMode(ctx);
  std::vector<Example> train =
      ctx.LoadSplit(SplitOr(ctx, "summarizer", "train_split", "train"));
  Summarizer summarizer = TrainSummarizer(
      mode, train, MakeBackend(ctx.BackendConfig()), ctx.Training());
  SaveSummarizer(summarizer, dir / "model");
  ctx.Record("model");
  ctx.WriteManifest(dir, {{"mode", mode.Name()}});
  ctx.out() << "trained " << mode.Name() << " summarizer on " << train.size()
            << " examples -> " << (dir / "model").string() << "\n";
}

void RunSummarizerInfer(Context& ctx, const Options& options) {
  const fs::path dir = ctx.StepDir("summarizer-infer");
  Summarizer summarizer = ObtainSummarizer(ctx, options);
  const json section = ctx.Section("summarizer");
  LengthSource source = LengthSource::Parse(section.value(
      "length_source", summarizer.mode.length_aware ? "gold" : "none"));
  std::vector<Example> corpus =
      ctx.LoadSplit(SplitOr(ctx, "summarizer", "split", "test"));

  BudgetMap budgets;
  if (source.kind == LengthSource::Kind::kPseudo) {
    fs::path path = options.pseudo_lengths.empty()
                        ? ctx.StepDir("predictor-emit") / "pseudo_lengths.jsonl"
                        : ctx.Resolve(options.pseudo_lengths);
    if (!fs::exists(path)) {
      throw Error("missing upstream pseudo lengths " + path.string() +
                  " (run `predictor emit` first)");
    }
    ctx.NoteInput("pseudo_lengths", path.string());
    budgets = ToBudgets(LoadLengthPredictions(path));
  }
  std::vector<GenerationRecord> records = SummarizeCorpus(
      summarizer, corpus, source, &budgets, ctx.Decoding(), ctx.workers());
  SaveGenerationRecords(dir / "generations.jsonl", records);
  ctx.Record("generations.jsonl");
  ctx.WriteManifest(dir, {{"mode", summarizer.mode.Name()},
                          {"length_source", source.ToString()}});
  ctx.out() << "wrote " << records.size() << " generations ("
            << summarizer.mode.Name() << ", " << source.ToString() << ") -> "
            << (dir / "generations.jsonl").string() << "\n";
}

void RunSummarizerSweep(Context& ctx, const Options& options) {
  const fs::path dir = ctx.StepDir("summarizer-sweep");
  Summarizer summarizer = ObtainSummarizer(ctx, options);
  std::vector<int> lengths =
      options.lengths.empty() ? kSweepLengths : ParseLengths(options.lengths);
  std::vector<Example> corpus =
      ctx.LoadSplit(SplitOr(ctx, "summarizer", "split", "test"));
  if (options.limit > 0 && static_cast<size_t>(options.limit) < corpus.size()) {
    corpus.resize(options.limit);
  }
  const DecodingConfig decoding = ctx.Decoding();
  std::vector<std::vector<GenerationRecord>> per_dialogue(corpus.size());
  ParallelFor(corpus.size(), ctx.workers(), [&](size_t i) {
    per_dialogue[i] =
        LengthSweep(summarizer, corpus[i].dialogue, lengths, decoding);
  });
  std::vector<GenerationRecord> records;
  std::string csv = "example_id,requested,words\n";
  for (const auto& sweep : per_dialogue) {
    for (const GenerationRecord& r : sweep) {
      csv += r.example_id + "," + std::to_string(r.budget->value) + "," +
             std::to_string(WordCount(r.output_text)) + "\n";
      records.push_back(r);
    }
  }
  SaveGenerationRecords(dir / "sweep.jsonl", records);
  ctx.Record("sweep.jsonl");
  ctx.Emit(dir, "sweep.csv", csv);
  ctx.WriteManifest(dir, {{"lengths", lengths}});
  if (!per_dialogue.empty()) {
    ctx.out() << "| Length | Words | Output |\n|---|---|---|\n";
    for (const GenerationRecord& r : per_dialogue.front()) {
      ctx.out() << "| " << r.budget->value << " | " << WordCount(r.output_text)
                << " | " << r.output_text << " |\n";
    }
  }
}

// ---------------------------------------------------------------------------
// eval / analyze / report

// Candidates from either generation records or a corpus-shaped file.
std::vector<Candidate> LoadCandidates(const fs::path& path) {
  std::vector<Candidate> candidates;
  std::vector<json> lines = ReadJsonLines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    const json& line = lines[i];
    try {
      if (line.contains("example_id")) {
        GenerationRecord record = GenerationRecordFromJson(line);
        candidates.push_back(
            {record.example_id, record.ref_index, record.output_text});
        continue;
      }
      std::string id = line.contains("id") ? line.at("id").get<std::string>()
                                           : line.at("fname").get<std::string>();
      if (line.contains("summary1")) {
        for (int k = 1; line.contains("summary" + std::to_string(k)); ++k) {
          candidates.push_back(
              {id, k - 1, line.at("summary" + std::to_string(k)).get<std::string>()});
        }
      } else {
        candidates.push_back(
            {id, std::nullopt, line.at("summary").get<std::string>()});
      }
    } catch (const json::exception& e) {
      throw Error(path.string() + " record " + std::to_string(i + 1) + ": " +
                  e.what());
    }
  }
  if (candidates.empty()) throw Error("no candidates in " + path.string());
  return candidates;
}

enum class EvalKind { kRouge, kBertScore, kCorrelation };

void RunEval(Context& ctx, const Options& options, EvalKind kind) {
  static const std::map<EvalKind, std::string> kStep = {
      {EvalKind::kRouge, "eval-rouge"},
      {EvalKind::kBertScore, "eval-bertscore"},
      {EvalKind::kCorrelation, "eval-correlation"}};
  const fs::path dir = ctx.StepDir(kStep.at(kind));

  fs::path candidates_path;
  if (!options.candidates.empty()) {
    candidates_path = ctx.Resolve(options.candidates);
  } else if (!options.generations.empty()) {
    candidates_path = ctx.Resolve(options.generations);
  } else {
    candidates_path = ctx.StepDir("summarizer-infer") / "generations.jsonl";
  }
  if (!fs::exists(candidates_path)) {
    throw Error("missing upstream candidates " + candidates_path.string() +
                " (run `summarizer infer` first or pass --generations)");
  }
  ctx.NoteInput("candidates", candidates_path.string());
  std::vector<Candidate> candidates = LoadCandidates(candidates_path);

  std::vector<Example> references;
  if (!options.references.empty()) {
    fs::path path = ctx.Resolve(options.references);
    const Split split = SplitOr(ctx, "eval", "split", "test");
    references = LoadCorpus(path, ctx.Format(), split);
    ctx.NoteInput("references", path.string());
  } else {
    references = ctx.LoadSplit(SplitOr(ctx, "eval", "split", "test"));
  }

  std::optional<HashEmbedder> embedder;
  if (kind == EvalKind::kBertScore) embedder.emplace(ctx.Embedder());
  MetricReport report =
      EvaluateCandidates(candidates, references, ctx.Rouge(),
                         embedder ? &*embedder : nullptr, ctx.workers());
  report.note = "ROUGE tokens: lowercased, whitespace-split, edge punctuation "
                "stripped, no stemming; multiple references averaged.";
  if (embedder) {
    report.note += " BERTScore uses the deterministic hash embedder.";
  }
  const std::string label = options.label.empty() ? "system" : options.label;
  std::vector<ReportRow> rows = {{label, report}};

  ordered_json json_report = report.ToJson();
  json_report["label"] = label;
  ctx.Emit(dir, "report.json", json_report.dump(2) + "\n");
  ctx.Emit(dir, "report.csv", ReportCsv(rows));
  std::string markdown;
  switch (kind) {
    case EvalKind::kRouge: markdown = RougeMarkdown(rows); break;
    case EvalKind::kBertScore: markdown = ResultsMarkdown(rows); break;
    case EvalKind::kCorrelation: markdown = CorrelationMarkdown(rows); break;
  }
  ctx.Emit(dir, "report.md", markdown);
  ctx.WriteManifest(dir);
  ctx.out() << markdown;
}

void RunInterHuman(Context& ctx, const Options&) {
  const fs::path dir = ctx.StepDir("analyze-inter-human");
  std::vector<Example> corpus =
      ctx.LoadSplit(SplitOr(ctx, "analyze", "split", "test"));
  MetricReport report = InterHuman(corpus, ctx.Rouge(), nullptr, ctx.workers());
  report.note =
      "Unordered annotator pairs, lower index as candidate. ROUGE tokens are "
      "lowercased, whitespace-split, edge punctuation stripped, unstemmed; "
      "ROUGE-L is summary-level LCS. Other tokenizers shift ROUGE by about a "
      "point, so compare ROUGE with a 1.5-point tolerance.";
  std::vector<ReportRow> rows = {{"Inter-human", report}};
  ordered_json json_report = report.ToJson();
  json_report["label"] = "Inter-human";
  ctx.Emit(dir, "report.json", json_report.dump(2) + "\n");
  ctx.Emit(dir, "report.csv", ReportCsv(rows));
  const std::string markdown =
      RougeMarkdown(rows) + "\n" + CorrelationMarkdown(rows) + "\n" +
      report.note + "\n";
  ctx.Emit(dir, "report.md", markdown);
  ctx.WriteManifest(dir);
  ctx.out() << markdown;
}

void RunRankings(Context& ctx, const Options& options) {
  const fs::path dir = ctx.StepDir("analyze-rankings");
  if (options.input.empty()) throw Error("analyze rankings needs --input");
  const fs::path path = ctx.Resolve(options.input);
  std::ifstream in(path);
  if (!in) throw Error("cannot open ranking file " + path.string());
  json raw;
  try {
    raw = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("invalid ranking file " + path.string() + ": " + e.what());
  }
  ctx.NoteInput("rankings", path.string());
  auto scores = AggregateRankings(RankingMatrix::FromJson(raw));
  ordered_json out = ordered_json::object();
  std::string csv = "candidate,score\n";
  std::string table = "| Candidate | Ranking Score |\n|---|---|\n";
  for (const auto& [name, score] : scores) {
    out[name] = score;
    csv += name + "," + Fixed(score, 6) + "\n";
    table += "| " + name + " | " + Fixed(score, 2) + " |\n";
  }
  ctx.Emit(dir, "scores.json", out.dump(2) + "\n");
  ctx.Emit(dir, "scores.csv", csv);
  ctx.Emit(dir, "scores.md", table);
  ctx.WriteManifest(dir);
  ctx.out() << table;
}

void RunReportTables(Context& ctx, const Options& options) {
  const fs::path dir = ctx.StepDir("report-tables");
  std::vector<fs::path> inputs;
  for (const std::string& input : options.inputs) {
    inputs.push_back(ctx.Resolve(input));
  }
  if (inputs.empty()) {
    for (const char* step : {"analyze-inter-human", "eval-rouge",
                             "eval-bertscore", "eval-correlation"}) {
      fs::path candidate = ctx.StepDir(step) / "report.json";
      if (fs::exists(candidate)) inputs.push_back(candidate);
    }
  }
  if (inputs.empty()) {
    throw Error("no metric reports found under " + ctx.OutputDir().string() +
                " (run `eval` or `analyze` first, or pass --inputs)");
  }
  std::vector<ReportRow> rows;
  for (size_t i = 0; i < inputs.size(); ++i) {
    std::ifstream in(inputs[i]);
    if (!in) throw Error("cannot open report " + inputs[i].string());
    json raw;
    try {
      raw = json::parse(in);
    } catch (const json::exception& e) {
      throw Error("invalid report " + inputs[i].string() + ": " + e.what());
    }
    std::string label = i < options.labels.size()
                            ? options.labels[i]
                            : raw.value("label", inputs[i].parent_path().filename().string());
    rows.push_back({label, MetricReport::FromJson(raw)});
    ctx.NoteInput("report." + std::to_string(i), inputs[i].string());
  }
  const std::string markdown = "## ROUGE and length difference\n\n" +
                               RougeMarkdown(rows) +
                               "\n## Length correlation\n\n" +
                               CorrelationMarkdown(rows) + "\n## Summary\n\n" +
                               ResultsMarkdown(rows);
  ctx.Emit(dir, "tables.md", markdown);
  ctx.Emit(dir, "tables.csv", ReportCsv(rows));
  ctx.WriteManifest(dir);
  ctx.out() << markdown;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Dialogue summary length toolkit", "lensum"};
  app.require_subcommand(1);
  Options options;
  app.add_option("--config", options.config_path, "JSON configuration file");
  app.add_option("--output-dir", options.output_dir, "Artifact root directory");
  app.add_option("--seed", options.seed, "Random seed (overrides config)");
  app.add_option("--workers", options.workers, "Parallel workers per step");
  app.add_option("--set", options.overrides,
                 "Config override key.path=value (repeatable)");

  std::string command;
  std::function<void(Context&)> action;
  auto leaf = [&](CLI::App* group, const std::string& name,
                  const std::string& help,
                  std::function<void(Context&)> run) {
    CLI::App* sub = group->add_subcommand(name, help);
    sub->callback([&, group, name, run] {
      command = group->get_name() + " " + name;
      action = run;
    });
    return sub;
  };

  auto group = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->require_subcommand(1);
    return sub;
  };

  CLI::App* data = group("data", "Corpus statistics");
  CLI::App* stats = leaf(data, "stats", "Counts, lengths and compression rate",
                         [&](Context& ctx) { RunDataStats(ctx); });
  stats->add_option("--split", options.split, "Restrict to one split");

  CLI::App* predictor = group("predictor", "Summary-length predictor");
  for (CLI::App* sub :
       {leaf(predictor, "train", "Fine-tune a predictor",
             [&](Context& ctx) { RunPredictorTrain(ctx, options); }),
        leaf(predictor, "eval", "Length difference on a split",
             [&](Context& ctx) { RunPredictorEval(ctx, options); }),
        leaf(predictor, "emit", "Write pseudo lengths",
             [&](Context& ctx) { RunPredictorEmit(ctx, options); })}) {
    sub->add_option("--variant", options.variant,
                    "Surface|Single|SinglePlus|Multi|MultiPlus");
    sub->add_option("--split", options.split, "Split to use");
    sub->add_option("--model", options.model, "Predictor model directory");
  }

  CLI::App* summarizer = group("summarizer", "Summarizer");
  for (CLI::App* sub :
       {leaf(summarizer, "train", "Fine-tune a summarizer",
             [&](Context& ctx) { RunSummarizerTrain(ctx, options); }),
        leaf(summarizer, "infer", "Generate summaries for a split",
             [&](Context& ctx) { RunSummarizerInfer(ctx, options); })}) {
    sub->add_option("--split", options.split, "Split to use");
    sub->add_option("--model", options.model, "Summarizer model directory");
    sub->add_option("--pseudo-lengths", options.pseudo_lengths,
                    "Pseudo length file");
  }
  CLI::App* sweep = leaf(summarizer, "sweep",
                         "Generate one summary per requested length",
                         [&](Context& ctx) { RunSummarizerSweep(ctx, options); });
  sweep->add_option("--split", options.split, "Split to use");
  sweep->add_option("--model", options.model, "Summarizer model directory");
  sweep->add_option("--lengths", options.lengths,
                    "Comma-separated lengths (default 5,10,...,35)");
  sweep->add_option("--limit", options.limit, "Sweep only the first N dialogues");

  CLI::App* eval = group("eval", "Score system summaries");
  for (CLI::App* sub :
       {leaf(eval, "rouge", "ROUGE and length difference",
             [&](Context& ctx) { RunEval(ctx, options, EvalKind::kRouge); }),
        leaf(eval, "bertscore", "BERTScore with the hash embedder",
             [&](Context& ctx) { RunEval(ctx, options, EvalKind::kBertScore); }),
        leaf(eval, "correlation", "Length correlation with references",
             [&](Context& ctx) { RunEval(ctx, options, EvalKind::kCorrelation); })}) {
    sub->add_option("--generations", options.generations, "Generation records");
    sub->add_option("--candidates", options.candidates,
                    "Corpus-shaped candidate file");
    sub->add_option("--references", options.references, "Reference corpus file");
    sub->add_option("--split", options.split, "Reference split");
    sub->add_option("--label", options.label, "Row label");
  }

  CLI::App* analyze = group("analyze", "Human agreement analyses");
  leaf(analyze, "inter-human", "Agreement between reference annotators",
       [&](Context& ctx) { RunInterHuman(ctx, options); })
      ->add_option("--split", options.split, "Split to analyze");
  leaf(analyze, "rankings", "Aggregate comparative human rankings",
       [&](Context& ctx) { RunRankings(ctx, options); })
      ->add_option("--input", options.input, "Ranking matrix JSON")
      ->required();

  CLI::App* report = group("report", "Collect result tables");
  CLI::App* tables = leaf(report, "tables", "Markdown and CSV tables",
                          [&](Context& ctx) { RunReportTables(ctx, options); });
  tables->add_option("--inputs", options.inputs, "Metric report files");
  tables->add_option("--labels", options.labels, "Row labels");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }
  if (!action) {
    err << "error: no subcommand given\n";
    return 2;
  }

  try {
    ordered_json config = ordered_json::object();
    fs::path base_dir = fs::current_path();
    if (!options.config_path.empty()) {
      config = LoadConfigFile(options.config_path);
      base_dir = fs::absolute(options.config_path).parent_path();
    }
    for (const std::string& assignment : options.overrides) {
      ApplyOverride(config, assignment);
    }
    if (!options.output_dir.empty()) {
      config["output_dir"] = fs::absolute(options.output_dir).string();
    } else if (!config.contains("output_dir")) {
      const char* cache = std::getenv("LENSUM_CACHE_DIR");
      config["output_dir"] =
          cache ? (fs::path(cache) / "runs").string() : std::string("lensum-out");
    }
    if (options.seed) config["seed"] = *options.seed;
    if (!config.contains("seed")) config["seed"] = 13;
    if (options.workers) config["workers"] = *options.workers;
    if (!config.contains("workers")) config["workers"] = 1;

    const std::string group = command.substr(0, command.find(' '));
    if (!options.variant.empty()) {
      SetDefault(config, "predictor", "variant", options.variant);
    }
    if (!options.split.empty()) {
      static const std::map<std::string, std::vector<std::string>> kSplitKeys = {
          {"data", {"data", "split_filter"}},
          {"predictor", {"predictor", "split"}},
          {"summarizer", {"summarizer", "split"}},
          {"eval", {"eval", "split"}},
          {"analyze", {"analyze", "split"}}};
      auto it = kSplitKeys.find(group);
      if (it != kSplitKeys.end()) {
        if (group == "predictor") {
          for (const char* key : {"train_split", "eval_split", "emit_split"}) {
            SetDefault(config, "predictor", key, options.split);
          }
        } else {
          SetDefault(config, it->second[0], it->second[1], options.split);
        }
      }
    }
    Context ctx(command, std::move(config), base_dir, out, err);
    action(ctx);
  } catch (const Error& e) {
    err << "error: " << command << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << command << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace lensum
