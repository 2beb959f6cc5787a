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

#include "lensum/summarizer.h"

#include <algorithm>
#include <charconv>

#include "lensum/error.h"

namespace lensum {
namespace {

int ParseInt(std::string_view text, std::string_view what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error("bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string SummarizerMode::Name() const {
  std::string name = length_aware ? "length-aware" : "baseline";
  if (multitask) name += "+length-output";
  return name;
}

LengthSource LengthSource::Parse(std::string_view text) {
  if (text == "none") return None();
  if (text == "pseudo") return Pseudo();
  if (text == "gold") return Gold(0);
  if (text.starts_with("gold:")) return Gold(ParseInt(text.substr(5), "reference index"));
  if (text.starts_with("fixed:")) {
    return Fixed(ParseInt(text.substr(6), "fixed length"));
  }
  throw Error("unknown length source '" + std::string(text) + "'");
}

std::string LengthSource::ToString() const {
  switch (kind) {
    case Kind::kNone: return "none";
    case Kind::kPseudo: return "pseudo";
    case Kind::kGold: return "gold:" + std::to_string(value);
    case Kind::kFixed: return "fixed:" + std::to_string(value);
  }
  return "none";
}

std::string RenderSummarizerInput(const SummarizerMode& mode,
                                  const Dialogue& dialogue,
                                  const std::optional<LengthBudget>& budget) {
  if (!mode.length_aware) return RenderDialogue(dialogue);
  if (!budget) {
    throw Error("length-aware summarizer needs a budget for '" + dialogue.id +
                "'");
  }
  return RenderLengthAwareInput(*budget, dialogue);
}

std::vector<TrainPair> BuildSummarizerPairs(const SummarizerMode& mode,
                                            const std::vector<Example>& corpus,
                                            BudgetSource budget_source,
                                            const BudgetMap* pseudo) {
  if (mode.length_aware && budget_source == BudgetSource::kPseudo && !pseudo) {
    throw Error("pseudo budgets requested but none supplied");
  }
  if (mode.length_aware && budget_source == BudgetSource::kUser) {
    throw Error("training pairs take gold or pseudo budgets");
  }
  std::vector<TrainPair> pairs;
  for (const Example& example : corpus) {
    for (size_t r = 0; r < example.refs.size(); ++r) {
      const int ref = static_cast<int>(r);
      std::optional<LengthBudget> budget;
      if (mode.length_aware) {
        if (budget_source == BudgetSource::kGold) {
          budget = MakeLengthBudget(std::max(1, example.refs[r].word_len),
                                    BudgetSource::kGold);
        } else {
          auto it = pseudo->find(example.id());
          if (it == pseudo->end()) {
            throw Error("no pseudo budget for example '" + example.id() + "'");
          }
          budget = it->second;
        }
      }
      pairs.push_back({RenderSummarizerInput(mode, example.dialogue, budget),
                       RenderLengthAwareTarget(mode.multitask, example, ref)});
    }
  }
  return pairs;
}

Summarizer TrainSummarizer(const SummarizerMode& mode,
                           const std::vector<Example>& corpus,
                           const BackendHandle& backend,
                           const TrainingSettings& settings) {
  if (corpus.empty()) throw Error("summarizer training corpus is empty");
  Summarizer summarizer;
  summarizer.mode = mode;
  summarizer.model = FineTune(backend, BuildSummarizerPairs(mode, corpus),
                              settings);
  return summarizer;
}

GenerationRecord MakeRecord(const SummarizerMode& mode, std::string example_id,
                            std::optional<int> ref_index,
                            std::optional<LengthBudget> budget,
                            std::string raw_output) {
  GenerationRecord record;
  record.example_id = std::move(example_id);
  record.ref_index = ref_index;
  record.budget = budget;
  record.output_text = raw_output;
  if (mode.multitask) {
    ParsedOutput parsed =
        ParseGenerated(ParseMode::kLengthPlusSummary, raw_output);
    if (parsed.ok) {
      record.parsed_len = parsed.length;
      if (parsed.summary) record.output_text = *parsed.summary;
    }
  }
  record.raw_output = std::move(raw_output);
  return record;
}

std::optional<LengthBudget> ResolveBudget(const SummarizerMode& mode,
                                          const Example& example,
                                          const LengthSource& source,
                                          const BudgetMap* pseudo) {
  if (!mode.length_aware) {
    if (source.kind != LengthSource::Kind::kNone) {
      throw Error("baseline summarizer takes no length budget (got " +
                  source.ToString() + ")");
    }
    return std::nullopt;
  }
  switch (source.kind) {
    case LengthSource::Kind::kNone:
      throw Error("length-aware summarizer needs a budget for '" +
                  example.id() + "'");
    case LengthSource::Kind::kPseudo: {
      if (!pseudo) throw Error("pseudo budgets not loaded");
      auto it = pseudo->find(example.id());
      if (it == pseudo->end()) {
        throw Error("no pseudo budget for example '" + example.id() + "'");
      }
      return MakeLengthBudget(it->second.value, BudgetSource::kPseudo);
    }
    case LengthSource::Kind::kGold: {
      if (source.value < 0 ||
          source.value >= static_cast<int>(example.refs.size())) {
        throw Error("reference index " + std::to_string(source.value) +
                    " out of range for '" + example.id() + "'");
      }
      return MakeLengthBudget(std::max(1, example.refs[source.value].word_len),
                              BudgetSource::kGold);
    }
    case LengthSource::Kind::kFixed:
      return MakeLengthBudget(source.value, BudgetSource::kUser);
  }
  return std::nullopt;
}

GenerationRecord Summarize(const Summarizer& summarizer, const Example& example,
                           const LengthSource& source, const BudgetMap* pseudo,
                           const DecodingConfig& config) {
  std::optional<LengthBudget> budget =
      ResolveBudget(summarizer.mode, example, source, pseudo);
  std::optional<int> ref_index;
  if (source.kind == LengthSource::Kind::kGold) ref_index = source.value;
  std::string raw = Generate(
      summarizer.model,
      RenderSummarizerInput(summarizer.mode, example.dialogue, budget), config);
  return MakeRecord(summarizer.mode, example.id(), ref_index, budget,
                    std::move(raw));
}

std::vector<GenerationRecord> SummarizeCorpus(const Summarizer& summarizer,
                                              const std::vector<Example>& corpus,
                                              const LengthSource& source,
                                              const BudgetMap* pseudo,
                                              const DecodingConfig& config,
                                              int workers) {
  struct Job {
    const Example* example;
    std::optional<int> ref_index;
    std::optional<LengthBudget> budget;
  };
  std::vector<Job> jobs;
  std::vector<std::string> inputs;
  for (const Example& example : corpus) {
    if (source.kind == LengthSource::Kind::kGold) {
      for (size_t r = 0; r < example.refs.size(); ++r) {
        LengthSource gold = LengthSource::Gold(static_cast<int>(r));
        jobs.push_back({&example, static_cast<int>(r),
                        ResolveBudget(summarizer.mode, example, gold, pseudo)});
      }
    } else {
      jobs.push_back({&example, std::nullopt,
                      ResolveBudget(summarizer.mode, example, source, pseudo)});
    }
    for (size_t j = inputs.size(); j < jobs.size(); ++j) {
      inputs.push_back(RenderSummarizerInput(summarizer.mode, example.dialogue,
                                             jobs[j].budget));
    }
  }
  std::vector<std::string> outputs =
      GenerateBatch(summarizer.model, inputs, config, workers);
  std::vector<GenerationRecord> records;
  records.reserve(jobs.size());
  for (size_t j = 0; j < jobs.size(); ++j) {
    records.push_back(MakeRecord(summarizer.mode, jobs[j].example->id(),
                                 jobs[j].ref_index, jobs[j].budget,
                                 std::move(outputs[j])));
  }
  return records;
}

std::vector<GenerationRecord> LengthSweep(const Summarizer& summarizer,
                                          const Dialogue& dialogue,
                                          std::vector<int> lengths,
                                          const DecodingConfig& config) {
  if (!summarizer.mode.length_aware) {
    throw Error("length sweep needs a length-aware summarizer");
  }
  if (lengths.empty()) throw Error("length sweep needs at least one length");
  std::sort(lengths.begin(), lengths.end());
  std::vector<GenerationRecord> records;
  records.reserve(lengths.size());
  for (int length : lengths) {
    LengthBudget budget = MakeLengthBudget(length, BudgetSource::kUser);
    std::string raw = Generate(
        summarizer.model, RenderLengthAwareInput(budget, dialogue), config);
    records.push_back(MakeRecord(summarizer.mode, dialogue.id, std::nullopt,
                                 budget, std::move(raw)));
  }
  return records;
}

void SaveSummarizer(const Summarizer& summarizer,
                    const std::filesystem::path& dir) {
  nlohmann::ordered_json metadata = {
      {"role", "summarizer"},
      {"length_aware", summarizer.mode.length_aware},
      {"multitask", summarizer.mode.multitask}};
  Persist(summarizer.model, dir, metadata);
}

Summarizer LoadSummarizer(const std::filesystem::path& dir) {
  RestoredBackend restored = Restore(dir);
  if (restored.metadata.value("role", "") != "summarizer") {
    throw Error(dir.string() + " does not hold a summarizer");
  }
  Summarizer summarizer;
  summarizer.model = restored.handle;
  summarizer.mode.length_aware = restored.metadata.at("length_aware").get<bool>();
  summarizer.mode.multitask = restored.metadata.at("multitask").get<bool>();
  return summarizer;
}

}  // namespace lensum
