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

#ifndef LENSUM_SUMMARIZER_H_
#define LENSUM_SUMMARIZER_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lensum/backend.h"
#include "lensum/corpus.h"
#include "lensum/predictor.h"
#include "lensum/records.h"
#include "lensum/templates.h"

namespace lensum {

// The four summarizer configurations: baseline, baseline with length
// output, length-aware, and length-aware with length output.
struct SummarizerMode {
  bool length_aware = false;
  bool multitask = false;

  std::string Name() const;
  bool operator==(const SummarizerMode&) const = default;
};

struct Summarizer {
  BackendHandle model;
  SummarizerMode mode;
};

// Where the inference-time length budget comes from.
struct LengthSource {
  enum class Kind { kNone, kPseudo, kGold, kFixed };

  Kind kind = Kind::kNone;
  // Reference index for kGold, word count for kFixed.
  int value = 0;

  static LengthSource None() { return {Kind::kNone, 0}; }
  static LengthSource Pseudo() { return {Kind::kPseudo, 0}; }
  static LengthSource Gold(int ref_index) { return {Kind::kGold, ref_index}; }
  static LengthSource Fixed(int words) { return {Kind::kFixed, words}; }

  // "none", "pseudo", "gold", "gold:<ref>", "fixed:<n>".
  static LengthSource Parse(std::string_view text);
  std::string ToString() const;
};

// Source text the summarizer sees for a dialogue under a given budget.
std::string RenderSummarizerInput(const SummarizerMode& mode,
                                  const Dialogue& dialogue,
                                  const std::optional<LengthBudget>& budget);

// One pair per (example, reference). Length-aware sources take the
// reference's own length when `budget_source` is gold, or the example's
// entry in `pseudo` when it is pseudo.
std::vector<TrainPair> BuildSummarizerPairs(const SummarizerMode& mode,
                                            const std::vector<Example>& corpus,
                                            BudgetSource budget_source = BudgetSource::kGold,
                                            const BudgetMap* pseudo = nullptr);

// Training always conditions on gold lengths.
Summarizer TrainSummarizer(const SummarizerMode& mode,
                           const std::vector<Example>& corpus,
                           const BackendHandle& backend,
                           const TrainingSettings& settings);

// Builds the record for a generation; in multi-task mode the length clause
// is parsed off the output.
GenerationRecord MakeRecord(const SummarizerMode& mode, std::string example_id,
                            std::optional<int> ref_index,
                            std::optional<LengthBudget> budget,
                            std::string raw_output);

// Resolves the budget an example receives under `source`. Throws when a
// length-aware mode gets no budget, a baseline mode gets one, or a needed
// pseudo length is missing.
std::optional<LengthBudget> ResolveBudget(const SummarizerMode& mode,
                                          const Example& example,
                                          const LengthSource& source,
                                          const BudgetMap* pseudo);

GenerationRecord Summarize(const Summarizer& summarizer, const Example& example,
                           const LengthSource& source, const BudgetMap* pseudo,
                           const DecodingConfig& config);

// Corpus inference. With a gold source every reference gets its own
// generation (ref_index set, scored against that reference only); the
// source's own index is ignored.
std::vector<GenerationRecord> SummarizeCorpus(const Summarizer& summarizer,
                                              const std::vector<Example>& corpus,
                                              const LengthSource& source,
                                              const BudgetMap* pseudo,
                                              const DecodingConfig& config,
                                              int workers = 1);

// One generation per requested length, in ascending order of length.
std::vector<GenerationRecord> LengthSweep(const Summarizer& summarizer,
                                          const Dialogue& dialogue,
                                          std::vector<int> lengths,
                                          const DecodingConfig& config);

void SaveSummarizer(const Summarizer& summarizer,
                    const std::filesystem::path& dir);
Summarizer LoadSummarizer(const std::filesystem::path& dir);

}  // namespace lensum

#endif  // LENSUM_SUMMARIZER_H_
