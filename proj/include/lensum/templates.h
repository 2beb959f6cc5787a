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

#ifndef LENSUM_TEMPLATES_H_
#define LENSUM_TEMPLATES_H_

#include <optional>
#include <string>
#include <string_view>

#include "lensum/corpus.h"

namespace lensum {

// Bumped whenever any rendered format changes; persisted with trained models.
inline constexpr int kTemplateVersion = 1;

enum class PredictorVariant { kSurface, kSingle, kSinglePlus, kMulti, kMultiPlus };

PredictorVariant ParsePredictorVariant(std::string_view name);
std::string_view VariantName(PredictorVariant variant);
// Multi and MultiPlus predict the summary together with its length.
bool IsMultiTask(PredictorVariant variant);

enum class BudgetSource { kGold, kPseudo, kUser };

std::string_view BudgetSourceName(BudgetSource source);
BudgetSource ParseBudgetSource(std::string_view name);

inline constexpr int kMinBudget = 1;
inline constexpr int kMaxBudget = 1000;

// Desired summary length in words.
struct LengthBudget {
  int value = 0;
  BudgetSource source = BudgetSource::kUser;

  bool operator==(const LengthBudget&) const = default;
};

// Throws unless 1 <= value <= 1000.
LengthBudget MakeLengthBudget(int value, BudgetSource source);

std::string RenderSurface(const SurfaceFeatures& features);
// "Dialogue: {D}." over the raw dialogue text.
std::string RenderDialogue(const Dialogue& dialogue);

std::string RenderPredictorInput(PredictorVariant variant,
                                 const Dialogue& dialogue);
// `ref_index` is zero-based into example.refs.
std::string RenderPredictorTarget(PredictorVariant variant,
                                  const Example& example, int ref_index);

std::string RenderLengthAwareInput(const LengthBudget& budget,
                                   const Dialogue& dialogue);
std::string RenderLengthAwareTarget(bool multitask, const Example& example,
                                    int ref_index);

// "Summary length: #n. Summary: {s}"
std::string RenderLengthAndSummary(int length, std::string_view summary);
// "Summary length: #n."
std::string RenderLengthOnly(int length);

enum class ParseMode { kLengthOnly, kLengthPlusSummary, kSummaryOnly };

struct ParsedOutput {
  bool ok = false;
  std::optional<int> length;
  std::optional<std::string> summary;
  std::string raw;
};

// Never throws. In the length modes `ok` is false when no
// "Summary length: #<int>" anchor can be found; in kLengthPlusSummary the
// summary is whatever follows the first "Summary:" after the length clause.
ParsedOutput ParseGenerated(ParseMode mode, std::string_view text);

}  // namespace lensum

#endif  // LENSUM_TEMPLATES_H_
