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

#include "lensum/templates.h"

#include <cctype>

#include "lensum/error.h"

namespace lensum {
namespace {

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }
bool IsDigit(char c) { return c >= '0' && c <= '9'; }

size_t SkipSpaces(std::string_view text, size_t pos) {
  while (pos < text.size() && IsSpace(text[pos])) ++pos;
  return pos;
}

// Matches `literal` at `pos`; returns the position past it or npos.
size_t Expect(std::string_view text, size_t pos, std::string_view literal) {
  if (text.substr(pos, literal.size()) != literal) return std::string_view::npos;
  return pos + literal.size();
}

struct LengthMatch {
  int value = 0;
  size_t end = 0;
};

// Finds the first well-formed "Summary length: #<digits>" clause.
std::optional<LengthMatch> FindLength(std::string_view text) {
  size_t from = 0;
  while (true) {
    size_t start = text.find("Summary", from);
    if (start == std::string_view::npos) return std::nullopt;
    from = start + 1;
    size_t pos = start + 7;
    size_t after_word = SkipSpaces(text, pos);
    if (after_word == pos) continue;
    pos = Expect(text, after_word, "length");
    if (pos == std::string_view::npos) continue;
    pos = Expect(text, SkipSpaces(text, pos), ":");
    if (pos == std::string_view::npos) continue;
    pos = Expect(text, SkipSpaces(text, pos), "#");
    if (pos == std::string_view::npos) continue;
    pos = SkipSpaces(text, pos);
    size_t digits = pos;
    while (pos < text.size() && IsDigit(text[pos])) ++pos;
    if (pos == digits || pos - digits > 9) return std::nullopt;
    int value = 0;
    for (size_t i = digits; i < pos; ++i) value = value * 10 + (text[i] - '0');
    return LengthMatch{value, pos};
  }
}

std::optional<std::string> FindSummary(std::string_view text, size_t from) {
  while (true) {
    size_t start = text.find("Summary", from);
    if (start == std::string_view::npos) return std::nullopt;
    from = start + 1;
    size_t pos = Expect(text, SkipSpaces(text, start + 7), ":");
    if (pos == std::string_view::npos) continue;
    return std::string(text.substr(SkipSpaces(text, pos)));
  }
}

const SummaryRef& RefAt(const Example& example, int ref_index) {
  if (ref_index < 0 || ref_index >= static_cast<int>(example.refs.size())) {
    throw Error("reference index " + std::to_string(ref_index) +
                " out of range for example '" + example.id() + "' with " +
                std::to_string(example.refs.size()) + " references");
  }
  return example.refs[ref_index];
}

}  // namespace

PredictorVariant ParsePredictorVariant(std::string_view name) {
  if (name == "Surface") return PredictorVariant::kSurface;
  if (name == "Single") return PredictorVariant::kSingle;
  if (name == "SinglePlus" || name == "Single+") {
    return PredictorVariant::kSinglePlus;
  }
  if (name == "Multi") return PredictorVariant::kMulti;
  if (name == "MultiPlus" || name == "Multi+") {
    return PredictorVariant::kMultiPlus;
  }
  throw Error("unknown predictor variant '" + std::string(name) + "'");
}

std::string_view VariantName(PredictorVariant variant) {
  switch (variant) {
    case PredictorVariant::kSurface: return "Surface";
    case PredictorVariant::kSingle: return "Single";
    case PredictorVariant::kSinglePlus: return "SinglePlus";
    case PredictorVariant::kMulti: return "Multi";
    case PredictorVariant::kMultiPlus: return "MultiPlus";
  }
  return "Surface";
}

bool IsMultiTask(PredictorVariant variant) {
  return variant == PredictorVariant::kMulti ||
         variant == PredictorVariant::kMultiPlus;
}

std::string_view BudgetSourceName(BudgetSource source) {
  switch (source) {
    case BudgetSource::kGold: return "gold";
    case BudgetSource::kPseudo: return "pseudo";
    case BudgetSource::kUser: return "user";
  }
  return "user";
}

BudgetSource ParseBudgetSource(std::string_view name) {
  if (name == "gold") return BudgetSource::kGold;
  if (name == "pseudo") return BudgetSource::kPseudo;
  if (name == "user") return BudgetSource::kUser;
  throw Error("unknown budget source '" + std::string(name) + "'");
}

LengthBudget MakeLengthBudget(int value, BudgetSource source) {
  if (value < kMinBudget || value > kMaxBudget) {
    throw Error("length budget " + std::to_string(value) +
                " outside [1, 1000]");
  }
  return {value, source};
}

std::string RenderSurface(const SurfaceFeatures& features) {
  return "Length of dialogue: #" +
         std::to_string(features.dialogue_word_count) +
         ". Number of utterance: #" +
         std::to_string(features.utterance_count) + ".";
}

std::string RenderDialogue(const Dialogue& dialogue) {
  return "Dialogue: " + dialogue.raw_text + ".";
}

std::string RenderPredictorInput(PredictorVariant variant,
                                 const Dialogue& dialogue) {
  switch (variant) {
    case PredictorVariant::kSurface:
      return RenderSurface(ComputeSurfaceFeatures(dialogue));
    case PredictorVariant::kSingle:
    case PredictorVariant::kMulti:
      return RenderDialogue(dialogue);
    case PredictorVariant::kSinglePlus:
    case PredictorVariant::kMultiPlus:
      return RenderSurface(ComputeSurfaceFeatures(dialogue)) + " " +
             RenderDialogue(dialogue);
  }
  return RenderDialogue(dialogue);
}

std::string RenderLengthOnly(int length) {
  return "Summary length: #" + std::to_string(length) + ".";
}

std::string RenderLengthAndSummary(int length, std::string_view summary) {
  return RenderLengthOnly(length) + " Summary: " + std::string(summary);
}

std::string RenderPredictorTarget(PredictorVariant variant,
                                  const Example& example, int ref_index) {
  const SummaryRef& ref = RefAt(example, ref_index);
  if (IsMultiTask(variant)) return RenderLengthAndSummary(ref.word_len, ref.text);
  return RenderLengthOnly(ref.word_len);
}

std::string RenderLengthAwareInput(const LengthBudget& budget,
                                   const Dialogue& dialogue) {
  return "Summary length: #" + std::to_string(budget.value) + ". " +
         RenderDialogue(dialogue);
}

std::string RenderLengthAwareTarget(bool multitask, const Example& example,
                                    int ref_index) {
  const SummaryRef& ref = RefAt(example, ref_index);
  if (!multitask) return ref.text;
  return RenderLengthAndSummary(ref.word_len, ref.text);
}

ParsedOutput ParseGenerated(ParseMode mode, std::string_view text) {
  ParsedOutput out;
  out.raw = std::string(text);
  if (mode == ParseMode::kSummaryOnly) {
    out.ok = true;
    out.summary = std::string(text);
    return out;
  }
  std::optional<LengthMatch> match = FindLength(text);
  if (!match) return out;
  out.ok = true;
  out.length = match->value;
  if (mode == ParseMode::kLengthPlusSummary) {
    out.summary = FindSummary(text, match->end);
  }
  return out;
}

}  // namespace lensum
