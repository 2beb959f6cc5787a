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

#ifndef LENSUM_CORPUS_H_
#define LENSUM_CORPUS_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace lensum {

enum class CorpusFormat { kDialogSum, kSamSum };
enum class Split { kTrain, kVal, kTest };

CorpusFormat ParseCorpusFormat(std::string_view name);
std::string_view FormatName(CorpusFormat format);
Split ParseSplit(std::string_view name);
std::string_view SplitName(Split split);

// One turn of a dialogue. The source line is speaker + ":" + separator + text.
struct Utterance {
  std::string speaker;
  std::string separator = " ";
  std::string text;

  bool operator==(const Utterance&) const = default;
};

struct Dialogue {
  std::string id;
  std::vector<Utterance> turns;
  std::string raw_text;

  bool operator==(const Dialogue&) const = default;
};

struct SummaryRef {
  int annotator_id = 1;
  std::string text;
  int word_len = 0;

  bool operator==(const SummaryRef&) const = default;
};

struct Example {
  Dialogue dialogue;
  std::vector<SummaryRef> refs;
  Split split = Split::kTrain;
  // Record fields the loader does not interpret, kept for re-serialization.
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  const std::string& id() const { return dialogue.id; }
  bool operator==(const Example&) const = default;
};

struct SurfaceFeatures {
  int dialogue_word_count = 0;
  int utterance_count = 0;

  bool operator==(const SurfaceFeatures&) const = default;
};

// Number of maximal runs of non-whitespace characters.
int WordCount(std::string_view text);

// Whitespace tokens in order, consistent with WordCount.
std::vector<std::string> SplitWords(std::string_view text);

// Parses a newline-delimited dialogue into turns. Lines without a speaker
// colon continue the previous turn. Throws if the first line has no speaker.
Dialogue ParseDialogue(std::string id, std::string raw_text);

// Inverse of ParseDialogue.
std::string FlattenTurns(const std::vector<Utterance>& turns);

SurfaceFeatures ComputeSurfaceFeatures(const Dialogue& dialogue);

SummaryRef MakeSummaryRef(int annotator_id, std::string text);

struct LoadOptions {
  // Drop records that fail validation instead of failing the whole load.
  bool skip_invalid = false;
};

struct LoadResult {
  std::vector<Example> examples;
  int skipped = 0;
};

// Reads a line-delimited JSON corpus: one record per dialogue with fields
// id/dialogue/summary, or summary1..summaryN for multi-reference records.
LoadResult LoadCorpusFile(const std::filesystem::path& path,
                          CorpusFormat format, Split split,
                          const LoadOptions& options = {});

std::vector<Example> LoadCorpus(const std::filesystem::path& path,
                                CorpusFormat format, Split split);

// Parses a single record. `line_number` is only used for messages.
Example ParseRecord(std::string_view line, CorpusFormat format, Split split,
                    int line_number);

// Reference-count rules per dataset and split; throws on violation.
void ValidateExample(const Example& example, CorpusFormat format);

nlohmann::ordered_json ExampleToJson(const Example& example);
void SaveCorpus(const std::filesystem::path& path,
                const std::vector<Example>& examples);

// Sum of reference words over sum of dialogue words, over every
// (example, reference) pair.
double CompressionRate(const std::vector<Example>& corpus);

struct SplitStats {
  Split split = Split::kTrain;
  int dialogues = 0;
  int summaries = 0;
  double mean_dialogue_words = 0.0;
  double mean_summary_words = 0.0;
  double mean_turns = 0.0;
  double compression_rate = 0.0;
};

SplitStats ComputeSplitStats(Split split, const std::vector<Example>& corpus);

// Mean word length over all references of the corpus.
double MeanReferenceLength(const std::vector<Example>& corpus);

}  // namespace lensum

#endif  // LENSUM_CORPUS_H_
