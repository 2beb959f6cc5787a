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

#ifndef LENSUM_RECORDS_H_
#define LENSUM_RECORDS_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "lensum/templates.h"

namespace lensum {

inline constexpr int kMaxPredictedLength = 200;

struct LengthPrediction {
  std::string example_id;
  int predicted = 1;
  bool fallback_used = false;

  bool operator==(const LengthPrediction&) const = default;
};

struct GenerationRecord {
  std::string example_id;
  // Reference whose length supplied the budget, when scoring is matched.
  std::optional<int> ref_index;
  std::optional<LengthBudget> budget;
  // The summary being scored: the generation with any length clause parsed
  // off in multi-task mode.
  std::string output_text;
  std::optional<int> parsed_len;
  // The backend's generation, verbatim.
  std::string raw_output;

  bool operator==(const GenerationRecord&) const = default;
};

nlohmann::ordered_json ToJson(const LengthPrediction& prediction);
nlohmann::ordered_json ToJson(const GenerationRecord& record);
LengthPrediction LengthPredictionFromJson(const nlohmann::json& json);
GenerationRecord GenerationRecordFromJson(const nlohmann::json& json);

// Line-delimited JSON helpers. Reading reports the offending line number.
std::vector<nlohmann::json> ReadJsonLines(const std::filesystem::path& path);
void WriteJsonLines(const std::filesystem::path& path,
                    std::span<const nlohmann::ordered_json> lines);

void SaveLengthPredictions(const std::filesystem::path& path,
                           std::span<const LengthPrediction> predictions);
std::vector<LengthPrediction> LoadLengthPredictions(
    const std::filesystem::path& path);

void SaveGenerationRecords(const std::filesystem::path& path,
                           std::span<const GenerationRecord> records);
std::vector<GenerationRecord> LoadGenerationRecords(
    const std::filesystem::path& path);

// Writes `text` to `path`, creating parent directories.
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

}  // namespace lensum

#endif  // LENSUM_RECORDS_H_
