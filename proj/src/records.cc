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

#include "lensum/records.h"

#include <fstream>

#include "lensum/corpus.h"
#include "lensum/error.h"

namespace lensum {

nlohmann::ordered_json ToJson(const LengthPrediction& prediction) {
  return {{"example_id", prediction.example_id},
          {"predicted", prediction.predicted},
          {"fallback_used", prediction.fallback_used}};
}

nlohmann::ordered_json ToJson(const GenerationRecord& record) {
  nlohmann::ordered_json json;
  json["example_id"] = record.example_id;
  json["ref_index"] = record.ref_index ? nlohmann::ordered_json(*record.ref_index)
                                       : nlohmann::ordered_json();
  if (record.budget) {
    json["budget"] = {{"value", record.budget->value},
                      {"source", BudgetSourceName(record.budget->source)}};
  } else {
    json["budget"] = nullptr;
  }
  json["output_text"] = record.output_text;
  json["parsed_len"] = record.parsed_len
                           ? nlohmann::ordered_json(*record.parsed_len)
                           : nlohmann::ordered_json();
  json["raw_output"] = record.raw_output;
  return json;
}

LengthPrediction LengthPredictionFromJson(const nlohmann::json& json) {
  LengthPrediction prediction;
  prediction.example_id = json.at("example_id").get<std::string>();
  prediction.predicted = json.at("predicted").get<int>();
  prediction.fallback_used = json.value("fallback_used", false);
  return prediction;
}

GenerationRecord GenerationRecordFromJson(const nlohmann::json& json) {
  GenerationRecord record;
  record.example_id = json.at("example_id").get<std::string>();
  if (json.contains("ref_index") && !json["ref_index"].is_null()) {
    record.ref_index = json["ref_index"].get<int>();
  }
  if (json.contains("budget") && !json["budget"].is_null()) {
    const nlohmann::json& budget = json["budget"];
    record.budget = MakeLengthBudget(
        budget.at("value").get<int>(),
        ParseBudgetSource(budget.at("source").get<std::string>()));
  }
  record.output_text = json.at("output_text").get<std::string>();
  if (json.contains("parsed_len") && !json["parsed_len"].is_null()) {
    record.parsed_len = json["parsed_len"].get<int>();
  }
  record.raw_output = json.value("raw_output", record.output_text);
  return record;
}

std::vector<nlohmann::json> ReadJsonLines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<nlohmann::json> lines;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (WordCount(line) == 0) continue;
    try {
      lines.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(path.string() + " line " + std::to_string(line_number) +
                  ": malformed record: " + e.what());
    }
  }
  return lines;
}

void WriteJsonLines(const std::filesystem::path& path,
                    std::span<const nlohmann::ordered_json> lines) {
  std::string text;
  for (const nlohmann::ordered_json& line : lines) {
    text += line.dump();
    text += '\n';
  }
  WriteTextFile(path, text);
}

namespace {

template <typename T, typename Parse>
std::vector<T> LoadRecords(const std::filesystem::path& path, Parse parse) {
  std::vector<nlohmann::json> lines = ReadJsonLines(path);
  std::vector<T> records;
  records.reserve(lines.size());
  for (size_t i = 0; i < lines.size(); ++i) {
    try {
      records.push_back(parse(lines[i]));
    } catch (const nlohmann::json::exception& e) {
      throw Error(path.string() + " record " + std::to_string(i + 1) + ": " +
                  e.what());
    }
  }
  return records;
}

}  // namespace

void SaveLengthPredictions(const std::filesystem::path& path,
                           std::span<const LengthPrediction> predictions) {
  std::vector<nlohmann::ordered_json> lines;
  for (const LengthPrediction& p : predictions) lines.push_back(ToJson(p));
  WriteJsonLines(path, lines);
}

std::vector<LengthPrediction> LoadLengthPredictions(
    const std::filesystem::path& path) {
  return LoadRecords<LengthPrediction>(path, LengthPredictionFromJson);
}

void SaveGenerationRecords(const std::filesystem::path& path,
                           std::span<const GenerationRecord> records) {
  std::vector<nlohmann::ordered_json> lines;
  for (const GenerationRecord& r : records) lines.push_back(ToJson(r));
  WriteJsonLines(path, lines);
}

std::vector<GenerationRecord> LoadGenerationRecords(
    const std::filesystem::path& path) {
  return LoadRecords<GenerationRecord>(path, GenerationRecordFromJson);
}

void WriteTextFile(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace lensum
