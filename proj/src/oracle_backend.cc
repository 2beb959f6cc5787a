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

#include "lensum/oracle_backend.h"

#include <algorithm>
#include <fstream>

#include "lensum/error.h"
#include "lensum/templates.h"

namespace lensum {
namespace {

constexpr std::string_view kDialogueAnchor = "Dialogue: ";
constexpr char kTableName[] = "table.jsonl";
// "Summary length: #n. Summary:" is four whitespace words.
constexpr int kPrefixWords = 4;

}  // namespace

std::string LengthObedientOracle::Generate(std::string_view input,
                                           const DecodingConfig& config) const {
  std::vector<std::string> pool;
  if (size_t pos = input.find(kDialogueAnchor); pos != std::string_view::npos) {
    pool = SplitWords(input.substr(pos + kDialogueAnchor.size()));
  }
  if (pool.empty()) pool = SplitWords(input);
  if (pool.empty()) pool = {"word"};

  ParsedOutput parsed = ParseGenerated(ParseMode::kLengthOnly, input);
  int wanted = parsed.ok ? *parsed.length : std::max(1, config.min_new_words);
  const int overhead = emit_length_prefix_ ? kPrefixWords : 0;
  const int low = std::max(0, config.min_new_words - overhead);
  const int high = std::max(0, config.max_new_words - overhead);
  wanted = std::clamp(wanted, std::min(low, high), high);

  std::string words;
  for (int i = 0; i < wanted; ++i) {
    if (i > 0) words += ' ';
    words += pool[i % pool.size()];
  }
  if (!emit_length_prefix_) return words;
  return RenderLengthAndSummary(wanted, words);
}

nlohmann::ordered_json LengthObedientOracle::SaveState(
    const std::filesystem::path&) const {
  return {{"length_prefix", emit_length_prefix_}};
}

LookupOracle::LookupOracle(std::vector<LookupEntry> entries,
                           std::optional<std::string> default_output)
    : entries_(std::move(entries)), default_output_(std::move(default_output)) {
  for (size_t i = 0; i < entries_.size(); ++i) {
    by_dialogue_.emplace(entries_[i].dialogue, i);
  }
}

const LookupEntry* LookupOracle::Find(std::string_view input) const {
  if (size_t pos = input.find(kDialogueAnchor); pos != std::string_view::npos) {
    std::string_view key = input.substr(pos + kDialogueAnchor.size());
    if (!key.empty() && key.back() == '.') key.remove_suffix(1);
    auto it = by_dialogue_.find(std::string(key));
    if (it != by_dialogue_.end()) return &entries_[it->second];
  }
  const LookupEntry* best = nullptr;
  for (const LookupEntry& entry : entries_) {
    if (entry.dialogue.empty()) continue;
    if (best && entry.dialogue.size() <= best->dialogue.size()) continue;
    if (input.find(entry.dialogue) != std::string_view::npos) best = &entry;
  }
  return best;
}

std::string LookupOracle::Generate(std::string_view input,
                                   const DecodingConfig& config) const {
  if (const LookupEntry* entry = Find(input)) {
    return LimitWords(entry->output, config.max_new_words);
  }
  if (default_output_) return LimitWords(*default_output_, config.max_new_words);
  return "";
}

nlohmann::ordered_json LookupOracle::SaveState(
    const std::filesystem::path& dir) const {
  std::ofstream out(dir / kTableName, std::ios::binary);
  if (!out) throw Error("cannot write lookup table in " + dir.string());
  for (const LookupEntry& entry : entries_) {
    nlohmann::ordered_json line = {{"id", entry.id},
                                   {"dialogue", entry.dialogue},
                                   {"output", entry.output}};
    out << line.dump() << '\n';
  }
  nlohmann::ordered_json state = {{"table", kTableName},
                                  {"entries", entries_.size()}};
  state["default_output"] = default_output_ ? nlohmann::ordered_json(*default_output_)
                                            : nlohmann::ordered_json();
  return state;
}

std::shared_ptr<const LookupOracle> LookupOracle::Load(
    const std::filesystem::path& dir, const nlohmann::json& state) {
  std::vector<LookupEntry> entries =
      LoadLookupTable(dir / state.at("table").get<std::string>());
  if (entries.size() != state.at("entries").get<size_t>()) {
    throw Error("lookup table in " + dir.string() + " is incomplete");
  }
  std::optional<std::string> fallback;
  if (state.contains("default_output") && state["default_output"].is_string()) {
    fallback = state["default_output"].get<std::string>();
  }
  return std::make_shared<LookupOracle>(std::move(entries), fallback);
}

std::vector<LookupEntry> LoadLookupTable(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lookup table " + path.string());
  std::vector<LookupEntry> entries;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (WordCount(line) == 0) continue;
    try {
      nlohmann::json record = nlohmann::json::parse(line);
      entries.push_back({record.at("id").get<std::string>(),
                         record.at("dialogue").get<std::string>(),
                         record.at("output").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(path.string() + " line " + std::to_string(line_number) +
                  ": " + e.what());
    }
  }
  return entries;
}

std::shared_ptr<const LookupOracle> MakeEchoReferenceOracle(
    const std::vector<Example>& examples, int ref_index, bool length_prefix,
    std::optional<std::string> default_output) {
  std::vector<LookupEntry> entries;
  entries.reserve(examples.size());
  for (const Example& example : examples) {
    entries.push_back({example.id(), example.dialogue.raw_text,
                       RenderLengthAwareTarget(length_prefix, example,
                                               ref_index)});
  }
  return std::make_shared<LookupOracle>(std::move(entries),
                                        std::move(default_output));
}

}  // namespace lensum
