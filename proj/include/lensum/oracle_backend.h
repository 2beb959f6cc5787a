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

#ifndef LENSUM_ORACLE_BACKEND_H_
#define LENSUM_ORACLE_BACKEND_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lensum/backend.h"
#include "lensum/corpus.h"

namespace lensum {

// Reads the "Summary length: #z" budget from its input and emits exactly z
// words taken cyclically from the dialogue part of the input. Without a
// budget it emits max(1, min_new_words) words. Output is capped at
// max_new_words in total.
class LengthObedientOracle : public Backend {
 public:
  // With `emit_length_prefix` the output is "Summary length: #z. Summary: "
  // followed by the z words, as a multi-task summarizer would write it.
  explicit LengthObedientOracle(bool emit_length_prefix = false)
      : emit_length_prefix_(emit_length_prefix) {}

  BackendKind kind() const override { return BackendKind::kOracle; }
  std::string type() const override { return "length-obedient"; }

  std::string Generate(std::string_view input,
                       const DecodingConfig& config) const override;
  nlohmann::ordered_json SaveState(
      const std::filesystem::path& dir) const override;

  bool emit_length_prefix() const { return emit_length_prefix_; }

 private:
  bool emit_length_prefix_;
};

struct LookupEntry {
  std::string id;
  std::string dialogue;
  std::string output;
};

// Maps dialogues to canned outputs. The dialogue is recovered from the
// "Dialogue: {D}." part of the input; inputs without a known dialogue fall
// back to the longest entry whose dialogue occurs in the input, then to the
// default output.
class LookupOracle : public Backend {
 public:
  LookupOracle(std::vector<LookupEntry> entries,
               std::optional<std::string> default_output);

  BackendKind kind() const override { return BackendKind::kOracle; }
  std::string type() const override { return "lookup"; }

  std::string Generate(std::string_view input,
                       const DecodingConfig& config) const override;
  nlohmann::ordered_json SaveState(
      const std::filesystem::path& dir) const override;

  static std::shared_ptr<const LookupOracle> Load(
      const std::filesystem::path& dir, const nlohmann::json& state);

  const std::vector<LookupEntry>& entries() const { return entries_; }

 private:
  const LookupEntry* Find(std::string_view input) const;

  std::vector<LookupEntry> entries_;
  std::optional<std::string> default_output_;
  std::unordered_map<std::string, size_t> by_dialogue_;
};

// Echoes reference `ref_index` of every example. With `length_prefix` the
// canned output carries the multi-task "Summary length: #n. Summary: "
// prefix.
std::shared_ptr<const LookupOracle> MakeEchoReferenceOracle(
    const std::vector<Example>& examples, int ref_index, bool length_prefix,
    std::optional<std::string> default_output = std::nullopt);

std::vector<LookupEntry> LoadLookupTable(const std::filesystem::path& path);

}  // namespace lensum

#endif  // LENSUM_ORACLE_BACKEND_H_
