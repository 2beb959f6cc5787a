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

#ifndef LENSUM_BACKEND_H_
#define LENSUM_BACKEND_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace lensum {

enum class BackendKind { kPretrained, kToy, kOracle };

std::string_view BackendKindName(BackendKind kind);

struct TrainPair {
  std::string source;
  std::string target;
};

struct DecodingConfig {
  int beam_width = 4;
  int max_new_words = 100;
  int min_new_words = 1;
  std::uint64_t seed = 0;

  void Validate() const;
  nlohmann::ordered_json ToJson() const;
  static DecodingConfig FromJson(const nlohmann::json& json);
};

struct TrainingSettings {
  int epochs = 30;
  double learning_rate = 0.5;
  std::uint64_t seed = 13;
  bool shuffle = true;
  // Called once per epoch with the mean per-token training loss.
  std::function<void(int epoch, double loss)> on_epoch;

  nlohmann::ordered_json ToJson() const;
  static TrainingSettings FromJson(const nlohmann::json& json);
};

// A seq2seq engine. Implementations are immutable once constructed; all
// const members may be called concurrently.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual BackendKind kind() const = 0;
  // Registry name used in manifests ("toy", "length-obedient", ...).
  virtual std::string type() const = 0;

  virtual std::string Generate(std::string_view input,
                               const DecodingConfig& config) const = 0;

  // Default runs Generate per input on `workers` threads; output order
  // follows input order.
  virtual std::vector<std::string> GenerateBatch(
      std::span<const std::string> inputs, const DecodingConfig& config,
      int workers) const;

  // Returns a new trained engine; `this` is left unchanged.
  virtual std::shared_ptr<const Backend> FineTune(
      std::span<const TrainPair> pairs, const TrainingSettings& settings) const;

  // Writes any state files into `dir` and returns the manifest "state"
  // object describing them.
  virtual nlohmann::ordered_json SaveState(
      const std::filesystem::path& dir) const = 0;

  // Training settings and per-epoch losses, if the engine was trained.
  virtual nlohmann::ordered_json TrainingRecord() const;
};

class BackendHandle {
 public:
  BackendHandle() = default;
  explicit BackendHandle(std::shared_ptr<const Backend> impl)
      : impl_(std::move(impl)) {}

  bool valid() const { return impl_ != nullptr; }
  const Backend& get() const;
  BackendKind kind() const { return get().kind(); }
  std::string type() const { return get().type(); }

 private:
  std::shared_ptr<const Backend> impl_;
};

// Throws on empty pairs, empty pair sides, or an untrainable backend.
BackendHandle FineTune(const BackendHandle& handle,
                       std::span<const TrainPair> pairs,
                       const TrainingSettings& settings);

std::string Generate(const BackendHandle& handle, std::string_view input,
                     const DecodingConfig& config);

std::vector<std::string> GenerateBatch(const BackendHandle& handle,
                                       std::span<const std::string> inputs,
                                       const DecodingConfig& config,
                                       int workers = 1);

// Writes a self-describing directory: manifest.json plus state files.
// `metadata` is stored verbatim and returned by Restore.
void Persist(const BackendHandle& handle, const std::filesystem::path& dir,
             const nlohmann::ordered_json& metadata =
                 nlohmann::ordered_json::object());

struct RestoredBackend {
  BackendHandle handle;
  nlohmann::json metadata;
};

RestoredBackend Restore(const std::filesystem::path& dir);

// Builds an untrained engine (or oracle) from a configuration object whose
// "kind" field is one of toy, length-obedient, lookup, pretrained.
BackendHandle MakeBackend(const nlohmann::json& config);

// Truncates text to at most `max_words` whitespace words. Text within the
// limit is returned verbatim.
std::string LimitWords(std::string_view text, int max_words);

}  // namespace lensum

#endif  // LENSUM_BACKEND_H_
