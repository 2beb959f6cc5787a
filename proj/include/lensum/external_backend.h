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

#ifndef LENSUM_EXTERNAL_BACKEND_H_
#define LENSUM_EXTERNAL_BACKEND_H_

#include <filesystem>
#include <memory>
#include <string>

#include "lensum/backend.h"

namespace lensum {

// Adapter for pretrained seq2seq models (BART, T5, ...) that live outside
// this process. Training and generation are delegated to shell commands
// named in configuration; files are exchanged as JSON lines.
//
// Placeholders substituted in generate_command:
//   {checkpoint} {requests} {responses}
// Each request line is {"input", "beam_width", "max_new_words",
// "min_new_words", "seed"}; the command writes one {"output"} line per
// request, in order.
//
// Placeholders substituted in train_command:
//   {checkpoint} {pairs} {output_checkpoint} {epochs} {learning_rate} {seed}
// Pair lines are {"source", "target"}. The command writes the fine-tuned
// checkpoint to {output_checkpoint}.
struct ExternalBackendConfig {
  std::string checkpoint;
  std::string generate_command;
  std::string train_command;
  // Scratch space for exchange files; defaults to $LENSUM_CACHE_DIR or the
  // system temp directory.
  std::string work_dir;

  nlohmann::ordered_json ToJson() const;
  static ExternalBackendConfig FromJson(const nlohmann::json& json);
};

class ExternalBackend : public Backend {
 public:
  explicit ExternalBackend(ExternalBackendConfig config,
                           nlohmann::ordered_json training = nullptr);

  BackendKind kind() const override { return BackendKind::kPretrained; }
  std::string type() const override { return "pretrained"; }

  std::string Generate(std::string_view input,
                       const DecodingConfig& config) const override;
  std::vector<std::string> GenerateBatch(std::span<const std::string> inputs,
                                         const DecodingConfig& config,
                                         int workers) const override;
  std::shared_ptr<const Backend> FineTune(
      std::span<const TrainPair> pairs,
      const TrainingSettings& settings) const override;
  nlohmann::ordered_json SaveState(
      const std::filesystem::path& dir) const override;
  nlohmann::ordered_json TrainingRecord() const override { return training_; }

  const ExternalBackendConfig& config() const { return config_; }

 private:
  std::filesystem::path WorkDir() const;

  ExternalBackendConfig config_;
  nlohmann::ordered_json training_;
};

}  // namespace lensum

#endif  // LENSUM_EXTERNAL_BACKEND_H_
