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

#ifndef LENSUM_TOY_BACKEND_H_
#define LENSUM_TOY_BACKEND_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "lensum/backend.h"

namespace lensum {

// A small log-linear next-word model trained with SGD. Each step scores the
// target vocabulary from hashed features of the source (bag of words,
// integers it mentions relative to the output position, and a whole-source
// fingerprint) and of the previous two output words. Decoding is beam
// search. Large enough to memorize a handful of pairs and to learn simple
// length conditioning on synthetic data; not a substitute for a pretrained
// model.
class ToyBackend : public Backend {
 public:
  ToyBackend() = default;

  BackendKind kind() const override { return BackendKind::kToy; }
  std::string type() const override { return "toy"; }

  std::string Generate(std::string_view input,
                       const DecodingConfig& config) const override;
  std::shared_ptr<const Backend> FineTune(
      std::span<const TrainPair> pairs,
      const TrainingSettings& settings) const override;
  nlohmann::ordered_json SaveState(
      const std::filesystem::path& dir) const override;
  nlohmann::ordered_json TrainingRecord() const override;

  static std::shared_ptr<const ToyBackend> Load(
      const std::filesystem::path& dir, const nlohmann::json& state,
      const nlohmann::ordered_json& training);

  size_t vocabulary_size() const { return vocab_.size(); }
  const std::vector<double>& epoch_losses() const { return epoch_losses_; }

 private:
  struct SourceContext;

  SourceContext Analyze(std::string_view source) const;
  void Features(const SourceContext& source, const std::vector<int>& prefix,
                std::vector<std::uint64_t>& out) const;
  // Unnormalized scores for every vocabulary entry.
  void Score(const std::vector<std::uint64_t>& features,
             std::vector<double>& scores) const;
  int AddWord(const std::string& word);

  // Index 0 is the end-of-summary marker.
  std::vector<std::string> vocab_ = {"</s>"};
  std::unordered_map<std::string, int> index_ = {{"</s>", 0}};
  std::unordered_map<std::uint64_t, std::vector<float>> rows_;
  nlohmann::ordered_json training_ = nullptr;
  std::vector<double> epoch_losses_;
};

}  // namespace lensum

#endif  // LENSUM_TOY_BACKEND_H_
