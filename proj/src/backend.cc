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

#include "lensum/backend.h"

#include <fstream>

#include "lensum/corpus.h"
#include "lensum/error.h"
#include "lensum/external_backend.h"
#include "lensum/oracle_backend.h"
#include "lensum/parallel.h"
#include "lensum/templates.h"
#include "lensum/toy_backend.h"

namespace lensum {
namespace {

constexpr int kManifestVersion = 1;
constexpr char kManifestName[] = "manifest.json";

}  // namespace

std::string_view BackendKindName(BackendKind kind) {
  switch (kind) {
    case BackendKind::kPretrained: return "pretrained";
    case BackendKind::kToy: return "toy";
    case BackendKind::kOracle: return "oracle";
  }
  return "toy";
}

void DecodingConfig::Validate() const {
  if (beam_width < 1) throw Error("beam_width must be positive");
  if (max_new_words < 1) throw Error("max_new_words must be positive");
  if (min_new_words < 0) throw Error("min_new_words must be non-negative");
  if (min_new_words > max_new_words) {
    throw Error("min_new_words exceeds max_new_words");
  }
}

nlohmann::ordered_json DecodingConfig::ToJson() const {
  return {{"beam_width", beam_width},
          {"max_new_words", max_new_words},
          {"min_new_words", min_new_words},
          {"seed", seed}};
}

DecodingConfig DecodingConfig::FromJson(const nlohmann::json& json) {
  DecodingConfig config;
  config.beam_width = json.value("beam_width", config.beam_width);
  config.max_new_words = json.value("max_new_words", config.max_new_words);
  config.min_new_words = json.value("min_new_words", config.min_new_words);
  config.seed = json.value("seed", config.seed);
  config.Validate();
  return config;
}

nlohmann::ordered_json TrainingSettings::ToJson() const {
  return {{"epochs", epochs},
          {"learning_rate", learning_rate},
          {"seed", seed},
          {"shuffle", shuffle}};
}

TrainingSettings TrainingSettings::FromJson(const nlohmann::json& json) {
  TrainingSettings settings;
  settings.epochs = json.value("epochs", settings.epochs);
  settings.learning_rate = json.value("learning_rate", settings.learning_rate);
  settings.seed = json.value("seed", settings.seed);
  settings.shuffle = json.value("shuffle", settings.shuffle);
  if (settings.epochs < 1) throw Error("epochs must be positive");
  if (!(settings.learning_rate > 0.0)) {
    throw Error("learning_rate must be positive");
  }
  return settings;
}

std::vector<std::string> Backend::GenerateBatch(
    std::span<const std::string> inputs, const DecodingConfig& config,
    int workers) const {
  std::vector<std::string> outputs(inputs.size());
  ParallelFor(inputs.size(), workers,
              [&](size_t i) { outputs[i] = Generate(inputs[i], config); });
  return outputs;
}

std::shared_ptr<const Backend> Backend::FineTune(
    std::span<const TrainPair>, const TrainingSettings&) const {
  throw Error("backend '" + type() + "' is not trainable");
}

nlohmann::ordered_json Backend::TrainingRecord() const { return nullptr; }

const Backend& BackendHandle::get() const {
  if (!impl_) throw Error("empty backend handle");
  return *impl_;
}

BackendHandle FineTune(const BackendHandle& handle,
                       std::span<const TrainPair> pairs,
                       const TrainingSettings& settings) {
  const Backend& backend = handle.get();
  if (backend.kind() == BackendKind::kOracle) {
    throw Error("oracle backend '" + backend.type() + "' is not trainable");
  }
  if (pairs.empty()) throw Error("fine-tuning needs at least one pair");
  for (size_t i = 0; i < pairs.size(); ++i) {
    if (WordCount(pairs[i].source) == 0 || WordCount(pairs[i].target) == 0) {
      throw Error("training pair " + std::to_string(i) + " has an empty side");
    }
  }
  return BackendHandle(backend.FineTune(pairs, settings));
}

std::string Generate(const BackendHandle& handle, std::string_view input,
                     const DecodingConfig& config) {
  config.Validate();
  return handle.get().Generate(input, config);
}

std::vector<std::string> GenerateBatch(const BackendHandle& handle,
                                       std::span<const std::string> inputs,
                                       const DecodingConfig& config,
                                       int workers) {
  config.Validate();
  return handle.get().GenerateBatch(inputs, config, workers);
}

void Persist(const BackendHandle& handle, const std::filesystem::path& dir,
             const nlohmann::ordered_json& metadata) {
  const Backend& backend = handle.get();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());

  nlohmann::ordered_json manifest;
  manifest["format"] = "lensum-backend";
  manifest["format_version"] = kManifestVersion;
  manifest["kind"] = BackendKindName(backend.kind());
  manifest["type"] = backend.type();
  manifest["template_version"] = kTemplateVersion;
  manifest["training"] = backend.TrainingRecord();
  manifest["state"] = backend.SaveState(dir);
  manifest["metadata"] = metadata;

  std::ofstream out(dir / kManifestName, std::ios::binary);
  if (!out) throw Error("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
  if (!out) throw Error("failed writing manifest in " + dir.string());
}

RestoredBackend Restore(const std::filesystem::path& dir) {
  std::ifstream in(dir / kManifestName, std::ios::binary);
  if (!in) throw Error("no backend manifest in " + dir.string());
  nlohmann::ordered_json manifest;
  try {
    manifest = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("corrupt backend manifest in " + dir.string() + ": " +
                e.what());
  }
  if (!manifest.is_object() || manifest.value("format", "") != "lensum-backend") {
    throw Error("not a backend manifest: " + (dir / kManifestName).string());
  }
  if (manifest.value("format_version", 0) != kManifestVersion) {
    throw Error("unsupported backend manifest version in " + dir.string());
  }
  if (manifest.value("template_version", 0) != kTemplateVersion) {
    throw Error("backend in " + dir.string() +
                " was trained with a different template version");
  }

  RestoredBackend restored;
  auto unordered = [&](const char* key) {
    return manifest.contains(key) ? nlohmann::json::parse(manifest[key].dump())
                                  : nlohmann::json::object();
  };
  restored.metadata = unordered("metadata");
  const std::string type = manifest.value("type", "");
  const nlohmann::json state = unordered("state");
  const nlohmann::ordered_json training =
      manifest.contains("training") ? manifest["training"]
                                    : nlohmann::ordered_json();
  try {
    if (type == "toy") {
      restored.handle = BackendHandle(
          ToyBackend::Load(dir, state, training));
    } else if (type == "length-obedient") {
      restored.handle = BackendHandle(std::make_shared<LengthObedientOracle>(
          state.at("length_prefix").get<bool>()));
    } else if (type == "lookup") {
      restored.handle = BackendHandle(LookupOracle::Load(dir, state));
    } else if (type == "pretrained") {
      restored.handle = BackendHandle(std::make_shared<ExternalBackend>(
          ExternalBackendConfig::FromJson(state), training));
    } else {
      throw Error("unknown backend type '" + type + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("corrupt backend state in " + dir.string() + ": " + e.what());
  }
  return restored;
}

BackendHandle MakeBackend(const nlohmann::json& config) {
  const std::string kind = config.value("kind", "toy");
  if (kind == "toy") return BackendHandle(std::make_shared<ToyBackend>());
  if (kind == "length-obedient" || kind == "oracle") {
    return BackendHandle(std::make_shared<LengthObedientOracle>(
        config.value("length_prefix", false)));
  }
  if (kind == "lookup") {
    std::optional<std::string> fallback;
    if (config.contains("default_output")) {
      fallback = config.at("default_output").get<std::string>();
    }
    if (config.contains("table")) {
      return BackendHandle(std::make_shared<LookupOracle>(
          LoadLookupTable(config.at("table").get<std::string>()), fallback));
    }
    if (config.contains("corpus")) {
      const nlohmann::json& corpus = config.at("corpus");
      std::vector<Example> examples = LoadCorpus(
          corpus.at("path").get<std::string>(),
          ParseCorpusFormat(corpus.value("format", "dialogsum")),
          ParseSplit(corpus.value("split", "test")));
      return BackendHandle(MakeEchoReferenceOracle(
          examples, config.value("ref_index", 0),
          config.value("length_prefix", false), fallback));
    }
    return BackendHandle(std::make_shared<LookupOracle>(
        std::vector<LookupEntry>{}, fallback));
  }
  if (kind == "pretrained") {
    return BackendHandle(std::make_shared<ExternalBackend>(
        ExternalBackendConfig::FromJson(config)));
  }
  throw Error("unknown backend kind '" + kind + "'");
}

std::string LimitWords(std::string_view text, int max_words) {
  if (WordCount(text) <= max_words) return std::string(text);
  std::vector<std::string> words = SplitWords(text);
  std::string out;
  for (int i = 0; i < max_words; ++i) {
    if (i > 0) out += ' ';
    out += words[i];
  }
  return out;
}

}  // namespace lensum
