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

#include "lensum/external_backend.h"

#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "lensum/error.h"

namespace lensum {
namespace {

std::atomic<unsigned long> exchange_counter{0};

std::string ShellQuote(std::string_view value) {
  std::string quoted = "'";
  for (char c : value) {
    if (c == '\'') {
      quoted += "'\\''";
    } else {
      quoted += c;
    }
  }
  quoted += '\'';
  return quoted;
}

std::string Substitute(std::string command,
                       const std::map<std::string, std::string>& values) {
  for (const auto& [name, value] : values) {
    const std::string placeholder = "{" + name + "}";
    const std::string quoted = ShellQuote(value);
    for (size_t pos = command.find(placeholder); pos != std::string::npos;
         pos = command.find(placeholder, pos + quoted.size())) {
      command.replace(pos, placeholder.size(), quoted);
    }
  }
  return command;
}

void RunCommand(const std::string& command, std::string_view what) {
  int status = std::system(command.c_str());
  if (status != 0) {
    throw Error(std::string(what) + " command failed with status " +
                std::to_string(status) + ": " + command);
  }
}

std::string UniqueStem() {
  return "x" + std::to_string(::getpid()) + "-" +
         std::to_string(exchange_counter.fetch_add(1));
}

std::string HexDigest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

}  // namespace

nlohmann::ordered_json ExternalBackendConfig::ToJson() const {
  return {{"checkpoint", checkpoint},
          {"generate_command", generate_command},
          {"train_command", train_command},
          {"work_dir", work_dir}};
}

ExternalBackendConfig ExternalBackendConfig::FromJson(
    const nlohmann::json& json) {
  ExternalBackendConfig config;
  config.checkpoint = json.value("checkpoint", "");
  config.generate_command = json.value("generate_command", "");
  config.train_command = json.value("train_command", "");
  config.work_dir = json.value("work_dir", "");
  return config;
}

ExternalBackend::ExternalBackend(ExternalBackendConfig config,
                                 nlohmann::ordered_json training)
    : config_(std::move(config)), training_(std::move(training)) {}

std::filesystem::path ExternalBackend::WorkDir() const {
  std::filesystem::path dir;
  if (!config_.work_dir.empty()) {
    dir = config_.work_dir;
  } else if (const char* cache = std::getenv("LENSUM_CACHE_DIR")) {
    dir = std::filesystem::path(cache) / "external";
  } else {
    dir = std::filesystem::temp_directory_path() / "lensum-external";
  }
  std::filesystem::create_directories(dir);
  return dir;
}

std::string ExternalBackend::Generate(std::string_view input,
                                      const DecodingConfig& config) const {
  std::string owned(input);
  return GenerateBatch(std::span<const std::string>(&owned, 1), config, 1)
      .front();
}

std::vector<std::string> ExternalBackend::GenerateBatch(
    std::span<const std::string> inputs, const DecodingConfig& config,
    int) const {
  if (config_.generate_command.empty()) {
    throw Error("pretrained backend has no generate_command configured");
  }
  if (inputs.empty()) return {};
  const std::filesystem::path dir = WorkDir();
  const std::string stem = UniqueStem();
  const std::filesystem::path requests = dir / (stem + ".requests.jsonl");
  const std::filesystem::path responses = dir / (stem + ".responses.jsonl");
  {
    std::ofstream out(requests, std::ios::binary);
    const nlohmann::ordered_json decoding = config.ToJson();
    for (const std::string& input : inputs) {
      nlohmann::ordered_json line = {{"input", input}};
      for (auto& [key, value] : decoding.items()) line[key] = value;
      out << line.dump() << '\n';
    }
    if (!out) throw Error("cannot write " + requests.string());
  }
  RunCommand(Substitute(config_.generate_command,
                        {{"checkpoint", config_.checkpoint},
                         {"requests", requests.string()},
                         {"responses", responses.string()}}),
             "generate");

  std::vector<std::string> outputs;
  std::ifstream in(responses);
  if (!in) throw Error("generate command wrote no " + responses.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      outputs.push_back(LimitWords(
          nlohmann::json::parse(line).at("output").get<std::string>(),
          config.max_new_words));
    } catch (const nlohmann::json::exception& e) {
      throw Error("bad response line in " + responses.string() + ": " +
                  e.what());
    }
  }
  in.close();
  if (outputs.size() != inputs.size()) {
    throw Error("generate command returned " + std::to_string(outputs.size()) +
                " outputs for " + std::to_string(inputs.size()) + " inputs");
  }
  std::filesystem::remove(requests);
  std::filesystem::remove(responses);
  return outputs;
}

std::shared_ptr<const Backend> ExternalBackend::FineTune(
    std::span<const TrainPair> pairs, const TrainingSettings& settings) const {
  if (config_.train_command.empty()) {
    throw Error("pretrained backend has no train_command configured");
  }
  const std::filesystem::path dir = WorkDir();
  const std::string stem = UniqueStem();
  const std::filesystem::path pairs_path = dir / (stem + ".pairs.jsonl");
  std::string payload;
  for (const TrainPair& pair : pairs) {
    payload += nlohmann::ordered_json{{"source", pair.source},
                                      {"target", pair.target}}
                   .dump();
    payload += '\n';
  }
  {
    std::ofstream out(pairs_path, std::ios::binary);
    out << payload;
    if (!out) throw Error("cannot write " + pairs_path.string());
  }
  const std::string digest = HexDigest(config_.checkpoint + '\n' + payload +
                                       settings.ToJson().dump());
  const std::filesystem::path output = dir / "checkpoints" / digest;
  std::filesystem::create_directories(output.parent_path());

  std::ostringstream rate;
  rate << settings.learning_rate;
  RunCommand(Substitute(config_.train_command,
                        {{"checkpoint", config_.checkpoint},
                         {"pairs", pairs_path.string()},
                         {"output_checkpoint", output.string()},
                         {"epochs", std::to_string(settings.epochs)},
                         {"learning_rate", rate.str()},
                         {"seed", std::to_string(settings.seed)}}),
             "train");
  std::filesystem::remove(pairs_path);
  if (!std::filesystem::exists(output)) {
    throw Error("train command did not produce " + output.string());
  }

  ExternalBackendConfig next = config_;
  next.checkpoint = output.string();
  nlohmann::ordered_json record = {{"settings", settings.ToJson()},
                                   {"pairs", pairs.size()},
                                   {"base_checkpoint", config_.checkpoint}};
  return std::make_shared<ExternalBackend>(std::move(next), std::move(record));
}

nlohmann::ordered_json ExternalBackend::SaveState(
    const std::filesystem::path&) const {
  return config_.ToJson();
}

}  // namespace lensum
