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

#include "lensum/predictor.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "lensum/error.h"

namespace lensum {

std::vector<TrainPair> BuildPredictorPairs(
    PredictorVariant variant, const std::vector<Example>& train_set) {
  std::vector<TrainPair> pairs;
  for (const Example& example : train_set) {
    const std::string source = RenderPredictorInput(variant, example.dialogue);
    for (size_t r = 0; r < example.refs.size(); ++r) {
      pairs.push_back(
          {source, RenderPredictorTarget(variant, example, static_cast<int>(r))});
    }
  }
  return pairs;
}

LengthPredictor TrainPredictor(PredictorVariant variant,
                               const std::vector<Example>& train_set,
                               const BackendHandle& backend,
                               const TrainingSettings& settings) {
  if (train_set.empty()) throw Error("predictor training set is empty");
  std::vector<TrainPair> pairs = BuildPredictorPairs(variant, train_set);
  LengthPredictor predictor;
  predictor.model = FineTune(backend, pairs, settings);
  predictor.variant = variant;
  predictor.fallback_length = MeanReferenceLength(train_set);
  return predictor;
}

LengthPrediction InterpretPrediction(std::string example_id,
                                     std::string_view generated,
                                     PredictorVariant variant,
                                     double fallback_length) {
  ParsedOutput parsed = ParseGenerated(IsMultiTask(variant)
                                           ? ParseMode::kLengthPlusSummary
                                           : ParseMode::kLengthOnly,
                                       generated);
  LengthPrediction prediction;
  prediction.example_id = std::move(example_id);
  long long value;
  if (parsed.ok) {
    value = *parsed.length;
  } else {
    prediction.fallback_used = true;
    value = std::llround(fallback_length);
  }
  prediction.predicted =
      static_cast<int>(std::clamp<long long>(value, 1, kMaxPredictedLength));
  return prediction;
}

LengthPrediction PredictLength(const LengthPredictor& predictor,
                               const Dialogue& dialogue,
                               const DecodingConfig& config) {
  const std::string generated = Generate(
      predictor.model, RenderPredictorInput(predictor.variant, dialogue), config);
  return InterpretPrediction(dialogue.id, generated, predictor.variant,
                             predictor.fallback_length);
}

std::vector<LengthPrediction> PredictCorpus(const LengthPredictor& predictor,
                                            const std::vector<Example>& corpus,
                                            const DecodingConfig& config,
                                            int workers) {
  std::vector<std::string> inputs;
  inputs.reserve(corpus.size());
  for (const Example& example : corpus) {
    inputs.push_back(RenderPredictorInput(predictor.variant, example.dialogue));
  }
  std::vector<std::string> outputs =
      GenerateBatch(predictor.model, inputs, config, workers);
  std::vector<LengthPrediction> predictions;
  predictions.reserve(corpus.size());
  for (size_t i = 0; i < corpus.size(); ++i) {
    predictions.push_back(InterpretPrediction(corpus[i].id(), outputs[i],
                                              predictor.variant,
                                              predictor.fallback_length));
  }
  return predictions;
}

double EvaluatePredictor(std::span<const LengthPrediction> predictions,
                         const std::vector<Example>& test_set) {
  if (test_set.empty()) throw Error("predictor test set is empty");
  std::map<std::string, int> predicted;
  for (const LengthPrediction& p : predictions) {
    if (!predicted.emplace(p.example_id, p.predicted).second) {
      throw Error("duplicate prediction for '" + p.example_id + "'");
    }
  }
  if (predicted.size() != test_set.size()) {
    throw Error("got " + std::to_string(predicted.size()) +
                " predictions for " + std::to_string(test_set.size()) +
                " examples");
  }
  double total = 0.0;
  for (const Example& example : test_set) {
    auto it = predicted.find(example.id());
    if (it == predicted.end()) {
      throw Error("no prediction for example '" + example.id() + "'");
    }
    double sum = 0.0;
    for (const SummaryRef& ref : example.refs) {
      sum += std::abs(it->second - ref.word_len);
    }
    total += sum / static_cast<double>(example.refs.size());
  }
  return total / static_cast<double>(test_set.size());
}

BudgetMap ToBudgets(std::span<const LengthPrediction> predictions) {
  BudgetMap budgets;
  for (const LengthPrediction& p : predictions) {
    budgets[p.example_id] = MakeLengthBudget(p.predicted, BudgetSource::kPseudo);
  }
  return budgets;
}

BudgetMap EmitPseudoLengths(const LengthPredictor& predictor,
                            const std::vector<Example>& corpus,
                            const DecodingConfig& config, int workers) {
  return ToBudgets(PredictCorpus(predictor, corpus, config, workers));
}

PredictorVariant DefaultVariant(CorpusFormat format) {
  return format == CorpusFormat::kDialogSum ? PredictorVariant::kMultiPlus
                                            : PredictorVariant::kSinglePlus;
}

PredictorVariant SelectVariant(
    const std::map<PredictorVariant, double>& validation_delta) {
  if (validation_delta.empty()) throw Error("no predictor variants to select");
  auto best = validation_delta.begin();
  for (auto it = validation_delta.begin(); it != validation_delta.end(); ++it) {
    if (it->second < best->second) best = it;
  }
  return best->first;
}

void SavePredictor(const LengthPredictor& predictor,
                   const std::filesystem::path& dir) {
  nlohmann::ordered_json metadata = {
      {"role", "predictor"},
      {"variant", VariantName(predictor.variant)},
      {"fallback_length", predictor.fallback_length}};
  Persist(predictor.model, dir, metadata);
}

LengthPredictor LoadPredictor(const std::filesystem::path& dir) {
  RestoredBackend restored = Restore(dir);
  if (restored.metadata.value("role", "") != "predictor") {
    throw Error(dir.string() + " does not hold a length predictor");
  }
  LengthPredictor predictor;
  predictor.model = restored.handle;
  predictor.variant =
      ParsePredictorVariant(restored.metadata.at("variant").get<std::string>());
  predictor.fallback_length =
      restored.metadata.at("fallback_length").get<double>();
  return predictor;
}

}  // namespace lensum
