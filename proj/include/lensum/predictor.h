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

#ifndef LENSUM_PREDICTOR_H_
#define LENSUM_PREDICTOR_H_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lensum/backend.h"
#include "lensum/corpus.h"
#include "lensum/records.h"
#include "lensum/templates.h"

namespace lensum {

// A text-to-text summary-length predictor: the engine emits
// "Summary length: #n." (optionally followed by a summary) and the length
// is parsed back out.
struct LengthPredictor {
  BackendHandle model;
  PredictorVariant variant = PredictorVariant::kMultiPlus;
  // Mean training reference length; used when a generation cannot be parsed.
  double fallback_length = 0.0;
};

using BudgetMap = std::map<std::string, LengthBudget>;

// One pair per (example, reference).
std::vector<TrainPair> BuildPredictorPairs(PredictorVariant variant,
                                           const std::vector<Example>& train_set);

LengthPredictor TrainPredictor(PredictorVariant variant,
                               const std::vector<Example>& train_set,
                               const BackendHandle& backend,
                               const TrainingSettings& settings);

// Turns a generation into a prediction: parse, fall back to the rounded
// mean on failure, clamp to [1, 200].
LengthPrediction InterpretPrediction(std::string example_id,
                                     std::string_view generated,
                                     PredictorVariant variant,
                                     double fallback_length);

LengthPrediction PredictLength(const LengthPredictor& predictor,
                               const Dialogue& dialogue,
                               const DecodingConfig& config);

std::vector<LengthPrediction> PredictCorpus(const LengthPredictor& predictor,
                                            const std::vector<Example>& corpus,
                                            const DecodingConfig& config,
                                            int workers = 1);

// Mean over examples of the mean over references of |predicted - length|.
// Throws unless there is exactly one prediction per example.
double EvaluatePredictor(std::span<const LengthPrediction> predictions,
                         const std::vector<Example>& test_set);

BudgetMap ToBudgets(std::span<const LengthPrediction> predictions);

BudgetMap EmitPseudoLengths(const LengthPredictor& predictor,
                            const std::vector<Example>& corpus,
                            const DecodingConfig& config, int workers = 1);

// Best variant on the full datasets: MultiPlus for DialogSum, SinglePlus
// for SAMSum.
PredictorVariant DefaultVariant(CorpusFormat format);

// Picks the variant with the smallest validation length difference; ties
// go to the earlier variant in declaration order.
PredictorVariant SelectVariant(
    const std::map<PredictorVariant, double>& validation_delta);

void SavePredictor(const LengthPredictor& predictor,
                   const std::filesystem::path& dir);
LengthPredictor LoadPredictor(const std::filesystem::path& dir);

}  // namespace lensum

#endif  // LENSUM_PREDICTOR_H_
