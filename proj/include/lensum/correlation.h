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

#ifndef LENSUM_CORRELATION_H_
#define LENSUM_CORRELATION_H_

#include <optional>
#include <span>
#include <vector>

namespace lensum {

// Each coefficient is absent when undefined (a constant input).
struct CorrelationTriple {
  std::optional<double> pearson;
  std::optional<double> spearman;
  std::optional<double> kendall;
};

std::optional<double> Pearson(std::span<const double> xs,
                              std::span<const double> ys);

// 1-based ranks; tied values share the mean of their positions.
std::vector<double> AverageRanks(std::span<const double> values);

std::optional<double> Spearman(std::span<const double> xs,
                               std::span<const double> ys);

// Tie-corrected Kendall tau-b, O(n log n).
std::optional<double> KendallTauB(std::span<const double> xs,
                                  std::span<const double> ys);

// Throws on length mismatch or fewer than 3 observations.
CorrelationTriple Correlations(std::span<const double> xs,
                               std::span<const double> ys);

// Per-coefficient mean over the triples where it is present.
CorrelationTriple MeanCorrelation(std::span<const CorrelationTriple> triples);

}  // namespace lensum

#endif  // LENSUM_CORRELATION_H_
