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

#ifndef LENSUM_RANKING_H_
#define LENSUM_RANKING_H_

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace lensum {

// Comparative human rankings. orderings[d][a] lists the candidate labels
// for dialogue d as ranked by annotator a, best first.
struct RankingMatrix {
  std::vector<std::string> candidates;
  std::vector<std::vector<std::vector<std::string>>> orderings;

  static RankingMatrix FromJson(const nlohmann::json& json);
};

// The lowest-ranked candidate of an ordering scores 0 and the highest
// scores candidates-1; returns each candidate's mean score over every
// (dialogue, annotator) ordering, in candidate order. Throws when an
// ordering is not a permutation of the candidate set.
std::vector<std::pair<std::string, double>> AggregateRankings(
    const RankingMatrix& matrix);

}  // namespace lensum

#endif  // LENSUM_RANKING_H_
