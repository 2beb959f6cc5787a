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

#include "lensum/ranking.h"

#include <map>

#include "lensum/error.h"

namespace lensum {

RankingMatrix RankingMatrix::FromJson(const nlohmann::json& json) {
  RankingMatrix matrix;
  try {
    matrix.candidates = json.at("candidates").get<std::vector<std::string>>();
    matrix.orderings =
        json.at("orderings")
            .get<std::vector<std::vector<std::vector<std::string>>>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed ranking matrix: ") + e.what());
  }
  return matrix;
}

std::vector<std::pair<std::string, double>> AggregateRankings(
    const RankingMatrix& matrix) {
  const size_t k = matrix.candidates.size();
  if (k < 2) throw Error("ranking needs at least two candidates");
  std::map<std::string, size_t> slot;
  for (size_t i = 0; i < k; ++i) {
    if (!slot.emplace(matrix.candidates[i], i).second) {
      throw Error("duplicate candidate '" + matrix.candidates[i] + "'");
    }
  }

  std::vector<double> totals(k, 0.0);
  long long orderings = 0;
  for (size_t d = 0; d < matrix.orderings.size(); ++d) {
    for (size_t a = 0; a < matrix.orderings[d].size(); ++a) {
      const std::vector<std::string>& ordering = matrix.orderings[d][a];
      const std::string where = "dialogue " + std::to_string(d) +
                                ", annotator " + std::to_string(a);
      if (ordering.size() != k) {
        throw Error(where + ": ordering has " + std::to_string(ordering.size()) +
                    " entries, expected " + std::to_string(k));
      }
      std::vector<bool> seen(k, false);
      for (size_t p = 0; p < k; ++p) {
        auto it = slot.find(ordering[p]);
        if (it == slot.end()) {
          throw Error(where + ": unknown candidate '" + ordering[p] + "'");
        }
        if (seen[it->second]) {
          throw Error(where + ": candidate '" + ordering[p] + "' repeated");
        }
        seen[it->second] = true;
        totals[it->second] += static_cast<double>(k - 1 - p);
      }
      ++orderings;
    }
  }
  if (orderings == 0) throw Error("ranking matrix has no orderings");

  std::vector<std::pair<std::string, double>> means;
  for (size_t i = 0; i < k; ++i) {
    means.emplace_back(matrix.candidates[i],
                       totals[i] / static_cast<double>(orderings));
  }
  return means;
}

}  // namespace lensum
