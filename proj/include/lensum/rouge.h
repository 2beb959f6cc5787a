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

#ifndef LENSUM_ROUGE_H_
#define LENSUM_ROUGE_H_

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lensum {

struct ScoreTriple {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// f1 = 2PR / (P + R), or 0 when P + R is 0.
ScoreTriple MakeTriple(double precision, double recall);
// Counts-based triple; an empty denominator contributes 0.
ScoreTriple TripleFromCounts(long long matched, long long candidate_total,
                             long long reference_total);
// Component-wise mean. Empty input gives all zeros.
ScoreTriple MeanTriple(std::span<const ScoreTriple> triples);

struct RougeConfig {
  std::vector<int> n_values = {1, 2};
  bool use_lcs = true;
  bool lowercase = true;

  void Validate() const;
};

// Whitespace split, then leading and trailing non-alphanumeric characters
// are stripped from each token (bytes >= 0x80 count as alphanumeric) and
// tokens left empty are dropped. No stemming, no stopwords.
std::vector<std::string> RougeTokenize(std::string_view text, bool lowercase);

// Clipped n-gram overlap between two token sequences.
ScoreTriple RougeN(std::span<const std::string> candidate,
                   std::span<const std::string> reference, int n);

// LCS-based precision/recall over the whole token sequences.
ScoreTriple RougeL(std::span<const std::string> candidate,
                   std::span<const std::string> reference);

// Bit-parallel longest common subsequence length of two id sequences.
int LcsLength(std::span<const int> a, std::span<const int> b);

// Keys are "rouge-<n>" and "rouge-l". Multiple references are averaged.
// Throws if the candidate or any reference tokenizes to nothing.
using RougeScores = std::map<std::string, ScoreTriple>;
RougeScores Rouge(std::string_view candidate,
                  std::span<const std::string> references,
                  const RougeConfig& config = {});

}  // namespace lensum

#endif  // LENSUM_ROUGE_H_
