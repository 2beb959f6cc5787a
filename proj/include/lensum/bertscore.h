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

#ifndef LENSUM_BERTSCORE_H_
#define LENSUM_BERTSCORE_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lensum/rouge.h"

namespace lensum {

using Embedding = std::vector<double>;

// Contextual token embedder. Must be deterministic and return one vector
// per input token; vectors are normalized by the caller.
class TokenEmbedder {
 public:
  virtual ~TokenEmbedder() = default;
  virtual std::vector<Embedding> Embed(
      std::span<const std::string> tokens) const = 0;
};

// Deterministic embedder for tests and offline runs: each lowercased token
// hashes to a pseudo-random vector, optionally blended with its immediate
// neighbours to mimic context.
class HashEmbedder : public TokenEmbedder {
 public:
  explicit HashEmbedder(int dimension = 64, double context_weight = 0.0,
                        std::uint64_t seed = 0);
  std::vector<Embedding> Embed(
      std::span<const std::string> tokens) const override;

 private:
  Embedding TokenVector(std::string_view token) const;

  int dimension_;
  double context_weight_;
  std::uint64_t seed_;
};

// Greedy cosine matching: recall averages, over reference tokens, the best
// similarity to any candidate token; precision is the mirror image. No IDF
// weighting, no baseline rescaling.
ScoreTriple GreedyMatch(std::span<const Embedding> candidate,
                        std::span<const Embedding> reference);

// Whitespace tokenization, then GreedyMatch on the embedder's vectors.
ScoreTriple BertScore(std::string_view candidate, std::string_view reference,
                      const TokenEmbedder& embedder);

}  // namespace lensum

#endif  // LENSUM_BERTSCORE_H_
