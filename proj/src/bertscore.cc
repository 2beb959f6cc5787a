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

#include "lensum/bertscore.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "lensum/corpus.h"
#include "lensum/error.h"

namespace lensum {
namespace {

std::uint64_t SplitMix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<Embedding> Normalized(std::vector<Embedding> vectors,
                                  size_t expected, std::string_view side) {
  if (vectors.size() != expected) {
    throw Error("embedder returned " + std::to_string(vectors.size()) +
                " vectors for " + std::to_string(expected) + " " +
                std::string(side) + " tokens");
  }
  for (Embedding& v : vectors) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) throw Error("embedder returned a zero vector");
    for (double& x : v) x /= norm;
  }
  return vectors;
}

double Dot(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size()) throw Error("embedding dimensions differ");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

HashEmbedder::HashEmbedder(int dimension, double context_weight,
                           std::uint64_t seed)
    : dimension_(dimension), context_weight_(context_weight), seed_(seed) {
  if (dimension_ < 1) throw Error("embedding dimension must be positive");
}

Embedding HashEmbedder::TokenVector(std::string_view token) const {
  std::uint64_t state = 0xcbf29ce484222325ULL ^ seed_;
  for (unsigned char c : token) {
    state ^= static_cast<unsigned char>(std::tolower(c));
    state *= 0x100000001b3ULL;
  }
  Embedding v(dimension_);
  for (double& x : v) {
    x = static_cast<double>(SplitMix(state) >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  }
  return v;
}

std::vector<Embedding> HashEmbedder::Embed(
    std::span<const std::string> tokens) const {
  std::vector<Embedding> base;
  base.reserve(tokens.size());
  for (const std::string& token : tokens) base.push_back(TokenVector(token));
  if (context_weight_ == 0.0) return base;
  std::vector<Embedding> mixed = base;
  for (size_t i = 0; i < base.size(); ++i) {
    for (int d = 0; d < dimension_; ++d) {
      if (i > 0) mixed[i][d] += context_weight_ * base[i - 1][d];
      if (i + 1 < base.size()) mixed[i][d] += context_weight_ * base[i + 1][d];
    }
  }
  return mixed;
}

ScoreTriple GreedyMatch(std::span<const Embedding> candidate,
                        std::span<const Embedding> reference) {
  if (candidate.empty() || reference.empty()) {
    throw Error("BERTScore needs tokens on both sides");
  }
  std::vector<double> best_for_cand(candidate.size(),
                                    -std::numeric_limits<double>::infinity());
  std::vector<double> best_for_ref(reference.size(),
                                   -std::numeric_limits<double>::infinity());
  for (size_t i = 0; i < candidate.size(); ++i) {
    for (size_t j = 0; j < reference.size(); ++j) {
      const double sim = Dot(candidate[i], reference[j]);
      best_for_cand[i] = std::max(best_for_cand[i], sim);
      best_for_ref[j] = std::max(best_for_ref[j], sim);
    }
  }
  double p = 0.0, r = 0.0;
  for (double s : best_for_cand) p += s;
  for (double s : best_for_ref) r += s;
  p /= static_cast<double>(candidate.size());
  r /= static_cast<double>(reference.size());
  return MakeTriple(p, r);
}

ScoreTriple BertScore(std::string_view candidate, std::string_view reference,
                      const TokenEmbedder& embedder) {
  std::vector<std::string> cand = SplitWords(candidate);
  std::vector<std::string> ref = SplitWords(reference);
  if (cand.empty()) throw Error("BERTScore candidate has no tokens");
  if (ref.empty()) throw Error("BERTScore reference has no tokens");
  std::vector<Embedding> ce = Normalized(embedder.Embed(cand), cand.size(), "candidate");
  std::vector<Embedding> re = Normalized(embedder.Embed(ref), ref.size(), "reference");
  return GreedyMatch(ce, re);
}

}  // namespace lensum
