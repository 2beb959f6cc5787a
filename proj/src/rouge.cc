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

#include "lensum/rouge.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <unordered_map>

#include "lensum/corpus.h"
#include "lensum/error.h"

namespace lensum {
namespace {

bool IsTokenChar(unsigned char c) { return c >= 0x80 || std::isalnum(c); }

std::string JoinGram(std::span<const std::string> tokens, size_t start, int n) {
  std::string key;
  for (int k = 0; k < n; ++k) {
    if (k > 0) key += '\x1f';
    key += tokens[start + k];
  }
  return key;
}

std::unordered_map<std::string, long long> CountGrams(
    std::span<const std::string> tokens, int n) {
  std::unordered_map<std::string, long long> counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i) ++counts[JoinGram(tokens, i, n)];
  return counts;
}

}  // namespace

ScoreTriple MakeTriple(double precision, double recall) {
  double f1 = precision + recall > 0.0
                  ? 2.0 * precision * recall / (precision + recall)
                  : 0.0;
  return {precision, recall, f1};
}

ScoreTriple TripleFromCounts(long long matched, long long candidate_total,
                             long long reference_total) {
  double p = candidate_total > 0
                 ? static_cast<double>(matched) / candidate_total
                 : 0.0;
  double r = reference_total > 0
                 ? static_cast<double>(matched) / reference_total
                 : 0.0;
  return MakeTriple(p, r);
}

ScoreTriple MeanTriple(std::span<const ScoreTriple> triples) {
  ScoreTriple mean;
  if (triples.empty()) return mean;
  for (const ScoreTriple& t : triples) {
    mean.precision += t.precision;
    mean.recall += t.recall;
    mean.f1 += t.f1;
  }
  const double n = static_cast<double>(triples.size());
  mean.precision /= n;
  mean.recall /= n;
  mean.f1 /= n;
  return mean;
}

void RougeConfig::Validate() const {
  if (n_values.empty() && !use_lcs) throw Error("no ROUGE metric enabled");
  for (int n : n_values) {
    if (n < 1) throw Error("ROUGE n must be positive");
  }
}

std::vector<std::string> RougeTokenize(std::string_view text, bool lowercase) {
  std::vector<std::string> tokens;
  for (std::string& word : SplitWords(text)) {
    size_t begin = 0;
    size_t end = word.size();
    while (begin < end && !IsTokenChar(word[begin])) ++begin;
    while (end > begin && !IsTokenChar(word[end - 1])) --end;
    if (begin == end) continue;
    std::string token = word.substr(begin, end - begin);
    if (lowercase) {
      for (char& c : token) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
    }
    tokens.push_back(std::move(token));
  }
  return tokens;
}

ScoreTriple RougeN(std::span<const std::string> candidate,
                   std::span<const std::string> reference, int n) {
  auto cand = CountGrams(candidate, n);
  auto ref = CountGrams(reference, n);
  long long matched = 0;
  for (const auto& [gram, count] : cand) {
    auto it = ref.find(gram);
    if (it != ref.end()) matched += std::min(count, it->second);
  }
  long long cand_total =
      std::max<long long>(0, static_cast<long long>(candidate.size()) - n + 1);
  long long ref_total =
      std::max<long long>(0, static_cast<long long>(reference.size()) - n + 1);
  return TripleFromCounts(matched, cand_total, ref_total);
}

int LcsLength(std::span<const int> a, std::span<const int> b) {
  if (a.empty() || b.empty()) return 0;
  const size_t words = (a.size() + 63) / 64;
  std::unordered_map<int, std::vector<std::uint64_t>> match;
  for (size_t i = 0; i < a.size(); ++i) {
    auto& bits = match[a[i]];
    if (bits.empty()) bits.assign(words, 0);
    bits[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  // Zero bits of `v` within the first |a| positions mark LCS growth.
  std::vector<std::uint64_t> v(words, ~std::uint64_t{0});
  for (int symbol : b) {
    auto it = match.find(symbol);
    if (it == match.end()) continue;
    const std::vector<std::uint64_t>& m = it->second;
    std::uint64_t carry = 0;
    for (size_t w = 0; w < words; ++w) {
      const std::uint64_t u = v[w] & m[w];
      const std::uint64_t partial = v[w] + carry;
      const std::uint64_t c1 = partial < v[w] ? 1 : 0;
      const std::uint64_t sum = partial + u;
      const std::uint64_t c2 = sum < partial ? 1 : 0;
      carry = c1 | c2;
      v[w] = sum | (v[w] & ~m[w]);
    }
  }
  int ones = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (v[i / 64] >> (i % 64) & 1) ++ones;
  }
  return static_cast<int>(a.size()) - ones;
}

ScoreTriple RougeL(std::span<const std::string> candidate,
                   std::span<const std::string> reference) {
  std::unordered_map<std::string, int> ids;
  auto to_ids = [&](std::span<const std::string> tokens) {
    std::vector<int> out;
    out.reserve(tokens.size());
    for (const std::string& token : tokens) {
      out.push_back(ids.emplace(token, static_cast<int>(ids.size())).first->second);
    }
    return out;
  };
  std::vector<int> cand = to_ids(candidate);
  std::vector<int> ref = to_ids(reference);
  // The shorter sequence goes in the bit vector.
  int lcs = cand.size() <= ref.size() ? LcsLength(cand, ref)
                                      : LcsLength(ref, cand);
  return TripleFromCounts(lcs, static_cast<long long>(cand.size()),
                          static_cast<long long>(ref.size()));
}

RougeScores Rouge(std::string_view candidate,
                  std::span<const std::string> references,
                  const RougeConfig& config) {
  config.Validate();
  if (references.empty()) throw Error("ROUGE needs at least one reference");
  std::vector<std::string> cand = RougeTokenize(candidate, config.lowercase);
  if (cand.empty()) throw Error("ROUGE candidate has no tokens");

  std::map<std::string, std::vector<ScoreTriple>> per_metric;
  for (size_t r = 0; r < references.size(); ++r) {
    std::vector<std::string> ref = RougeTokenize(references[r], config.lowercase);
    if (ref.empty()) {
      throw Error("ROUGE reference " + std::to_string(r) + " has no tokens");
    }
    for (int n : config.n_values) {
      per_metric["rouge-" + std::to_string(n)].push_back(RougeN(cand, ref, n));
    }
    if (config.use_lcs) per_metric["rouge-l"].push_back(RougeL(cand, ref));
  }
  RougeScores scores;
  for (const auto& [name, triples] : per_metric) {
    scores[name] = MeanTriple(triples);
  }
  return scores;
}

}  // namespace lensum
