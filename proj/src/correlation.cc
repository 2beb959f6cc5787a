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

#include "lensum/correlation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "lensum/error.h"

namespace lensum {
namespace {

void CheckSizes(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error("correlation inputs differ in length (" +
                std::to_string(xs.size()) + " vs " + std::to_string(ys.size()) +
                ")");
  }
}

// Number of tied pairs among runs of equal adjacent values.
template <typename Equal>
long long TiedPairs(size_t n, Equal equal) {
  long long pairs = 0;
  long long run = 1;
  for (size_t i = 1; i <= n; ++i) {
    if (i < n && equal(i - 1, i)) {
      ++run;
    } else {
      pairs += run * (run - 1) / 2;
      run = 1;
    }
  }
  return pairs;
}

// Stable merge sort of `values` counting inversions.
long long MergeCount(std::vector<double>& values, std::vector<double>& buffer,
                     size_t lo, size_t hi) {
  if (hi - lo < 2) return 0;
  size_t mid = lo + (hi - lo) / 2;
  long long swaps = MergeCount(values, buffer, lo, mid) +
                    MergeCount(values, buffer, mid, hi);
  size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (values[j] < values[i]) {
      swaps += static_cast<long long>(mid - i);
      buffer[k++] = values[j++];
    } else {
      buffer[k++] = values[i++];
    }
  }
  while (i < mid) buffer[k++] = values[i++];
  while (j < hi) buffer[k++] = values[j++];
  std::copy(buffer.begin() + lo, buffer.begin() + hi, values.begin() + lo);
  return swaps;
}

}  // namespace

std::optional<double> Pearson(std::span<const double> xs,
                              std::span<const double> ys) {
  CheckSizes(xs, ys);
  const size_t n = xs.size();
  if (n < 2) return std::nullopt;
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> AverageRanks(std::span<const double> values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

std::optional<double> Spearman(std::span<const double> xs,
                               std::span<const double> ys) {
  CheckSizes(xs, ys);
  std::vector<double> rx = AverageRanks(xs);
  std::vector<double> ry = AverageRanks(ys);
  return Pearson(rx, ry);
}

std::optional<double> KendallTauB(std::span<const double> xs,
                                  std::span<const double> ys) {
  CheckSizes(xs, ys);
  const size_t n = xs.size();
  if (n < 2) return std::nullopt;
  std::vector<std::pair<double, double>> pairs(n);
  for (size_t i = 0; i < n; ++i) pairs[i] = {xs[i], ys[i]};
  std::sort(pairs.begin(), pairs.end());

  const long long total = static_cast<long long>(n) * (n - 1) / 2;
  const long long x_ties =
      TiedPairs(n, [&](size_t a, size_t b) { return pairs[a].first == pairs[b].first; });
  const long long joint_ties = TiedPairs(n, [&](size_t a, size_t b) {
    return pairs[a] == pairs[b];
  });

  std::vector<double> y(n);
  for (size_t i = 0; i < n; ++i) y[i] = pairs[i].second;
  std::vector<double> buffer(n);
  const long long discordant = MergeCount(y, buffer, 0, n);
  const long long y_ties =
      TiedPairs(n, [&](size_t a, size_t b) { return y[a] == y[b]; });

  const double denom = std::sqrt(static_cast<double>(total - x_ties) *
                                 static_cast<double>(total - y_ties));
  if (denom == 0.0) return std::nullopt;
  const double numer = static_cast<double>(total - x_ties - y_ties +
                                           joint_ties - 2 * discordant);
  return std::clamp(numer / denom, -1.0, 1.0);
}

CorrelationTriple Correlations(std::span<const double> xs,
                               std::span<const double> ys) {
  CheckSizes(xs, ys);
  if (xs.size() < 3) {
    throw Error("correlations need at least 3 observations, got " +
                std::to_string(xs.size()));
  }
  return {Pearson(xs, ys), Spearman(xs, ys), KendallTauB(xs, ys)};
}

CorrelationTriple MeanCorrelation(std::span<const CorrelationTriple> triples) {
  auto mean = [&](std::optional<double> CorrelationTriple::*member)
      -> std::optional<double> {
    double sum = 0.0;
    int count = 0;
    for (const CorrelationTriple& t : triples) {
      if (t.*member) {
        sum += *(t.*member);
        ++count;
      }
    }
    if (count == 0) return std::nullopt;
    return sum / count;
  };
  return {mean(&CorrelationTriple::pearson), mean(&CorrelationTriple::spearman),
          mean(&CorrelationTriple::kendall)};
}

}  // namespace lensum
