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

#ifndef LENSUM_EVALUATION_H_
#define LENSUM_EVALUATION_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lensum/bertscore.h"
#include "lensum/corpus.h"
#include "lensum/correlation.h"
#include "lensum/records.h"
#include "lensum/rouge.h"

namespace lensum {

// Mean over references of |words(candidate) - words(reference)|; 0 for no
// references.
double AbsLengthDifference(std::string_view candidate,
                           std::span<const std::string> references);

struct MetricReport {
  RougeScores rouge;
  double length_delta = 0.0;
  CorrelationTriple correlation;
  std::optional<ScoreTriple> bertscore;
  int examples = 0;
  int comparisons = 0;
  std::string note;

  nlohmann::ordered_json ToJson() const;
  static MetricReport FromJson(const nlohmann::json& json);
};

// One system summary. With ref_index set it is scored against that
// reference only; otherwise against every reference of its example.
struct Candidate {
  std::string example_id;
  std::optional<int> ref_index;
  std::string text;
};

std::vector<Candidate> CandidatesFromRecords(
    std::span<const GenerationRecord> records);

// Scores per-example candidates against a reference corpus. Per-example
// values average over that example's candidates, then over examples.
// Length correlations pair each candidate's length with the matched (or
// each) annotator's length across the corpus, averaged over annotators.
// Throws when an example has no candidate or a candidate names an unknown
// example.
MetricReport EvaluateCandidates(std::span<const Candidate> candidates,
                                const std::vector<Example>& corpus,
                                const RougeConfig& config,
                                const TokenEmbedder* embedder = nullptr,
                                int workers = 1);

// Agreement between annotators: for every unordered pair (i < j) the
// lower-index summary is the candidate and the other the reference; ROUGE
// and length difference average over pairs then examples, correlations
// are computed per pair over the corpus and averaged. Throws when an
// example has fewer than two references.
MetricReport InterHuman(const std::vector<Example>& corpus,
                        const RougeConfig& config,
                        const TokenEmbedder* embedder = nullptr,
                        int workers = 1);

// Mean over examples of the mean |len_i - len_j| over unordered annotator
// pairs. Throws when an example has fewer than two references.
double InterHumanLengthDelta(const std::vector<Example>& corpus);

struct ReportRow {
  std::string label;
  MetricReport report;
};

// Markdown tables; scores are shown as percentages with two decimals.
std::string RougeMarkdown(std::span<const ReportRow> rows);
std::string CorrelationMarkdown(std::span<const ReportRow> rows);
// F1 of each ROUGE metric, length difference and BERTScore F1 per row.
std::string ResultsMarkdown(std::span<const ReportRow> rows);
// All columns, comma separated, raw fractions.
std::string ReportCsv(std::span<const ReportRow> rows);

}  // namespace lensum

#endif  // LENSUM_EVALUATION_H_
