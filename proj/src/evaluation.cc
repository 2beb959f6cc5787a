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

#include "lensum/evaluation.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

#include "lensum/error.h"
#include "lensum/parallel.h"

namespace lensum {
namespace {

struct Partial {
  std::map<std::string, std::vector<ScoreTriple>> rouge;
  std::vector<double> length;
  std::vector<ScoreTriple> bert;
};

struct ExampleScore {
  RougeScores rouge;
  double length_delta = 0.0;
  std::optional<ScoreTriple> bert;
  int comparisons = 0;
};

void Accumulate(const std::string& candidate, const std::string& reference,
                const RougeConfig& config, const TokenEmbedder* embedder,
                Partial& partial) {
  for (const auto& [name, triple] :
       Rouge(candidate, std::span<const std::string>(&reference, 1), config)) {
    partial.rouge[name].push_back(triple);
  }
  partial.length.push_back(std::abs(WordCount(candidate) - WordCount(reference)));
  if (embedder) partial.bert.push_back(BertScore(candidate, reference, *embedder));
}

ExampleScore Finish(const Partial& partial) {
  ExampleScore score;
  for (const auto& [name, triples] : partial.rouge) {
    score.rouge[name] = MeanTriple(triples);
  }
  double sum = 0.0;
  for (double d : partial.length) sum += d;
  score.comparisons = static_cast<int>(partial.length.size());
  score.length_delta = partial.length.empty() ? 0.0 : sum / partial.length.size();
  if (!partial.bert.empty()) score.bert = MeanTriple(partial.bert);
  return score;
}

MetricReport Reduce(const std::vector<ExampleScore>& scores) {
  MetricReport report;
  report.examples = static_cast<int>(scores.size());
  std::map<std::string, std::vector<ScoreTriple>> rouge;
  std::vector<ScoreTriple> bert;
  double length = 0.0;
  for (const ExampleScore& score : scores) {
    for (const auto& [name, triple] : score.rouge) rouge[name].push_back(triple);
    if (score.bert) bert.push_back(*score.bert);
    length += score.length_delta;
    report.comparisons += score.comparisons;
  }
  for (const auto& [name, triples] : rouge) report.rouge[name] = MeanTriple(triples);
  if (!scores.empty()) report.length_delta = length / scores.size();
  if (!bert.empty()) report.bertscore = MeanTriple(bert);
  return report;
}

size_t MinReferences(const std::vector<Example>& corpus) {
  size_t k = corpus.empty() ? 0 : corpus.front().refs.size();
  for (const Example& example : corpus) k = std::min(k, example.refs.size());
  return k;
}

nlohmann::ordered_json TripleJson(const ScoreTriple& t) {
  return {{"precision", t.precision}, {"recall", t.recall}, {"f1", t.f1}};
}

ScoreTriple TripleFromJson(const nlohmann::json& json) {
  return {json.at("precision").get<double>(), json.at("recall").get<double>(),
          json.at("f1").get<double>()};
}

nlohmann::ordered_json OptionalJson(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json();
}

std::optional<double> OptionalFromJson(const nlohmann::json& json,
                                       const char* key) {
  if (!json.contains(key) || json[key].is_null()) return std::nullopt;
  return json[key].get<double>();
}

std::string Percent(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", 100.0 * v);
  return buffer;
}

std::string Percent(const std::optional<double>& v) {
  return v ? Percent(*v) : "-";
}

std::string Fixed(double v, int digits) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.*f", digits, v);
  return buffer;
}

std::string Raw(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.10g", v);
  return buffer;
}

std::string Raw(const std::optional<double>& v) { return v ? Raw(*v) : ""; }

std::string CsvField(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

const char* const kRougeNames[] = {"rouge-1", "rouge-2", "rouge-l"};

}  // namespace

double AbsLengthDifference(std::string_view candidate,
                           std::span<const std::string> references) {
  if (references.empty()) return 0.0;
  const int length = WordCount(candidate);
  double sum = 0.0;
  for (const std::string& ref : references) {
    sum += std::abs(length - WordCount(ref));
  }
  return sum / static_cast<double>(references.size());
}

nlohmann::ordered_json MetricReport::ToJson() const {
  nlohmann::ordered_json json;
  nlohmann::ordered_json rouge_json = nlohmann::ordered_json::object();
  for (const auto& [name, triple] : rouge) rouge_json[name] = TripleJson(triple);
  json["rouge"] = rouge_json;
  json["length_delta"] = length_delta;
  json["correlation"] = {{"pearson_r", OptionalJson(correlation.pearson)},
                         {"spearman_rho", OptionalJson(correlation.spearman)},
                         {"kendall_tau", OptionalJson(correlation.kendall)}};
  json["bertscore"] = bertscore ? TripleJson(*bertscore) : nlohmann::ordered_json();
  json["examples"] = examples;
  json["comparisons"] = comparisons;
  json["note"] = note;
  return json;
}

MetricReport MetricReport::FromJson(const nlohmann::json& json) {
  MetricReport report;
  try {
    for (auto& [name, triple] : json.at("rouge").items()) {
      report.rouge[name] = TripleFromJson(triple);
    }
    report.length_delta = json.at("length_delta").get<double>();
    const nlohmann::json& corr = json.at("correlation");
    report.correlation = {OptionalFromJson(corr, "pearson_r"),
                          OptionalFromJson(corr, "spearman_rho"),
                          OptionalFromJson(corr, "kendall_tau")};
    if (json.contains("bertscore") && !json["bertscore"].is_null()) {
      report.bertscore = TripleFromJson(json["bertscore"]);
    }
    report.examples = json.value("examples", 0);
    report.comparisons = json.value("comparisons", 0);
    report.note = json.value("note", "");
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed metric report: ") + e.what());
  }
  return report;
}

std::vector<Candidate> CandidatesFromRecords(
    std::span<const GenerationRecord> records) {
  std::vector<Candidate> candidates;
  candidates.reserve(records.size());
  for (const GenerationRecord& r : records) {
    candidates.push_back({r.example_id, r.ref_index, r.output_text});
  }
  return candidates;
}

MetricReport EvaluateCandidates(std::span<const Candidate> candidates,
                                const std::vector<Example>& corpus,
                                const RougeConfig& config,
                                const TokenEmbedder* embedder, int workers) {
  config.Validate();
  if (corpus.empty()) throw Error("evaluation corpus is empty");
  std::map<std::string, size_t> position;
  for (size_t e = 0; e < corpus.size(); ++e) {
    if (!position.emplace(corpus[e].id(), e).second) {
      throw Error("duplicate example id '" + corpus[e].id() + "'");
    }
  }
  std::vector<std::vector<const Candidate*>> grouped(corpus.size());
  for (const Candidate& candidate : candidates) {
    auto it = position.find(candidate.example_id);
    if (it == position.end()) {
      throw Error("candidate for unknown example '" + candidate.example_id + "'");
    }
    const Example& example = corpus[it->second];
    if (candidate.ref_index &&
        (*candidate.ref_index < 0 ||
         *candidate.ref_index >= static_cast<int>(example.refs.size()))) {
      throw Error("candidate for '" + example.id() + "' names reference " +
                  std::to_string(*candidate.ref_index) + " out of range");
    }
    grouped[it->second].push_back(&candidate);
  }
  for (size_t e = 0; e < corpus.size(); ++e) {
    if (grouped[e].empty()) {
      throw Error("no candidate for example '" + corpus[e].id() + "'");
    }
  }

  std::vector<ExampleScore> scores(corpus.size());
  ParallelFor(corpus.size(), workers, [&](size_t e) {
    Partial partial;
    for (const Candidate* candidate : grouped[e]) {
      if (candidate->ref_index) {
        Accumulate(candidate->text, corpus[e].refs[*candidate->ref_index].text,
                   config, embedder, partial);
        continue;
      }
      // Unmatched candidates average over all references first so that
      // each candidate weighs the same regardless of reference count.
      Partial inner;
      for (const SummaryRef& ref : corpus[e].refs) {
        Accumulate(candidate->text, ref.text, config, embedder, inner);
      }
      ExampleScore averaged = Finish(inner);
      for (const auto& [name, triple] : averaged.rouge) {
        partial.rouge[name].push_back(triple);
      }
      partial.length.push_back(averaged.length_delta);
      if (averaged.bert) partial.bert.push_back(*averaged.bert);
    }
    scores[e] = Finish(partial);
  });
  MetricReport report = Reduce(scores);

  const size_t annotators = MinReferences(corpus);
  if (corpus.size() >= 3) {
    std::vector<CorrelationTriple> triples;
    for (size_t a = 0; a < annotators; ++a) {
      std::vector<double> xs, ys;
      for (size_t e = 0; e < corpus.size(); ++e) {
        const Candidate* chosen = nullptr;
        for (const Candidate* c : grouped[e]) {
          if (c->ref_index && *c->ref_index == static_cast<int>(a)) {
            chosen = c;
            break;
          }
        }
        if (!chosen) {
          for (const Candidate* c : grouped[e]) {
            if (!c->ref_index) {
              chosen = c;
              break;
            }
          }
        }
        if (!chosen) continue;
        xs.push_back(WordCount(chosen->text));
        ys.push_back(corpus[e].refs[a].word_len);
      }
      if (xs.size() >= 3) triples.push_back(Correlations(xs, ys));
    }
    report.correlation = MeanCorrelation(triples);
  }
  return report;
}

MetricReport InterHuman(const std::vector<Example>& corpus,
                        const RougeConfig& config,
                        const TokenEmbedder* embedder, int workers) {
  config.Validate();
  if (corpus.empty()) throw Error("inter-human corpus is empty");
  for (const Example& example : corpus) {
    if (example.refs.size() < 2) {
      throw Error("example '" + example.id() +
                  "' has fewer than two references");
    }
  }
  std::vector<ExampleScore> scores(corpus.size());
  ParallelFor(corpus.size(), workers, [&](size_t e) {
    Partial partial;
    const std::vector<SummaryRef>& refs = corpus[e].refs;
    for (size_t i = 0; i < refs.size(); ++i) {
      for (size_t j = i + 1; j < refs.size(); ++j) {
        Accumulate(refs[i].text, refs[j].text, config, embedder, partial);
      }
    }
    scores[e] = Finish(partial);
  });
  MetricReport report = Reduce(scores);

  const size_t annotators = MinReferences(corpus);
  if (corpus.size() >= 3) {
    std::vector<CorrelationTriple> triples;
    for (size_t i = 0; i < annotators; ++i) {
      for (size_t j = i + 1; j < annotators; ++j) {
        std::vector<double> xs, ys;
        for (const Example& example : corpus) {
          xs.push_back(example.refs[i].word_len);
          ys.push_back(example.refs[j].word_len);
        }
        triples.push_back(Correlations(xs, ys));
      }
    }
    report.correlation = MeanCorrelation(triples);
  }
  return report;
}

double InterHumanLengthDelta(const std::vector<Example>& corpus) {
  if (corpus.empty()) throw Error("inter-human corpus is empty");
  double total = 0.0;
  for (const Example& example : corpus) {
    const std::vector<SummaryRef>& refs = example.refs;
    if (refs.size() < 2) {
      throw Error("example '" + example.id() +
                  "' has fewer than two references");
    }
    double sum = 0.0;
    int pairs = 0;
    for (size_t i = 0; i < refs.size(); ++i) {
      for (size_t j = i + 1; j < refs.size(); ++j) {
        sum += std::abs(refs[i].word_len - refs[j].word_len);
        ++pairs;
      }
    }
    total += sum / pairs;
  }
  return total / static_cast<double>(corpus.size());
}

std::string RougeMarkdown(std::span<const ReportRow> rows) {
  std::ostringstream out;
  out << "| Model | R-1 P | R-1 R | R-1 F | R-2 P | R-2 R | R-2 F | R-L P | "
         "R-L R | R-L F | Len. Delta |\n";
  out << "|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (const ReportRow& row : rows) {
    out << "| " << row.label;
    for (const char* name : kRougeNames) {
      auto it = row.report.rouge.find(name);
      if (it == row.report.rouge.end()) {
        out << " | - | - | -";
      } else {
        out << " | " << Percent(it->second.precision) << " | "
            << Percent(it->second.recall) << " | " << Percent(it->second.f1);
      }
    }
    out << " | " << Fixed(row.report.length_delta, 2) << " |\n";
  }
  return out.str();
}

std::string CorrelationMarkdown(std::span<const ReportRow> rows) {
  std::ostringstream out;
  out << "| Model | r | rho | tau |\n|---|---|---|---|\n";
  for (const ReportRow& row : rows) {
    const CorrelationTriple& c = row.report.correlation;
    out << "| " << row.label << " | " << Percent(c.pearson) << " | "
        << Percent(c.spearman) << " | " << Percent(c.kendall) << " |\n";
  }
  return out.str();
}

std::string ResultsMarkdown(std::span<const ReportRow> rows) {
  std::ostringstream out;
  out << "| Model | R-1 | R-2 | R-L | Len. Delta | BERTScore |\n"
         "|---|---|---|---|---|---|\n";
  for (const ReportRow& row : rows) {
    out << "| " << row.label;
    for (const char* name : kRougeNames) {
      auto it = row.report.rouge.find(name);
      out << " | " << (it == row.report.rouge.end() ? "-" : Percent(it->second.f1));
    }
    out << " | " << Fixed(row.report.length_delta, 2) << " | "
        << (row.report.bertscore ? Percent(row.report.bertscore->f1) : "-")
        << " |\n";
  }
  return out.str();
}

std::string ReportCsv(std::span<const ReportRow> rows) {
  std::ostringstream out;
  out << "label";
  for (const char* name : kRougeNames) {
    out << ',' << name << "_p," << name << "_r," << name << "_f";
  }
  out << ",length_delta,pearson_r,spearman_rho,kendall_tau,bertscore_p,"
         "bertscore_r,bertscore_f,examples,comparisons\n";
  for (const ReportRow& row : rows) {
    out << CsvField(row.label);
    for (const char* name : kRougeNames) {
      auto it = row.report.rouge.find(name);
      if (it == row.report.rouge.end()) {
        out << ",,,";
      } else {
        out << ',' << Raw(it->second.precision) << ',' << Raw(it->second.recall)
            << ',' << Raw(it->second.f1);
      }
    }
    const MetricReport& r = row.report;
    out << ',' << Raw(r.length_delta) << ',' << Raw(r.correlation.pearson) << ','
        << Raw(r.correlation.spearman) << ',' << Raw(r.correlation.kendall);
    if (r.bertscore) {
      out << ',' << Raw(r.bertscore->precision) << ',' << Raw(r.bertscore->recall)
          << ',' << Raw(r.bertscore->f1);
    } else {
      out << ",,,";
    }
    out << ',' << r.examples << ',' << r.comparisons << '\n';
  }
  return out.str();
}

}  // namespace lensum
