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

// Acceptance checks. Prints one PASS/FAIL/SKIPPED line per criterion and
// exits non-zero if any check fails. Checks that need the public corpora
// read their paths from the environment and are skipped when unset, unless
// --require-data is given.
//
//   LENSUM_DIALOGSUM_TEST                      inter-human agreement
//   LENSUM_DIALOGSUM_{TRAIN,VAL,TEST}          compression rate
//   LENSUM_SAMSUM_{TRAIN,VAL,TEST}             compression rate

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "json.hpp"
#include "lensum/cli.h"
#include "lensum/correlation.h"
#include "lensum/corpus.h"
#include "lensum/evaluation.h"
#include "lensum/ranking.h"
#include "lensum/records.h"
#include "lensum/rouge.h"
#include "lensum/summarizer.h"
#include "lensum/templates.h"
#include "oracles.h"
#include "test_util.h"

namespace lensum {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

// Tolerances.
constexpr double kRougeTolerance = 1e-9;
constexpr double kRougeSeconds = 30.0;
constexpr double kExact = 1e-12;
constexpr double kInterHumanDelta = 4.2, kInterHumanDeltaTol = 0.15;
constexpr double kInterHumanPearson = 0.769, kInterHumanPearsonTol = 0.020;
constexpr double kInterHumanRouge1 = 0.5334, kInterHumanRouge1Tol = 0.015;
constexpr double kInterHumanSeconds = 120.0;
constexpr double kDialogSumCompression = 0.1704;
constexpr double kSamSumCompression = 0.2165;
constexpr double kCompressionTol = 0.005;
constexpr double kMemorizeSeconds = 300.0;

enum class Outcome { kPass, kFail, kSkipped };

struct Result {
  Outcome outcome = Outcome::kPass;
  std::string detail;
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Format(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
std::string Format(const char* fmt, ...) {
  char buffer[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buffer, sizeof(buffer), fmt, args);
  va_end(args);
  return buffer;
}

Result Check(bool ok, std::string detail) {
  return {ok ? Outcome::kPass : Outcome::kFail, std::move(detail)};
}

int Cli(std::vector<std::string> args, std::string* err = nullptr) {
  args.insert(args.begin(), "lensum");
  std::ostringstream out, errors;
  int status = RunCli(args, out, errors);
  if (err) *err = errors.str();
  return status;
}

std::map<std::string, std::string> Snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) {
      files[fs::relative(entry.path(), root).string()] =
          testing::ReadFile(entry.path());
    }
  }
  return files;
}

// 1. ROUGE against brute-force n-gram and DP LCS oracles.
Result RougeOracle() {
  auto start = Clock::now();
  std::mt19937_64 rng(20240101);
  double worst = 0.0;
  auto tokens = [&] {
    std::vector<std::string> out(rng() % 13);
    for (auto& t : out) t = "t" + std::to_string(rng() % 10);
    return out;
  };
  auto compare = [&](const ScoreTriple& got, const oracle::Prf& want) {
    worst = std::max({worst, std::abs(got.precision - want.p),
                      std::abs(got.recall - want.r), std::abs(got.f1 - want.f)});
  };
  for (int pair = 0; pair < 500; ++pair) {
    std::vector<std::string> cand = tokens();
    std::vector<std::string> ref = tokens();
    compare(RougeN(cand, ref, 1), oracle::RougeN(cand, ref, 1));
    compare(RougeN(cand, ref, 2), oracle::RougeN(cand, ref, 2));
    compare(RougeL(cand, ref), oracle::RougeL(cand, ref));
    if (cand.empty() || ref.empty()) continue;
    // Same pair through the text-level entry point.
    std::string cand_text, ref_text;
    for (const auto& t : cand) cand_text += t + " ";
    for (const auto& t : ref) ref_text += t + " ";
    RougeScores scores = Rouge(cand_text, std::vector<std::string>{ref_text});
    compare(scores["rouge-1"], oracle::RougeN(cand, ref, 1));
    compare(scores["rouge-2"], oracle::RougeN(cand, ref, 2));
    compare(scores["rouge-l"], oracle::RougeL(cand, ref));
  }
  double elapsed = Seconds(start);
  return Check(worst <= kRougeTolerance && elapsed < kRougeSeconds,
               Format("500 pairs, max abs error %.3g (tol %.0e), %.3fs (limit %.0fs)",
                      worst, kRougeTolerance, elapsed, kRougeSeconds));
}

// 2. Correlation worked example and monotone-map invariance.
Result CorrelationChecks() {
  std::vector<double> xs = {1, 2, 3, 4};
  std::vector<double> ys = {1, 3, 2, 4};
  double tau = KendallTauB(xs, ys).value_or(NAN);
  double rho = Spearman(xs, ys).value_or(NAN);
  bool ok = std::abs(tau - 2.0 / 3.0) <= kExact && std::abs(rho - 0.8) <= kExact;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 10.0);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    int n = 3 + static_cast<int>(rng() % 50);
    std::vector<double> a(n), b(n), fa(n), fb(n);
    for (int i = 0; i < n; ++i) {
      a[i] = std::floor(unit(rng));
      b[i] = unit(rng);
      fa[i] = std::log1p(a[i]) * 7 - 2;
      fb[i] = b[i] * b[i] * b[i];
    }
    auto t1 = KendallTauB(a, b), t2 = KendallTauB(fa, fb);
    auto s1 = Spearman(a, b), s2 = Spearman(fa, fb);
    if (!t1 || !t2 || !s1 || !s2 || std::abs(*t1 - *t2) > kExact ||
        std::abs(*s1 - *s2) > kExact) {
      ++violations;
    }
  }
  return Check(ok && violations == 0,
               Format("tau-b %.12f (want 2/3), rho %.12f (want 0.8), "
                      "monotone violations %d/100",
                      tau, rho, violations));
}

const char* Env(const char* name) {
  const char* value = std::getenv(name);
  return value && *value ? value : nullptr;
}

// 3. Inter-human agreement on the DialogSum test split.
Result InterHumanCheck() {
  const char* path = Env("LENSUM_DIALOGSUM_TEST");
  if (!path) {
    return {Outcome::kSkipped, "set LENSUM_DIALOGSUM_TEST to the DialogSum test file"};
  }
  auto start = Clock::now();
  std::vector<Example> corpus =
      LoadCorpus(path, CorpusFormat::kDialogSum, Split::kTest);
  MetricReport report = InterHuman(corpus, RougeConfig{});
  double elapsed = Seconds(start);
  double delta = report.length_delta;
  double pearson = report.correlation.pearson.value_or(NAN);
  double r1 = report.rouge["rouge-1"].f1;
  bool ok = std::abs(delta - kInterHumanDelta) <= kInterHumanDeltaTol &&
            std::abs(pearson - kInterHumanPearson) <= kInterHumanPearsonTol &&
            std::abs(r1 - kInterHumanRouge1) <= kInterHumanRouge1Tol &&
            elapsed < kInterHumanSeconds;
  return Check(ok, Format("%zu dialogues: len delta %.3f (4.2+-0.15), r %.2f "
                          "(76.9+-2.0), R-1 F1 %.2f (53.34+-1.5), %.1fs",
                          corpus.size(), delta, 100 * pearson, 100 * r1, elapsed));
}

// 4. Compression rates over the full corpora.
Result CompressionCheck() {
  struct Dataset {
    const char* name;
    CorpusFormat format;
    const char* prefix;
    double want;
  };
  const Dataset datasets[] = {
      {"DialogSum", CorpusFormat::kDialogSum, "LENSUM_DIALOGSUM_", kDialogSumCompression},
      {"SAMSum", CorpusFormat::kSamSum, "LENSUM_SAMSUM_", kSamSumCompression}};
  std::string detail;
  bool ok = true;
  int measured = 0;
  for (const Dataset& d : datasets) {
    std::vector<Example> all;
    bool complete = true;
    for (Split split : {Split::kTrain, Split::kVal, Split::kTest}) {
      std::string var = std::string(d.prefix) + (split == Split::kTrain ? "TRAIN"
                                                 : split == Split::kVal ? "VAL"
                                                                        : "TEST");
      const char* path = Env(var.c_str());
      if (!path) {
        complete = false;
        break;
      }
      std::vector<Example> part = LoadCorpus(path, d.format, split);
      all.insert(all.end(), part.begin(), part.end());
    }
    if (!detail.empty()) detail += "; ";
    if (!complete) {
      detail += std::string(d.name) + " skipped (set " + d.prefix + "{TRAIN,VAL,TEST})";
      continue;
    }
    double rate = CompressionRate(all);
    ok &= std::abs(rate - d.want) <= kCompressionTol;
    ++measured;
    detail += Format("%s %.2f%% (want %.2f%%+-0.5)", d.name, 100 * rate, 100 * d.want);
  }
  if (measured < 2) {
    return {ok ? Outcome::kSkipped : Outcome::kFail, detail};
  }
  return Check(ok, detail);
}

// 5. render -> parse recovers z for every variant.
Result TemplateBijection() {
  std::mt19937_64 rng(5);
  long checks = 0, failures = 0;
  for (int d = 0; d < 50; ++d) {
    Dialogue dialogue = ParseDialogue("d", testing::RandomDialogueText(rng));
    for (int z = 1; z <= 200; ++z) {
      Example e;
      e.dialogue = dialogue;
      std::string summary = testing::RandomSentence(rng, z, z);
      e.refs = {MakeSummaryRef(1, summary)};
      for (auto v : {PredictorVariant::kSurface, PredictorVariant::kSingle,
                     PredictorVariant::kSinglePlus, PredictorVariant::kMulti,
                     PredictorVariant::kMultiPlus}) {
        bool multi = IsMultiTask(v);
        ParsedOutput p = ParseGenerated(
            multi ? ParseMode::kLengthPlusSummary : ParseMode::kLengthOnly,
            RenderPredictorTarget(v, e, 0));
        ++checks;
        if (!p.ok || p.length != z || (multi && p.summary != summary)) ++failures;
      }
      ParsedOutput la = ParseGenerated(
          ParseMode::kLengthOnly,
          RenderLengthAwareInput(MakeLengthBudget(z, BudgetSource::kUser), dialogue));
      ParsedOutput lo = ParseGenerated(ParseMode::kLengthPlusSummary,
                                       RenderLengthAwareTarget(true, e, 0));
      checks += 2;
      failures += la.length != z;
      failures += lo.length != z || lo.summary != summary;
    }
  }
  return Check(failures == 0, Format("%ld round trips, %ld failures", checks, failures));
}

// 6. Length-obedient oracle through the CLI.
Result OraclePipeline() {
  testing::TempDir dir("accept-oracle");
  std::mt19937_64 rng(606);
  constexpr int kFixed = 12;
  std::vector<Example> fixed_corpus =
      testing::SyntheticCorpus(rng, 100, 1, Split::kTest, "f");
  for (Example& e : fixed_corpus) {
    e.refs = {MakeSummaryRef(1, testing::RandomSentence(rng, kFixed, kFixed))};
  }
  std::vector<Example> gold_corpus =
      testing::SyntheticCorpus(rng, 100, 3, Split::kTest, "g");
  SaveCorpus(dir / "fixed.jsonl", fixed_corpus);
  SaveCorpus(dir / "gold.jsonl", gold_corpus);
  json config = {{"output_dir", "runs"},
                 {"data", {{"format", "samsum"}, {"test", "fixed.jsonl"}}},
                 {"backend", {{"kind", "length-obedient"}}},
                 {"summarizer",
                  {{"length_aware", true},
                   {"length_source", "fixed:" + std::to_string(kFixed)}}}};
  testing::WriteFile(dir / "fixed.json", config.dump());
  config["data"] = {{"format", "dialogsum"}, {"test", "gold.jsonl"}};
  config["summarizer"]["length_source"] = "gold";
  config["output_dir"] = "runs-gold";
  testing::WriteFile(dir / "gold.json", config.dump());

  std::string err;
  double fixed_delta = NAN, gold_delta = NAN;
  for (const char* name : {"fixed", "gold"}) {
    std::string cfg = (dir / (std::string(name) + ".json")).string();
    for (std::vector<std::string> args :
         {std::vector<std::string>{"summarizer", "infer"}, {"eval", "rouge"}}) {
      args.insert(args.begin(), {"--config", cfg});
      if (Cli(args, &err) != 0) return Check(false, "CLI failed: " + err);
    }
    fs::path out = dir / (std::strcmp(name, "fixed") == 0 ? "runs" : "runs-gold");
    double delta = json::parse(testing::ReadFile(out / "eval-rouge/report.json"))
                       ["length_delta"].get<double>();
    (std::strcmp(name, "fixed") == 0 ? fixed_delta : gold_delta) = delta;
  }
  if (Cli({"--config", (dir / "fixed.json").string(), "summarizer", "sweep"}, &err) != 0) {
    return Check(false, "sweep failed: " + err);
  }
  int mismatched = 0, sweeps = 0;
  for (const GenerationRecord& r :
       LoadGenerationRecords(dir / "runs/summarizer-sweep/sweep.jsonl")) {
    ++sweeps;
    mismatched += WordCount(r.output_text) != r.budget->value;
  }
  return Check(fixed_delta == 0.0 && gold_delta == 0.0 && mismatched == 0 &&
                   sweeps == 700,
               Format("fixed-budget len delta %g, gold-budget len delta %g over "
                      "100 dialogues; sweep %d/%d word counts match",
                      fixed_delta, gold_delta, sweeps - mismatched, sweeps));
}

// 7. Toy backend memorizes eight pairs.
Result ToyMemorization() {
  auto start = Clock::now();
  std::mt19937_64 rng(707);
  std::vector<Example> corpus = testing::SyntheticCorpus(rng, 8, 1, Split::kTrain, "m");
  SummarizerMode mode{true, false};
  Summarizer summarizer = TrainSummarizer(mode, corpus, MakeBackend({{"kind", "toy"}}),
                                          TrainingSettings{});
  std::vector<GenerationRecord> records = SummarizeCorpus(
      summarizer, corpus, LengthSource::Gold(0), nullptr, DecodingConfig{});
  int verbatim = 0;
  double f1 = 0;
  for (size_t i = 0; i < corpus.size(); ++i) {
    verbatim += records[i].output_text == corpus[i].refs[0].text;
    std::vector<std::string> refs = {corpus[i].refs[0].text};
    f1 += WordCount(records[i].output_text) == 0
              ? 0.0
              : Rouge(records[i].output_text, refs)["rouge-1"].f1 / corpus.size();
  }
  double elapsed = Seconds(start);
  return Check(verbatim == 8 && f1 == 1.0 && elapsed < kMemorizeSeconds,
               Format("%d/8 verbatim, ROUGE-1 F1 %.6f, %.2fs (limit %.0fs)",
                      verbatim, f1, elapsed, kMemorizeSeconds));
}

// 8. Ranking aggregation fixtures and grand-mean invariant.
Result RankingChecks() {
  const std::vector<std::string> six = {"A", "B", "C", "D", "E", "F"};
  RankingMatrix unanimous{six, {}};
  std::mt19937_64 rng(808);
  for (int d = 0; d < 10; ++d) {
    unanimous.orderings.push_back({});
    for (int a = 0; a < 3; ++a) {
      std::vector<std::string> order = six;
      std::shuffle(order.begin() + 1, order.end(), rng);
      unanimous.orderings.back().push_back(order);
    }
  }
  double top = AggregateRankings(unanimous)[0].second;
  RankingMatrix mirrored{six, {{six, std::vector<std::string>(six.rbegin(), six.rend())}}};
  bool all_half = true;
  for (const auto& [name, score] : AggregateRankings(mirrored)) {
    all_half &= std::abs(score - 2.5) <= kExact;
  }
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    RankingMatrix m;
    int k = 2 + static_cast<int>(rng() % 8);
    for (int i = 0; i < k; ++i) m.candidates.push_back("c" + std::to_string(i));
    for (int d = 0, n = 1 + static_cast<int>(rng() % 20); d < n; ++d) {
      m.orderings.push_back({});
      for (int a = 0, na = 1 + static_cast<int>(rng() % 5); a < na; ++a) {
        std::vector<std::string> order = m.candidates;
        std::shuffle(order.begin(), order.end(), rng);
        m.orderings.back().push_back(order);
      }
    }
    double total = 0;
    for (const auto& [name, score] : AggregateRankings(m)) total += score;
    violations += std::abs(total / k - (k - 1) / 2.0) > kExact;
  }
  return Check(std::abs(top - 5.0) <= kExact && all_half && violations == 0,
               Format("unanimous top %.3f (want 5.0), mirrored all 2.5: %s, "
                      "grand-mean violations %d/100",
                      top, all_half ? "yes" : "no", violations));
}

// 9. Every subcommand twice with identical config: byte-identical artifacts.
Result Determinism() {
  testing::TempDir dir("accept-determinism");
  std::mt19937_64 rng(909);
  SaveCorpus(dir / "train.jsonl",
             testing::SyntheticCorpus(rng, 6, 1, Split::kTrain, "tr"));
  SaveCorpus(dir / "test.jsonl", testing::SyntheticCorpus(rng, 10, 3, Split::kTest, "te"));
  testing::WriteFile(
      dir / "rank.json",
      R"({"candidates":["A","B","C"],"orderings":[[["A","B","C"],["B","A","C"]]]})");
  json config = {{"output_dir", "runs"},
                 {"seed", 3},
                 {"workers", 2},
                 {"data", {{"format", "dialogsum"}, {"train", "train.jsonl"},
                           {"test", "test.jsonl"}}},
                 {"backend", {{"kind", "length-obedient"}}},
                 {"training", {{"epochs", 5}}},
                 {"predictor", {{"variant", "MultiPlus"}}},
                 {"summarizer", {{"length_aware", true}, {"length_source", "pseudo"}}}};
  testing::WriteFile(dir / "oracle.json", config.dump());
  config["backend"] = {{"kind", "toy"}};
  config["output_dir"] = "toy-runs";
  testing::WriteFile(dir / "toy.json", config.dump());

  const std::vector<std::vector<std::string>> oracle_steps = {
      {"data", "stats"},         {"predictor", "eval"},
      {"predictor", "emit"},     {"summarizer", "infer"},
      {"summarizer", "sweep"},   {"eval", "rouge"},
      {"eval", "bertscore"},     {"eval", "correlation"},
      {"analyze", "inter-human"}, {"analyze", "rankings", "--input", "rank.json"},
      {"report", "tables"}};
  const std::vector<std::vector<std::string>> toy_steps = {
      {"predictor", "train"}, {"summarizer", "train"}};
  std::string err;
  auto run_all = [&]() -> bool {
    for (auto args : oracle_steps) {
      args.insert(args.begin(), {"--config", (dir / "oracle.json").string()});
      if (Cli(args, &err) != 0) return false;
    }
    for (auto args : toy_steps) {
      args.insert(args.begin(), {"--config", (dir / "toy.json").string()});
      if (Cli(args, &err) != 0) return false;
    }
    return true;
  };
  if (!run_all()) return Check(false, "first run failed: " + err);
  auto first = Snapshot(dir.path());
  if (!run_all()) return Check(false, "second run failed: " + err);
  auto second = Snapshot(dir.path());
  int differing = 0;
  for (const auto& [name, bytes] : first) differing += second[name] != bytes;
  differing += first.size() != second.size();
  return Check(differing == 0,
               Format("%zu subcommands, %zu files compared, %d differ",
                      oracle_steps.size() + toy_steps.size(), first.size(), differing));
}

}  // namespace
}  // namespace lensum

int main(int argc, char** argv) {
  using namespace lensum;
  bool require_data = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--require-data") == 0) require_data = true;
  }
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"1 ROUGE oracle equivalence", RougeOracle},
      {"2 Correlation correctness", CorrelationChecks},
      {"3 Inter-human reproduction", InterHumanCheck},
      {"4 Compression rates", CompressionCheck},
      {"5 Template bijection", TemplateBijection},
      {"6 Length-obedient oracle pipeline", OraclePipeline},
      {"7 Toy-backend memorization", ToyMemorization},
      {"8 Ranking aggregation", RankingChecks},
      {"9 Determinism", Determinism}};
  int failed = 0, skipped = 0;
  for (const auto& [name, check] : criteria) {
    Result result;
    try {
      result = check();
    } catch (const std::exception& e) {
      result = {Outcome::kFail, std::string("exception: ") + e.what()};
    }
    const char* tag = result.outcome == Outcome::kPass   ? "PASS"
                      : result.outcome == Outcome::kFail ? "FAIL"
                                                         : "SKIPPED";
    std::printf("[%s] %s: %s\n", tag, name, result.detail.c_str());
    std::fflush(stdout);
    failed += result.outcome == Outcome::kFail;
    skipped += result.outcome == Outcome::kSkipped;
  }
  std::printf("%d passed, %d failed, %d skipped\n",
              static_cast<int>(criteria.size()) - failed - skipped, failed, skipped);
  if (require_data && skipped > 0) return 1;
  return failed > 0 ? 1 : 0;
}
