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

#include "lensum/cli.h"

#include <map>
#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "json.hpp"
#include "lensum/corpus.h"
#include "lensum/records.h"
#include "test_util.h"

namespace lensum {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::ReadFile;
using testing::TempDir;
using testing::WriteFile;

struct CliRun {
  int status = 0;
  std::string out;
  std::string err;
};

CliRun Lensum(std::vector<std::string> args) {
  args.insert(args.begin(), "lensum");
  std::ostringstream out, err;
  CliRun run;
  run.status = RunCli(args, out, err);
  run.out = out.str();
  run.err = err.str();
  return run;
}

std::map<std::string, std::string> Snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) {
      files[fs::relative(entry.path(), root).string()] = ReadFile(entry.path());
    }
  }
  return files;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::mt19937_64 rng(101);
    train_ = testing::SyntheticCorpus(rng, 6, 1, Split::kTrain, "train_");
    val_ = testing::SyntheticCorpus(rng, 4, 1, Split::kVal, "val_");
    test_ = testing::SyntheticCorpus(rng, 5, 3, Split::kTest, "test_");
    fs::create_directories(dir_ / "data");
    SaveCorpus(dir_ / "data/train.jsonl", train_);
    SaveCorpus(dir_ / "data/val.jsonl", val_);
    SaveCorpus(dir_ / "data/test.jsonl", test_);
    WriteConfig({{"kind", "length-obedient"}});
  }

  void WriteConfig(const json& backend, json extra = json::object()) {
    json config = {{"seed", 7},
                   {"output_dir", "runs"},
                   {"data",
                    {{"format", "dialogsum"},
                     {"train", "data/train.jsonl"},
                     {"val", "data/val.jsonl"},
                     {"test", "data/test.jsonl"}}},
                   {"backend", backend},
                   {"training", {{"epochs", 20}}}};
    config.merge_patch(extra);
    WriteFile(dir_ / "config.json", config.dump(2));
  }

  CliRun Cmd(std::vector<std::string> args) {
    args.insert(args.begin(), {"--config", (dir_ / "config.json").string()});
    return Lensum(args);
  }

  fs::path Out(const std::string& rel) const { return dir_ / "runs" / rel; }

  TempDir dir_{"cli"};
  std::vector<Example> train_, val_, test_;
};

TEST_F(CliTest, HelpAndUsageErrors) {
  CliRun help = Lensum({"--help"});
  EXPECT_EQ(help.status, 0);
  EXPECT_NE(help.out.find("summarizer"), std::string::npos);
  EXPECT_NE(Lensum({}).status, 0);
  EXPECT_NE(Lensum({"bogus"}).status, 0);
  EXPECT_NE(Lensum({"predictor"}).status, 0);
}

TEST_F(CliTest, DataStats) {
  CliRun run = Cmd({"data", "stats"});
  ASSERT_EQ(run.status, 0) << run.err;
  json stats = json::parse(ReadFile(Out("data-stats/stats.json")));
  ASSERT_EQ(stats["splits"].size(), 3u);
  EXPECT_EQ(stats["splits"][2]["split"], "test");
  EXPECT_EQ(stats["splits"][2]["dialogues"], 5);
  EXPECT_EQ(stats["splits"][2]["summaries"], 15);
  EXPECT_NEAR(stats["splits"][2]["compression_rate"].get<double>(),
              CompressionRate(test_), 1e-12);
  std::vector<Example> all = train_;
  all.insert(all.end(), val_.begin(), val_.end());
  all.insert(all.end(), test_.begin(), test_.end());
  EXPECT_NEAR(stats["overall"]["compression_rate"].get<double>(),
              CompressionRate(all), 1e-12);
  EXPECT_TRUE(fs::exists(Out("data-stats/stats.csv")));
  json manifest = json::parse(ReadFile(Out("data-stats/manifest.json")));
  EXPECT_EQ(manifest["command"], "data stats");
  EXPECT_EQ(manifest["seed"], 7);
  EXPECT_EQ(manifest["inputs"]["data.test"], "data/test.jsonl");
  EXPECT_NE(run.out.find("| test | 5 | 15 |"), std::string::npos);

  CliRun one = Cmd({"data", "stats", "--split", "val"});
  ASSERT_EQ(one.status, 0) << one.err;
  EXPECT_EQ(json::parse(ReadFile(Out("data-stats/stats.json")))["splits"].size(), 1u);
}

TEST_F(CliTest, MissingDataFileIsNamed) {
  WriteFile(dir_ / "config.json",
            R"({"output_dir":"runs","data":{"test":"nowhere.jsonl"}})");
  CliRun run = Cmd({"data", "stats"});
  EXPECT_EQ(run.status, 1);
  EXPECT_NE(run.err.find("nowhere.jsonl"), std::string::npos);
}

TEST_F(CliTest, MissingUpstreamIsNamed) {
  WriteConfig({{"kind", "toy"}});
  CliRun run = Cmd({"predictor", "eval"});
  EXPECT_EQ(run.status, 1);
  EXPECT_NE(run.err.find("predictor train"), std::string::npos);
  run = Cmd({"summarizer", "infer"});
  EXPECT_EQ(run.status, 1);
  EXPECT_NE(run.err.find("summarizer train"), std::string::npos);
  run = Cmd({"eval", "rouge"});
  EXPECT_EQ(run.status, 1);
  EXPECT_NE(run.err.find("summarizer infer"), std::string::npos);
  run = Cmd({"report", "tables"});
  EXPECT_EQ(run.status, 1);
  WriteConfig({{"kind", "length-obedient"}},
              {{"summarizer", {{"length_source", "pseudo"}}}});
  run = Cmd({"summarizer", "infer"});
  EXPECT_EQ(run.status, 1);
  EXPECT_NE(run.err.find("predictor emit"), std::string::npos);
}

TEST_F(CliTest, OraclePipelineIsExactAndDeterministic) {
  WriteConfig({{"kind", "length-obedient"}},
              {{"summarizer", {{"length_aware", true}, {"length_source", "gold"}}}});
  auto pipeline = [&] {
    for (std::vector<std::string> args :
         {std::vector<std::string>{"data", "stats"},
          {"summarizer", "infer"},
          {"summarizer", "sweep", "--lengths", "5,10,15"},
          {"eval", "rouge", "--label", "LA oracle"},
          {"eval", "bertscore"},
          {"eval", "correlation"},
          {"analyze", "inter-human"},
          {"report", "tables"}}) {
      CliRun run = Cmd(args);
      ASSERT_EQ(run.status, 0) << args[0] << " " << args[1] << ": " << run.err;
    }
  };
  pipeline();
  json report = json::parse(ReadFile(Out("eval-rouge/report.json")));
  EXPECT_EQ(report["length_delta"].get<double>(), 0.0);
  EXPECT_EQ(report["label"], "LA oracle");
  EXPECT_EQ(report["comparisons"], 15);
  std::vector<GenerationRecord> sweep =
      LoadGenerationRecords(Out("summarizer-sweep/sweep.jsonl"));
  ASSERT_EQ(sweep.size(), 15u);
  for (const GenerationRecord& r : sweep) {
    EXPECT_EQ(WordCount(r.output_text), r.budget->value);
  }
  EXPECT_NE(ReadFile(Out("report-tables/tables.md")).find("LA oracle"),
            std::string::npos);

  auto first = Snapshot(dir_ / "runs");
  pipeline();
  auto second = Snapshot(dir_ / "runs");
  EXPECT_EQ(first.size(), second.size());
  for (const auto& [name, bytes] : first) {
    EXPECT_EQ(bytes, second[name]) << name;
  }
}

TEST_F(CliTest, WorkersDoNotChangeGenerations) {
  WriteConfig({{"kind", "length-obedient"}},
              {{"summarizer", {{"length_aware", true}, {"length_source", "gold"}}}});
  ASSERT_EQ(Cmd({"--workers", "1", "summarizer", "infer"}).status, 0);
  std::string one = ReadFile(Out("summarizer-infer/generations.jsonl"));
  ASSERT_EQ(Cmd({"--workers", "4", "summarizer", "infer"}).status, 0);
  EXPECT_EQ(ReadFile(Out("summarizer-infer/generations.jsonl")), one);
}

TEST_F(CliTest, ToyPipelineEndToEnd) {
  WriteConfig({{"kind", "toy"}},
              {{"predictor", {{"variant", "SinglePlus"}, {"eval_split", "train"},
                              {"emit_split", "train"}}},
               {"summarizer",
                {{"length_aware", true}, {"length_source", "pseudo"},
                 {"split", "train"}}},
               {"eval", {{"split", "train"}}}});
  for (std::vector<std::string> args :
       {std::vector<std::string>{"predictor", "train"},
        {"predictor", "eval"},
        {"predictor", "emit"},
        {"summarizer", "train"},
        {"summarizer", "infer"},
        {"eval", "rouge"}}) {
    CliRun run = Cmd(args);
    ASSERT_EQ(run.status, 0) << args[0] << " " << args[1] << ": " << run.err;
  }
  json predictor = json::parse(ReadFile(Out("predictor-eval/report.json")));
  EXPECT_EQ(predictor["length_delta"].get<double>(), 0.0);
  EXPECT_EQ(predictor["variant"], "SinglePlus");
  json rouge = json::parse(ReadFile(Out("eval-rouge/report.json")));
  EXPECT_DOUBLE_EQ(rouge["rouge"]["rouge-1"]["f1"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(rouge["length_delta"].get<double>(), 0.0);
  json manifest =
      json::parse(ReadFile(Out("summarizer-infer/manifest.json")));
  EXPECT_EQ(manifest["details"]["length_source"], "pseudo");
  EXPECT_TRUE(manifest["inputs"].contains("pseudo_lengths"));
}

TEST_F(CliTest, OracleCannotBeTrained) {
  CliRun run = Cmd({"predictor", "train"});
  EXPECT_EQ(run.status, 1);
  EXPECT_NE(run.err.find("not trainable"), std::string::npos);
}

TEST_F(CliTest, EvalWithReferencesAsCandidates) {
  CliRun run = Cmd({"eval", "rouge", "--candidates", "data/test.jsonl"});
  ASSERT_EQ(run.status, 0) << run.err;
  json report = json::parse(ReadFile(Out("eval-rouge/report.json")));
  for (const char* key : {"rouge-1", "rouge-2", "rouge-l"}) {
    EXPECT_DOUBLE_EQ(report["rouge"][key]["f1"].get<double>(), 1.0) << key;
  }
  EXPECT_TRUE(fs::exists(Out("eval-rouge/report.csv")));
  EXPECT_TRUE(fs::exists(Out("eval-rouge/report.md")));
}

TEST_F(CliTest, RankingsAndOverrides) {
  WriteFile(dir_ / "rank.json",
            R"({"candidates":["A","B","C"],"orderings":[[["A","B","C"],["C","B","A"]]]})");
  CliRun run = Cmd({"analyze", "rankings", "--input", "rank.json"});
  ASSERT_EQ(run.status, 0) << run.err;
  json scores = json::parse(ReadFile(Out("analyze-rankings/scores.json")));
  EXPECT_DOUBLE_EQ(scores["A"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(scores["B"].get<double>(), 1.0);

  run = Cmd({"--set", "output_dir=elsewhere", "--set", "rouge.n_values=[1]",
             "eval", "rouge", "--candidates", "data/test.jsonl"});
  ASSERT_EQ(run.status, 0) << run.err;
  json report = json::parse(ReadFile(dir_ / "elsewhere/eval-rouge/report.json"));
  EXPECT_FALSE(report["rouge"].contains("rouge-2"));
  json manifest = json::parse(ReadFile(dir_ / "elsewhere/eval-rouge/manifest.json"));
  EXPECT_EQ(manifest["config"]["rouge"]["n_values"], json::array({1}));

  EXPECT_EQ(Cmd({"--set", "novalue", "data", "stats"}).status, 1);
  EXPECT_EQ(Cmd({"--set", "backend.kind=\"warp\"", "summarizer", "infer"}).status, 1);
}

TEST_F(CliTest, BadConfigFile) {
  WriteFile(dir_ / "config.json", "{ not json");
  CliRun run = Cmd({"data", "stats"});
  EXPECT_EQ(run.status, 1);
  EXPECT_NE(run.err.find("config"), std::string::npos);
  run = Lensum({"--config", (dir_ / "absent.json").string(), "data", "stats"});
  EXPECT_EQ(run.status, 1);
}

}  // namespace
}  // namespace lensum
