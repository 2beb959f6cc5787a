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

#include "lensum/summarizer.h"

#include <random>

#include "gtest/gtest.h"
#include "lensum/error.h"
#include "lensum/oracle_backend.h"
#include "lensum/rouge.h"
#include "test_util.h"

namespace lensum {
namespace {

using testing::TempDir;

const SummarizerMode kBaseline{false, false};
const SummarizerMode kBaselineMulti{false, true};
const SummarizerMode kLengthAware{true, false};
const SummarizerMode kLengthAwareMulti{true, true};

std::vector<Example> Corpus(int n, int refs, std::uint64_t seed = 81) {
  std::mt19937_64 rng(seed);
  return testing::SyntheticCorpus(rng, n, refs,
                                  refs == 3 ? Split::kTest : Split::kTrain, "s");
}

Summarizer Oracle(const SummarizerMode& mode) {
  return {MakeBackend({{"kind", "length-obedient"}, {"length_prefix", mode.multitask}}),
          mode};
}

TEST(SummarizerModeTest, Names) {
  EXPECT_EQ(kBaseline.Name(), "baseline");
  EXPECT_EQ(kLengthAwareMulti.Name(), "length-aware+length-output");
}

TEST(LengthSourceTest, ParseAndPrint) {
  for (const char* text : {"none", "pseudo", "gold:2", "fixed:7"}) {
    EXPECT_EQ(LengthSource::Parse(text).ToString(), text);
  }
  EXPECT_EQ(LengthSource::Parse("gold").ToString(), "gold:0");
  EXPECT_THROW(LengthSource::Parse("fixed:x"), Error);
  EXPECT_THROW(LengthSource::Parse("fixed:"), Error);
  EXPECT_THROW(LengthSource::Parse("silver"), Error);
}

TEST(BuildSummarizerPairsTest, Formats) {
  Example e;
  e.dialogue = ParseDialogue("x", "A: hi");
  e.refs = {MakeSummaryRef(1, "May is helping her mother to do some preparation "
                              "for the picnic.")};
  std::vector<Example> corpus = {e};
  auto la = BuildSummarizerPairs(kLengthAware, corpus);
  EXPECT_EQ(la[0].source, "Summary length: #12. Dialogue: A: hi.");
  EXPECT_EQ(la[0].target, e.refs[0].text);
  auto base = BuildSummarizerPairs(kBaseline, corpus);
  EXPECT_EQ(base[0].source, "Dialogue: A: hi.");
  EXPECT_EQ(base[0].target, e.refs[0].text);
  auto multi = BuildSummarizerPairs(kLengthAwareMulti, corpus);
  EXPECT_EQ(multi[0].target.rfind("Summary length: #12. Summary: ", 0), 0u);
  auto base_multi = BuildSummarizerPairs(kBaselineMulti, corpus);
  EXPECT_EQ(base_multi[0].source, "Dialogue: A: hi.");
  EXPECT_EQ(base_multi[0].target, multi[0].target);

  BudgetMap pseudo = {{"x", MakeLengthBudget(9, BudgetSource::kPseudo)}};
  auto pseudo_pairs =
      BuildSummarizerPairs(kLengthAware, corpus, BudgetSource::kPseudo, &pseudo);
  EXPECT_EQ(pseudo_pairs[0].source, "Summary length: #9. Dialogue: A: hi.");
  EXPECT_THROW(BuildSummarizerPairs(kLengthAware, corpus, BudgetSource::kPseudo),
               Error);
  BudgetMap empty;
  EXPECT_THROW(
      BuildSummarizerPairs(kLengthAware, corpus, BudgetSource::kPseudo, &empty),
      Error);
  EXPECT_EQ(BuildSummarizerPairs(kLengthAware, Corpus(3, 3)).size(), 9u);
}

TEST(TrainSummarizerTest, ToyMemorizesEightPairs) {
  std::vector<Example> corpus = Corpus(8, 1);
  TrainingSettings settings;
  settings.epochs = 25;
  for (const SummarizerMode& mode : {kBaseline, kLengthAware, kLengthAwareMulti}) {
    Summarizer s = TrainSummarizer(mode, corpus, MakeBackend({{"kind", "toy"}}),
                                   settings);
    std::vector<GenerationRecord> records = SummarizeCorpus(
        s, corpus, mode.length_aware ? LengthSource::Gold(0) : LengthSource::None(),
        nullptr, DecodingConfig{});
    ASSERT_EQ(records.size(), 8u);
    for (size_t i = 0; i < corpus.size(); ++i) {
      EXPECT_EQ(records[i].output_text, corpus[i].refs[0].text) << mode.Name();
      if (mode.multitask) {
        EXPECT_EQ(records[i].parsed_len, corpus[i].refs[0].word_len);
      }
    }
  }
  EXPECT_THROW(TrainSummarizer(kBaseline, {}, MakeBackend({{"kind", "toy"}}),
                               settings),
               Error);
}

TEST(MakeRecordTest, MultitaskParsesLengthClause) {
  GenerationRecord r = MakeRecord(kLengthAwareMulti, "a", 1,
                                  MakeLengthBudget(3, BudgetSource::kGold),
                                  "Summary length: #3. Summary: x y z");
  EXPECT_EQ(r.output_text, "x y z");
  EXPECT_EQ(r.parsed_len, 3);
  EXPECT_EQ(r.raw_output, "Summary length: #3. Summary: x y z");
  EXPECT_EQ(r.ref_index, 1);
  GenerationRecord garbled = MakeRecord(kLengthAwareMulti, "a", std::nullopt,
                                        std::nullopt, "just words");
  EXPECT_EQ(garbled.output_text, "just words");
  EXPECT_FALSE(garbled.parsed_len);
  GenerationRecord plain = MakeRecord(kLengthAware, "a", std::nullopt, std::nullopt,
                                      "Summary length: #3. Summary: x");
  EXPECT_EQ(plain.output_text, plain.raw_output);
}

TEST(ResolveBudgetTest, Rules) {
  Example e = Corpus(1, 3)[0];
  EXPECT_FALSE(ResolveBudget(kBaseline, e, LengthSource::None(), nullptr));
  EXPECT_THROW(ResolveBudget(kBaseline, e, LengthSource::Fixed(5), nullptr), Error);
  EXPECT_THROW(ResolveBudget(kLengthAware, e, LengthSource::None(), nullptr), Error);
  EXPECT_EQ(ResolveBudget(kLengthAware, e, LengthSource::Gold(2), nullptr)->value,
            e.refs[2].word_len);
  EXPECT_THROW(ResolveBudget(kLengthAware, e, LengthSource::Gold(3), nullptr), Error);
  EXPECT_EQ(ResolveBudget(kLengthAware, e, LengthSource::Fixed(7), nullptr)->value, 7);
  EXPECT_THROW(ResolveBudget(kLengthAware, e, LengthSource::Fixed(0), nullptr), Error);
  BudgetMap pseudo;
  EXPECT_THROW(ResolveBudget(kLengthAware, e, LengthSource::Pseudo(), &pseudo), Error);
  EXPECT_THROW(ResolveBudget(kLengthAware, e, LengthSource::Pseudo(), nullptr), Error);
  pseudo[e.id()] = MakeLengthBudget(11, BudgetSource::kPseudo);
  auto budget = ResolveBudget(kLengthAware, e, LengthSource::Pseudo(), &pseudo);
  EXPECT_EQ(budget->value, 11);
  EXPECT_EQ(budget->source, BudgetSource::kPseudo);
}

TEST(SummarizeTest, OracleHonoursFixedBudget) {
  Example e = Corpus(1, 1)[0];
  GenerationRecord r = Summarize(Oracle(kLengthAware), e, LengthSource::Fixed(7),
                                 nullptr, DecodingConfig{});
  EXPECT_EQ(WordCount(r.output_text), 7);
  EXPECT_EQ(r.budget->value, 7);
  EXPECT_EQ(r.budget->source, BudgetSource::kUser);
  GenerationRecord m = Summarize(Oracle(kLengthAwareMulti), e,
                                 LengthSource::Fixed(7), nullptr, DecodingConfig{});
  EXPECT_EQ(WordCount(m.output_text), 7);
  EXPECT_EQ(m.parsed_len, 7);
}

TEST(SummarizeCorpusTest, GoldSourceGivesOneRecordPerReference) {
  std::vector<Example> corpus = Corpus(5, 3);
  std::vector<GenerationRecord> records = SummarizeCorpus(
      Oracle(kLengthAware), corpus, LengthSource::Gold(1), nullptr,
      DecodingConfig{}, 3);
  ASSERT_EQ(records.size(), 15u);
  for (size_t i = 0; i < records.size(); ++i) {
    const Example& e = corpus[i / 3];
    EXPECT_EQ(records[i].example_id, e.id());
    EXPECT_EQ(records[i].ref_index, static_cast<int>(i % 3));
    EXPECT_EQ(WordCount(records[i].output_text), e.refs[i % 3].word_len);
  }
}

TEST(SummarizeCorpusTest, PseudoBudgets) {
  std::vector<Example> corpus = Corpus(4, 1);
  BudgetMap pseudo;
  for (size_t i = 0; i < corpus.size(); ++i) {
    pseudo[corpus[i].id()] = MakeLengthBudget(3 + static_cast<int>(i),
                                              BudgetSource::kPseudo);
  }
  std::vector<GenerationRecord> records = SummarizeCorpus(
      Oracle(kLengthAware), corpus, LengthSource::Pseudo(), &pseudo, DecodingConfig{});
  for (size_t i = 0; i < records.size(); ++i) {
    EXPECT_FALSE(records[i].ref_index);
    EXPECT_EQ(WordCount(records[i].output_text), 3 + static_cast<int>(i));
  }
}

TEST(LengthSweepTest, OracleMatchesEveryLength) {
  Example e = Corpus(1, 1)[0];
  std::vector<GenerationRecord> records = LengthSweep(
      Oracle(kLengthAware), e.dialogue, {35, 5, 20, 10}, DecodingConfig{});
  std::vector<int> expected = {5, 10, 20, 35};
  ASSERT_EQ(records.size(), 4u);
  for (size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(records[i].budget->value, expected[i]);
    EXPECT_EQ(WordCount(records[i].output_text), expected[i]);
  }
  EXPECT_EQ(LengthSweep(Oracle(kLengthAware), e.dialogue, {5}, DecodingConfig{})
                .size(),
            1u);
  EXPECT_THROW(LengthSweep(Oracle(kLengthAware), e.dialogue, {}, DecodingConfig{}),
               Error);
  EXPECT_THROW(LengthSweep(Oracle(kBaseline), e.dialogue, {5}, DecodingConfig{}),
               Error);
}

TEST(SummarizerPersistenceTest, RoundTrip) {
  TempDir dir("summarizer");
  SaveSummarizer(Oracle(kLengthAwareMulti), dir / "m");
  Summarizer loaded = LoadSummarizer(dir / "m");
  EXPECT_EQ(loaded.mode, kLengthAwareMulti);
  Example e = Corpus(1, 1)[0];
  EXPECT_EQ(Summarize(loaded, e, LengthSource::Fixed(4), nullptr, DecodingConfig{}),
            Summarize(Oracle(kLengthAwareMulti), e, LengthSource::Fixed(4), nullptr,
                      DecodingConfig{}));
  LengthPredictor predictor{MakeBackend({{"kind", "length-obedient"}}),
                            PredictorVariant::kSingle, 4.0};
  SavePredictor(predictor, dir / "p");
  EXPECT_THROW(LoadSummarizer(dir / "p"), Error);
}

}  // namespace
}  // namespace lensum
