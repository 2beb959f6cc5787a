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

#include "lensum/corpus.h"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "lensum/error.h"

namespace lensum {
namespace {

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }

std::string LinePrefix(int line_number) {
  return "line " + std::to_string(line_number) + ": ";
}

const std::string& RequireString(const nlohmann::ordered_json& record,
                                 const std::string& field, int line_number) {
  auto it = record.find(field);
  if (it == record.end()) {
    throw Error(LinePrefix(line_number) + "missing required field '" + field +
                "'");
  }
  if (!it->is_string()) {
    throw Error(LinePrefix(line_number) + "field '" + field +
                "' is not a string");
  }
  return it->get_ref<const std::string&>();
}

}  // namespace

CorpusFormat ParseCorpusFormat(std::string_view name) {
  if (name == "dialogsum") return CorpusFormat::kDialogSum;
  if (name == "samsum") return CorpusFormat::kSamSum;
  throw Error("unknown corpus format '" + std::string(name) + "'");
}

std::string_view FormatName(CorpusFormat format) {
  return format == CorpusFormat::kDialogSum ? "dialogsum" : "samsum";
}

Split ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val" || name == "validation" || name == "dev") {
    return Split::kVal;
  }
  if (name == "test") return Split::kTest;
  throw Error("unknown split '" + std::string(name) + "'");
}

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

int WordCount(std::string_view text) {
  int count = 0;
  bool in_word = false;
  for (char c : text) {
    if (IsSpace(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

std::vector<std::string> SplitWords(std::string_view text) {
  std::vector<std::string> words;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    size_t start = i;
    while (i < text.size() && !IsSpace(text[i])) ++i;
    if (i > start) words.emplace_back(text.substr(start, i - start));
  }
  return words;
}

Dialogue ParseDialogue(std::string id, std::string raw_text) {
  Dialogue dialogue;
  dialogue.id = std::move(id);
  std::string_view rest = raw_text;
  bool first = true;
  while (true) {
    size_t newline = rest.find('\n');
    std::string_view line = rest.substr(0, newline);
    size_t colon = line.find(':');
    if (colon != std::string_view::npos && colon > 0 &&
        WordCount(line.substr(0, colon)) > 0) {
      Utterance turn;
      turn.speaker = std::string(line.substr(0, colon));
      std::string_view after = line.substr(colon + 1);
      size_t body = 0;
      while (body < after.size() && IsSpace(after[body])) ++body;
      turn.separator = std::string(after.substr(0, body));
      turn.text = std::string(after.substr(body));
      dialogue.turns.push_back(std::move(turn));
    } else if (first) {
      throw Error("dialogue '" + dialogue.id +
                  "': first turn has no speaker tag");
    } else {
      dialogue.turns.back().text += '\n';
      dialogue.turns.back().text += line;
    }
    first = false;
    if (newline == std::string_view::npos) break;
    rest.remove_prefix(newline + 1);
  }
  dialogue.raw_text = std::move(raw_text);
  return dialogue;
}

std::string FlattenTurns(const std::vector<Utterance>& turns) {
  std::string out;
  for (size_t i = 0; i < turns.size(); ++i) {
    if (i > 0) out += '\n';
    out += turns[i].speaker;
    out += ':';
    out += turns[i].separator;
    out += turns[i].text;
  }
  return out;
}

SurfaceFeatures ComputeSurfaceFeatures(const Dialogue& dialogue) {
  return {WordCount(dialogue.raw_text),
          static_cast<int>(dialogue.turns.size())};
}

SummaryRef MakeSummaryRef(int annotator_id, std::string text) {
  SummaryRef ref;
  ref.annotator_id = annotator_id;
  ref.word_len = WordCount(text);
  ref.text = std::move(text);
  return ref;
}

Example ParseRecord(std::string_view line, CorpusFormat format, Split split,
                    int line_number) {
  nlohmann::ordered_json record;
  try {
    record = nlohmann::ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(LinePrefix(line_number) + "malformed record: " + e.what());
  }
  if (!record.is_object()) {
    throw Error(LinePrefix(line_number) + "record is not an object");
  }

  // DialogSum releases name the id field "fname".
  std::string id_field = record.contains("id") ? "id" : "fname";
  if (!record.contains(id_field)) id_field = "id";
  Example example;
  example.split = split;
  const std::string& id = RequireString(record, id_field, line_number);
  const std::string& text = RequireString(record, "dialogue", line_number);
  if (WordCount(text) == 0) {
    throw Error(LinePrefix(line_number) + "dialogue '" + id + "' is empty");
  }
  try {
    example.dialogue = ParseDialogue(id, text);
  } catch (const Error& e) {
    throw Error(LinePrefix(line_number) + e.what());
  }

  std::vector<std::string> consumed = {id_field, "dialogue"};
  if (record.contains("summary1")) {
    for (int k = 1;; ++k) {
      std::string field = "summary" + std::to_string(k);
      if (!record.contains(field)) break;
      example.refs.push_back(
          MakeSummaryRef(k, RequireString(record, field, line_number)));
      consumed.push_back(field);
    }
  } else {
    example.refs.push_back(
        MakeSummaryRef(1, RequireString(record, "summary", line_number)));
    consumed.push_back("summary");
  }

  for (auto it = record.begin(); it != record.end(); ++it) {
    if (std::find(consumed.begin(), consumed.end(), it.key()) ==
        consumed.end()) {
      example.extra[it.key()] = it.value();
    }
  }

  try {
    ValidateExample(example, format);
  } catch (const Error& e) {
    throw Error(LinePrefix(line_number) + e.what());
  }
  return example;
}

void ValidateExample(const Example& example, CorpusFormat format) {
  size_t expected = 1;
  if (format == CorpusFormat::kDialogSum && example.split == Split::kTest) {
    expected = 3;
  }
  if (example.refs.size() != expected) {
    throw Error("example '" + example.id() + "' has " +
                std::to_string(example.refs.size()) + " references, " +
                std::string(FormatName(format)) + " " +
                std::string(SplitName(example.split)) + " requires " +
                std::to_string(expected));
  }
  if (example.dialogue.turns.empty()) {
    throw Error("example '" + example.id() + "' has no turns");
  }
  if (FlattenTurns(example.dialogue.turns) != example.dialogue.raw_text) {
    throw Error("example '" + example.id() +
                "': turns do not reproduce the dialogue text");
  }
  for (const SummaryRef& ref : example.refs) {
    if (ref.word_len != WordCount(ref.text)) {
      throw Error("example '" + example.id() + "': stale word length");
    }
  }
}

LoadResult LoadCorpusFile(const std::filesystem::path& path,
                          CorpusFormat format, Split split,
                          const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file " + path.string());
  LoadResult result;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (WordCount(line) == 0) continue;
    try {
      result.examples.push_back(ParseRecord(line, format, split, line_number));
    } catch (const Error&) {
      if (!options.skip_invalid) throw;
      ++result.skipped;
    }
  }
  if (result.examples.empty()) {
    throw Error("corpus file " + path.string() + " contains no records");
  }
  return result;
}

std::vector<Example> LoadCorpus(const std::filesystem::path& path,
                                CorpusFormat format, Split split) {
  return LoadCorpusFile(path, format, split).examples;
}

nlohmann::ordered_json ExampleToJson(const Example& example) {
  nlohmann::ordered_json record;
  record["id"] = example.id();
  record["dialogue"] = example.dialogue.raw_text;
  if (example.refs.size() == 1) {
    record["summary"] = example.refs.front().text;
  } else {
    for (const SummaryRef& ref : example.refs) {
      record["summary" + std::to_string(ref.annotator_id)] = ref.text;
    }
  }
  for (auto it = example.extra.begin(); it != example.extra.end(); ++it) {
    record[it.key()] = it.value();
  }
  return record;
}

void SaveCorpus(const std::filesystem::path& path,
                const std::vector<Example>& examples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus file " + path.string());
  for (const Example& example : examples) {
    out << ExampleToJson(example).dump() << '\n';
  }
}

double CompressionRate(const std::vector<Example>& corpus) {
  if (corpus.empty()) throw Error("compression rate of an empty corpus");
  long long summary_words = 0;
  long long dialogue_words = 0;
  for (const Example& example : corpus) {
    int x = WordCount(example.dialogue.raw_text);
    for (const SummaryRef& ref : example.refs) {
      summary_words += ref.word_len;
      dialogue_words += x;
    }
  }
  if (dialogue_words == 0) throw Error("corpus has no dialogue words");
  return static_cast<double>(summary_words) /
         static_cast<double>(dialogue_words);
}

SplitStats ComputeSplitStats(Split split, const std::vector<Example>& corpus) {
  SplitStats stats;
  stats.split = split;
  stats.dialogues = static_cast<int>(corpus.size());
  if (corpus.empty()) return stats;
  long long dialogue_words = 0;
  long long summary_words = 0;
  long long turns = 0;
  for (const Example& example : corpus) {
    SurfaceFeatures features = ComputeSurfaceFeatures(example.dialogue);
    dialogue_words += features.dialogue_word_count;
    turns += features.utterance_count;
    stats.summaries += static_cast<int>(example.refs.size());
    for (const SummaryRef& ref : example.refs) summary_words += ref.word_len;
  }
  stats.mean_dialogue_words =
      static_cast<double>(dialogue_words) / stats.dialogues;
  stats.mean_turns = static_cast<double>(turns) / stats.dialogues;
  stats.mean_summary_words =
      static_cast<double>(summary_words) / stats.summaries;
  stats.compression_rate = CompressionRate(corpus);
  return stats;
}

double MeanReferenceLength(const std::vector<Example>& corpus) {
  long long words = 0;
  long long refs = 0;
  for (const Example& example : corpus) {
    for (const SummaryRef& ref : example.refs) {
      words += ref.word_len;
      ++refs;
    }
  }
  if (refs == 0) throw Error("mean reference length of an empty corpus");
  return static_cast<double>(words) / static_cast<double>(refs);
}

}  // namespace lensum
