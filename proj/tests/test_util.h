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

#ifndef LENSUM_TESTS_TEST_UTIL_H_
#define LENSUM_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lensum/corpus.h"

namespace lensum::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    std::random_device device;
    path_ = std::filesystem::temp_directory_path() /
            ("lensum-" + tag + "-" + std::to_string(device()) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ignored;
    std::filesystem::remove_all(path_, ignored);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void WriteFile(const std::filesystem::path& path,
                      const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline const std::vector<std::string>& Words() {
  static const std::vector<std::string> words = {
      "meeting", "lunch",  "tomorrow", "call",   "office", "train",
      "ticket",  "dinner", "party",    "movie",  "book",   "game",
      "coffee",  "report", "project",  "doctor", "flight", "hotel",
      "weekend", "gift",   "car",      "phone",  "bank",   "school"};
  return words;
}

inline std::string RandomSentence(std::mt19937_64& rng, int min_words,
                                  int max_words) {
  std::uniform_int_distribution<int> length(min_words, max_words);
  std::uniform_int_distribution<size_t> pick(0, Words().size() - 1);
  std::string out;
  int n = length(rng);
  for (int i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += Words()[pick(rng)];
  }
  return out;
}

// "#Person1#: ..." style dialogue with 2..max_turns turns.
inline std::string RandomDialogueText(std::mt19937_64& rng, int max_turns = 6) {
  std::uniform_int_distribution<int> turns(2, max_turns);
  int n = turns(rng);
  std::string out;
  for (int t = 0; t < n; ++t) {
    if (t) out += '\n';
    out += "#Person" + std::to_string(t % 2 + 1) + "#: " +
           RandomSentence(rng, 2, 10);
  }
  return out;
}

// Synthetic examples with `refs` references each and valid word lengths.
inline std::vector<Example> SyntheticCorpus(std::mt19937_64& rng, int count,
                                            int refs, Split split,
                                            const std::string& prefix = "ex") {
  std::vector<Example> corpus;
  for (int i = 0; i < count; ++i) {
    Example example;
    example.split = split;
    example.dialogue =
        ParseDialogue(prefix + std::to_string(i), RandomDialogueText(rng));
    for (int r = 0; r < refs; ++r) {
      example.refs.push_back(MakeSummaryRef(r + 1, RandomSentence(rng, 3, 15)));
    }
    corpus.push_back(std::move(example));
  }
  return corpus;
}

}  // namespace lensum::testing

#endif  // LENSUM_TESTS_TEST_UTIL_H_
