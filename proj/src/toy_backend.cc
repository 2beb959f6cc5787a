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

#include "lensum/toy_backend.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>

#include "lensum/corpus.h"
#include "lensum/error.h"

namespace lensum {
namespace {

constexpr char kMagic[8] = {'L', 'E', 'N', 'S', 'T', 'O', 'Y', '1'};
constexpr std::uint32_t kBlobVersion = 1;
constexpr char kWeightsName[] = "weights.bin";
constexpr int kEos = 0;
constexpr int kBos = -1;
constexpr size_t kMaxNumbers = 4;

enum FeatureTag : std::uint64_t {
  kBias = 1,
  kPrev1,
  kPrev2,
  kPosition,
  kSourcePosition,
  kSourceWord,
  kRemaining,
};

std::uint64_t Mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t Hash(std::uint64_t tag, std::int64_t a = 0, std::int64_t b = 0) {
  std::uint64_t h = Mix(tag);
  h = Mix(h ^ static_cast<std::uint64_t>(a));
  return Mix(h ^ static_cast<std::uint64_t>(b));
}

std::uint64_t Fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// "#12." -> 12; tokens that are not a short integer once punctuation is
// trimmed yield nothing.
std::optional<int> TokenNumber(std::string_view token) {
  size_t begin = 0;
  size_t end = token.size();
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  while (begin < end && !digit(token[begin])) {
    if (std::isalpha(static_cast<unsigned char>(token[begin]))) return {};
    ++begin;
  }
  while (end > begin && !digit(token[end - 1])) {
    if (std::isalpha(static_cast<unsigned char>(token[end - 1]))) return {};
    --end;
  }
  if (end == begin || end - begin > 4) return {};
  int value = 0;
  for (size_t i = begin; i < end; ++i) {
    if (!digit(token[i])) return {};
    value = value * 10 + (token[i] - '0');
  }
  return value;
}

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

void PutU64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::uint64_t U64() { return Fixed(8); }
  std::uint32_t U32() { return static_cast<std::uint32_t>(Fixed(4)); }
  std::string Bytes(size_t n) {
    Need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  size_t remaining() const { return data_.size() - pos_; }

 private:
  std::uint64_t Fixed(int width) {
    Need(width);
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(
               static_cast<unsigned char>(data_[pos_ + i]))
           << (8 * i);
    }
    pos_ += width;
    return v;
  }
  void Need(size_t n) {
    if (remaining() < n) throw Error("truncated toy weights blob");
  }

  std::string_view data_;
  size_t pos_ = 0;
};

}  // namespace

struct ToyBackend::SourceContext {
  std::uint64_t fingerprint = 0;
  std::vector<std::uint64_t> words;
  std::vector<int> numbers;
};

ToyBackend::SourceContext ToyBackend::Analyze(std::string_view source) const {
  SourceContext context;
  context.fingerprint = Fnv1a(source);
  for (const std::string& token : SplitWords(source)) {
    context.words.push_back(Fnv1a(token));
    if (std::optional<int> n = TokenNumber(token);
        n && context.numbers.size() < kMaxNumbers &&
        std::find(context.numbers.begin(), context.numbers.end(), *n) ==
            context.numbers.end()) {
      context.numbers.push_back(*n);
    }
  }
  std::sort(context.words.begin(), context.words.end());
  context.words.erase(std::unique(context.words.begin(), context.words.end()),
                      context.words.end());
  return context;
}

void ToyBackend::Features(const SourceContext& source,
                          const std::vector<int>& prefix,
                          std::vector<std::uint64_t>& out) const {
  out.clear();
  const std::int64_t t = static_cast<std::int64_t>(prefix.size());
  const int prev1 = t >= 1 ? prefix[t - 1] : kBos;
  const int prev2 = t >= 2 ? prefix[t - 2] : kBos;
  out.push_back(Hash(kBias));
  out.push_back(Hash(kPrev1, prev1));
  out.push_back(Hash(kPrev2, prev2, prev1));
  out.push_back(Hash(kPosition, std::min<std::int64_t>(t, 200)));
  out.push_back(Hash(kSourcePosition,
                     static_cast<std::int64_t>(source.fingerprint), t));
  for (std::uint64_t word : source.words) {
    out.push_back(Hash(kSourceWord, static_cast<std::int64_t>(word)));
  }
  for (int n : source.numbers) {
    out.push_back(Hash(kRemaining, std::clamp<std::int64_t>(n - t, -5, 1000)));
  }
}

void ToyBackend::Score(const std::vector<std::uint64_t>& features,
                       std::vector<double>& scores) const {
  scores.assign(vocab_.size(), 0.0);
  for (std::uint64_t feature : features) {
    auto it = rows_.find(feature);
    if (it == rows_.end()) continue;
    const std::vector<float>& row = it->second;
    for (size_t w = 0; w < row.size(); ++w) scores[w] += row[w];
  }
}

int ToyBackend::AddWord(const std::string& word) {
  auto [it, inserted] =
      index_.emplace(word, static_cast<int>(vocab_.size()));
  if (inserted) vocab_.push_back(word);
  return it->second;
}

namespace {

// In-place log-softmax; returns nothing, scores become log-probabilities.
void LogSoftmax(std::vector<double>& scores) {
  double max = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - max);
  double log_z = max + std::log(sum);
  for (double& s : scores) s -= log_z;
}

}  // namespace

std::shared_ptr<const Backend> ToyBackend::FineTune(
    std::span<const TrainPair> pairs, const TrainingSettings& settings) const {
  auto next = std::make_shared<ToyBackend>(*this);

  struct Sample {
    SourceContext source;
    std::vector<int> target;
  };
  std::vector<Sample> samples;
  samples.reserve(pairs.size());
  for (const TrainPair& pair : pairs) {
    Sample sample;
    sample.source = next->Analyze(pair.source);
    for (const std::string& word : SplitWords(pair.target)) {
      sample.target.push_back(next->AddWord(word));
    }
    sample.target.push_back(kEos);
    samples.push_back(std::move(sample));
  }
  const size_t vocab_size = next->vocab_.size();
  for (auto& [key, row] : next->rows_) row.resize(vocab_size, 0.0f);

  std::mt19937_64 rng(settings.seed);
  std::vector<size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::uint64_t> features;
  std::vector<double> probs;
  std::vector<int> prefix;
  const double rate = settings.learning_rate;

  for (int epoch = 1; epoch <= settings.epochs; ++epoch) {
    if (settings.shuffle) std::shuffle(order.begin(), order.end(), rng);
    double loss = 0.0;
    long long tokens = 0;
    for (size_t index : order) {
      const Sample& sample = samples[index];
      prefix.clear();
      for (int gold : sample.target) {
        next->Features(sample.source, prefix, features);
        next->Score(features, probs);
        LogSoftmax(probs);
        loss -= probs[gold];
        ++tokens;
        for (double& p : probs) p = std::exp(p);
        probs[gold] -= 1.0;
        for (std::uint64_t feature : features) {
          std::vector<float>& row = next->rows_[feature];
          if (row.empty()) row.assign(vocab_size, 0.0f);
          for (size_t w = 0; w < vocab_size; ++w) {
            row[w] -= static_cast<float>(rate * probs[w]);
          }
        }
        if (gold != kEos) prefix.push_back(gold);
      }
    }
    double mean = tokens ? loss / static_cast<double>(tokens) : 0.0;
    next->epoch_losses_.push_back(mean);
    if (settings.on_epoch) settings.on_epoch(epoch, mean);
  }

  nlohmann::ordered_json record;
  record["settings"] = settings.ToJson();
  record["pairs"] = pairs.size();
  record["epoch_loss"] = next->epoch_losses_;
  if (!training_.is_null()) record["previous"] = training_;
  next->training_ = std::move(record);
  return next;
}

std::string ToyBackend::Generate(std::string_view input,
                                 const DecodingConfig& config) const {
  struct Hypothesis {
    std::vector<int> words;
    double score = 0.0;
    bool finished = false;
  };
  auto better = [](const Hypothesis& a, const Hypothesis& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.finished != b.finished) return a.finished;
    return a.words < b.words;
  };

  const SourceContext source = Analyze(input);
  const int vocab_size = static_cast<int>(vocab_.size());
  const int width = config.beam_width;
  std::vector<Hypothesis> beams(1);
  std::vector<Hypothesis> finished;
  std::vector<std::uint64_t> features;
  std::vector<double> logp;
  std::vector<int> order(vocab_size > 1 ? vocab_size - 1 : 0);

  for (int t = 0; t <= config.max_new_words && !beams.empty(); ++t) {
    std::vector<Hypothesis> candidates;
    for (const Hypothesis& hyp : beams) {
      Features(source, hyp.words, features);
      Score(features, logp);
      LogSoftmax(logp);
      if (t >= config.min_new_words) {
        candidates.push_back({hyp.words, hyp.score + logp[kEos], true});
      }
      if (t == config.max_new_words) continue;
      std::iota(order.begin(), order.end(), 1);
      int take = std::min<int>(width, static_cast<int>(order.size()));
      std::partial_sort(order.begin(), order.begin() + take, order.end(),
                        [&](int a, int b) {
                          if (logp[a] != logp[b]) return logp[a] > logp[b];
                          return a < b;
                        });
      for (int k = 0; k < take; ++k) {
        Hypothesis extended{hyp.words, hyp.score + logp[order[k]], false};
        extended.words.push_back(order[k]);
        candidates.push_back(std::move(extended));
      }
    }
    std::sort(candidates.begin(), candidates.end(), better);
    if (static_cast<int>(candidates.size()) > width) candidates.resize(width);
    beams.clear();
    for (Hypothesis& candidate : candidates) {
      if (candidate.finished) {
        finished.push_back(std::move(candidate));
      } else {
        beams.push_back(std::move(candidate));
      }
    }
    if (static_cast<int>(finished.size()) >= width) break;
    // Scores only decrease as hypotheses grow.
    if (!finished.empty() && !beams.empty()) {
      auto best = std::min_element(finished.begin(), finished.end(), better);
      if (best->score >= beams.front().score) break;
    }
  }
  if (finished.empty()) return "";
  const Hypothesis& best =
      *std::min_element(finished.begin(), finished.end(), better);
  std::string out;
  for (size_t i = 0; i < best.words.size(); ++i) {
    if (i > 0) out += ' ';
    out += vocab_[best.words[i]];
  }
  return out;
}

nlohmann::ordered_json ToyBackend::SaveState(
    const std::filesystem::path& dir) const {
  std::string blob(kMagic, sizeof(kMagic));
  PutU32(blob, kBlobVersion);
  PutU64(blob, vocab_.size());
  for (const std::string& word : vocab_) {
    PutU32(blob, static_cast<std::uint32_t>(word.size()));
    blob += word;
  }
  std::vector<std::uint64_t> keys;
  keys.reserve(rows_.size());
  for (const auto& entry : rows_) keys.push_back(entry.first);
  std::sort(keys.begin(), keys.end());
  PutU64(blob, keys.size());
  for (std::uint64_t key : keys) {
    PutU64(blob, key);
    for (float w : rows_.at(key)) PutU32(blob, std::bit_cast<std::uint32_t>(w));
  }
  const std::uint64_t checksum = Fnv1a(blob);
  PutU64(blob, checksum);

  std::ofstream out(dir / kWeightsName, std::ios::binary);
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) throw Error("cannot write toy weights in " + dir.string());

  return {{"weights", kWeightsName},
          {"vocabulary_size", vocab_.size()},
          {"rows", keys.size()},
          {"checksum", checksum}};
}

nlohmann::ordered_json ToyBackend::TrainingRecord() const { return training_; }

std::shared_ptr<const ToyBackend> ToyBackend::Load(
    const std::filesystem::path& dir, const nlohmann::json& state,
    const nlohmann::ordered_json& training) {
  const std::filesystem::path path =
      dir / state.at("weights").get<std::string>();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing toy weights " + path.string());
  std::string blob((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (blob.size() < sizeof(kMagic) + 8 ||
      blob.compare(0, sizeof(kMagic), kMagic, sizeof(kMagic)) != 0) {
    throw Error("not a toy weights blob: " + path.string());
  }
  Reader tail(std::string_view(blob).substr(blob.size() - 8));
  const std::uint64_t checksum = tail.U64();
  blob.resize(blob.size() - 8);
  if (Fnv1a(blob) != checksum) {
    throw Error("toy weights checksum mismatch: " + path.string());
  }

  auto backend = std::make_shared<ToyBackend>();
  Reader reader(std::string_view(blob).substr(sizeof(kMagic)));
  if (reader.U32() != kBlobVersion) {
    throw Error("unsupported toy weights version: " + path.string());
  }
  const std::uint64_t vocab_size = reader.U64();
  backend->vocab_.clear();
  backend->index_.clear();
  for (std::uint64_t i = 0; i < vocab_size; ++i) {
    std::string word = reader.Bytes(reader.U32());
    backend->index_.emplace(word, static_cast<int>(i));
    backend->vocab_.push_back(std::move(word));
  }
  if (backend->vocab_.empty() || backend->vocab_[0] != "</s>") {
    throw Error("toy weights lack the end marker: " + path.string());
  }
  const std::uint64_t rows = reader.U64();
  for (std::uint64_t r = 0; r < rows; ++r) {
    const std::uint64_t key = reader.U64();
    std::vector<float> row(vocab_size);
    for (float& w : row) w = std::bit_cast<float>(reader.U32());
    backend->rows_.emplace(key, std::move(row));
  }
  if (reader.remaining() != 0) {
    throw Error("trailing bytes in toy weights: " + path.string());
  }
  if (training.is_object()) {
    backend->training_ = training;
    if (training.contains("epoch_loss")) {
      backend->epoch_losses_ =
          training.at("epoch_loss").get<std::vector<double>>();
    }
  }
  return backend;
}

}  // namespace lensum
