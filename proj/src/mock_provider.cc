// Copyright 2026 The Rationale Workbench Authors.
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

#include <array>
#include <cctype>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "rwb/gateway.h"
#include "rwb/judges.h"
#include "rwb/promptgen.h"
#include "strings.h"

namespace rwb::mock {
namespace {

using internal::Fnv1a64;

// Deterministic 64-bit generator; the output sequence is fixed by the seed
// on every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t Next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::size_t Below(std::size_t n) { return static_cast<std::size_t>(Next() % n); }
  // Uniform in [-1, 1).
  double Signed() {
    return static_cast<double>(Next() >> 11) * 0x1.0p-52 - 1.0;
  }

 private:
  std::uint64_t state_;
};

// Word banks grouped by syllable count under CountSyllables(). Short words
// have at most seven letters; long words have at least eight.
constexpr std::array<std::string_view, 20> kOneSyllable = {
    "this", "post", "is",   "mean", "and",  "rude", "it",   "can", "hurt", "some",
    "folks", "so",  "we",   "not",  "nice", "words", "that", "bad", "such", "harm"};
constexpr std::array<std::string_view, 12> kTwoSyllableShort = {
    "unkind", "people", "insult", "message", "target", "harmful",
    "often",  "better", "belief", "racist",  "hostile", "abuse"};
constexpr std::array<std::string_view, 6> kTwoSyllableLong = {
    "language", "pointless", "thoughtless", "nonsense", "standpoint",
    "struggles"};
constexpr std::array<std::string_view, 8> kThreeSyllableLong = {
    "offensive", "insulting", "dangerous", "negative",
    "criticism", "everyone",  "demeaning", "prejudice"};

// Syllable sequence of one sentence per level, College first.
// FRE per level: about 30, 48, 70 and 114.
constexpr std::array<std::string_view, 4> kSentencePatterns = {
    "1LLL13L213LL132L12L1",  // 20 words: 6x1, 11x2, 3x3
    "21212212312212",        // 14 words: 5x1, 8x2, 1x3
    "1212121212",            // 10 words: 5x1, 5x2
    "11111111",              // 8 words
};

std::string Sentence(ReadabilityLevel level, SplitMix64& rng) {
  // '1'/'2'/'3' pick a short word of that many syllables, 'L' a long
  // two-syllable word; three-syllable words are always long.
  const std::string_view slots = kSentencePatterns[static_cast<int>(level)];
  std::string out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    std::string_view word;
    switch (slots[i]) {
      case '1':
        word = kOneSyllable[rng.Below(kOneSyllable.size())];
        break;
      case '2':
        word = kTwoSyllableShort[rng.Below(kTwoSyllableShort.size())];
        break;
      case 'L':
        word = kTwoSyllableLong[rng.Below(kTwoSyllableLong.size())];
        break;
      default:
        word = kThreeSyllableLong[rng.Below(kThreeSyllableLong.size())];
        break;
    }
    if (i > 0) out.push_back(' ');
    std::string w(word);
    if (i == 0) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    out += w;
  }
  out.push_back('.');
  return out;
}

std::string Generation(std::string_view prompt, ReadabilityLevel level) {
  const std::string instance = ExtractTestInstance(prompt).value_or("");
  std::vector<std::string> options = ExtractAnswerOptions(prompt);
  if (options.empty()) options.push_back("unknown");
  const std::uint64_t h = Fnv1a64(instance);
  const std::string& label = options[h % options.size()];

  SplitMix64 rng(h ^ (0x51ED2701ULL * (static_cast<std::uint64_t>(level) + 1)));
  std::string out = "Answer: " + label + "\nExplanation:";
  for (int s = 0; s < 3; ++s) out += " " + Sentence(level, rng);
  return out;
}

std::string Judgement(std::string_view prompt) {
  SplitMix64 rng(Fnv1a64(prompt));
  static constexpr std::array<int, 4> kErrorCounts = {0, 0, 1, 2};
  static constexpr std::array<double, 6> kReductions = {-0.5, -1, -2,
                                                        -3,   -4, -5};
  const int n = kErrorCounts[rng.Below(kErrorCounts.size())];
  if (n == 0) return std::string(kNoErrorsSentinel);
  std::string out;
  for (int i = 0; i < n; ++i) {
    const auto aspect =
        kAllAspects[rng.Below(kAllAspects.size())];
    const double r = kReductions[rng.Below(kReductions.size())];
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", r);
    out += "- sentence " + std::to_string(i + 1) + " | " +
           std::string(AspectName(aspect)) +
           " | The statement is not supported by the source. | " + buf + "\n";
  }
  return out;
}

std::vector<double> UnitVector(std::uint64_t seed, int dim) {
  SplitMix64 rng(seed);
  std::vector<double> v(static_cast<std::size_t>(dim));
  double norm = 0;
  for (double& x : v) {
    x = rng.Signed();
    norm += x * x;
  }
  norm = std::sqrt(norm);
  if (norm == 0) {
    v[0] = 1;
    return v;
  }
  for (double& x : v) x /= norm;
  return v;
}

}  // namespace

std::string Complete(std::string_view prompt) {
  if (prompt.find(kJudgeLineFormat) != std::string_view::npos) {
    return Judgement(prompt);
  }
  if (const auto level = ExtractLevel(prompt)) return Generation(prompt, *level);
  return "Answer: unknown\nExplanation: No instruction was found.";
}

Embedding EmbedText(std::string_view text, int dim) {
  Embedding e;
  e.pooled = UnitVector(Fnv1a64(text), dim);
  std::string word;
  auto flush = [&] {
    if (!word.empty()) e.tokens.push_back(UnitVector(Fnv1a64(word), dim));
    word.clear();
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '\'') {
      word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      flush();
    }
  }
  flush();
  if (e.tokens.empty()) e.tokens.push_back(e.pooled);
  return e;
}

}  // namespace rwb::mock
