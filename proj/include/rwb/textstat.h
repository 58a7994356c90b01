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

// Text segmentation and the classical readability formulas (Flesch reading
// ease, Gunning fog, Coleman-Liau) plus the mapping from a reading-ease score
// to a descriptive audience level.
//
// Every function here is pure and thread-safe.

#ifndef RWB_TEXTSTAT_H_
#define RWB_TEXTSTAT_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace rwb {

struct TextStats {
  std::int64_t total_words = 0;
  std::int64_t total_sentences = 0;
  std::int64_t total_syllables = 0;
  // Words with at least eight letters.
  std::int64_t long_words = 0;
  // Alphabetic characters inside words (digits excluded).
  std::int64_t total_letters = 0;

  friend bool operator==(const TextStats&, const TextStats&) = default;
};

// Ordered from least to most readable; the underlying value is the index.
enum class ReadabilityLevel : int {
  kCollege = 0,
  kHighSchool = 1,
  kMiddleSchool = 2,
  kSixthGrade = 3,
};

inline constexpr std::array<ReadabilityLevel, 4> kAllLevels = {
    ReadabilityLevel::kCollege, ReadabilityLevel::kHighSchool,
    ReadabilityLevel::kMiddleSchool, ReadabilityLevel::kSixthGrade};

// Target reading-ease score used when prompting for `level` (30/50/70/90).
double TargetFre(ReadabilityLevel level);

// Audience phrase substituted into prompts, e.g. "sixth grade".
std::string_view LevelPhrase(ReadabilityLevel level);

// Stable identifier used in files, e.g. "sixth_grade".
std::string_view LevelId(ReadabilityLevel level);

// Accepts either the identifier or the phrase, case-insensitively.
std::optional<ReadabilityLevel> ParseLevel(std::string_view text);

// Next more readable level, if any. Adjacency follows the FRE ordering.
std::optional<ReadabilityLevel> MoreReadable(ReadabilityLevel level);

// Splits `text` into sentences and words and counts syllables, long words
// and letters. Throws EmptyTextError for empty or whitespace-only input.
TextStats Segment(std::string_view text);

// Vowel-group syllable estimate for a single word. Non-letters are ignored;
// the result is at least 1.
int CountSyllables(std::string_view word);

enum class FogVariant {
  // 0.4 * (words/sentences + long_words/sentences)
  kPerSentence,
  // 0.4 * (words/sentences + 100 * long_words/words)
  kClassical,
};

// Flesch reading ease, unclamped. Throws DegenerateStatsError when there are
// no words or no sentences.
double FleschReadingEase(const TextStats& stats);

// Gunning fog index. Throws DegenerateStatsError when there are no
// sentences (and, for the classical form, no words).
double GunningFog(const TextStats& stats, FogVariant variant = FogVariant::kPerSentence);

// Coleman-Liau index from letters and sentences per 100 words. Throws
// DegenerateStatsError when there are no words.
double ColemanLiau(const TextStats& stats);

// Table mapping: >80 sixth grade, [60,80] middle school, [40,60) high
// school, <40 college.
ReadabilityLevel LevelFromFre(double score);

struct ReadabilityScores {
  double fre = 0;
  double gfi = 0;
  double cli = 0;
};

// Segments `text` and applies all three formulas.
ReadabilityScores ScoreReadability(std::string_view text,
                                   FogVariant variant = FogVariant::kPerSentence);

}  // namespace rwb

#endif  // RWB_TEXTSTAT_H_
