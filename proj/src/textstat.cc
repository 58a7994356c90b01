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

#include "rwb/textstat.h"

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "rwb/error.h"
#include "utf8.h"

namespace rwb {
namespace {

using internal::DecodeUtf8;

constexpr std::array<std::string_view, 17> kAbbreviations = {
    "e.g.", "i.e.", "mr.",  "mrs.", "ms.",  "dr.", "prof.",  "sr.", "jr.",
    "st.",  "vs.",  "u.s.", "inc.", "ltd.", "no.", "approx.", "fig."};

bool IsAsciiLetter(char32_t c) {
  return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z');
}

bool IsLetter(char32_t c) {
  if (IsAsciiLetter(c)) return true;
  if (c < 0xC0 || c == 0xD7 || c == 0xF7) return false;
  if (c >= 0x2000 && c < 0x3040) return false;  // punctuation and symbols
  return c != internal::kReplacement;
}

bool IsDigit(char32_t c) { return c >= U'0' && c <= U'9'; }

bool IsWordChar(char32_t c) { return IsLetter(c) || IsDigit(c); }

bool IsJoiner(char32_t c) {
  return c == U'\'' || c == 0x2019 || c == U'-' || c == 0x2010 || c == 0x2011;
}

bool IsTerminal(char32_t c) {
  return c == U'.' || c == U'!' || c == U'?' || c == 0x2026;
}

bool IsCloser(char32_t c) {
  return c == U'"' || c == U'\'' || c == 0x201D || c == 0x2019 || c == U')' ||
         c == U']' || c == 0xBB;
}

bool IsOpener(char32_t c) {
  return c == U'"' || c == U'\'' || c == 0x201C || c == 0x2018 || c == U'(' ||
         c == U'[' || c == 0xAB;
}

bool IsSpace(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' ||
         c == U'\v' || c == 0xA0 || c == 0x2028 || c == 0x2029 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x3000;
}

bool IsVowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

// True when the '.' at `dot` closes a known abbreviation such as "e.g.".
bool EndsAbbreviation(const std::vector<char32_t>& cps, std::size_t dot) {
  std::size_t begin = dot;
  while (begin > 0 && !IsSpace(cps[begin - 1])) --begin;
  while (begin < dot && IsOpener(cps[begin])) ++begin;
  std::string token;
  for (std::size_t i = begin; i <= dot; ++i) {
    if (cps[i] >= 0x80) return false;
    token.push_back(static_cast<char>(
        std::tolower(static_cast<unsigned char>(cps[i]))));
  }
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), token) !=
         kAbbreviations.end();
}

int CountSyllablesLower(const std::string& letters) {
  if (letters.empty()) return 1;
  int groups = 0;
  bool in_group = false;
  for (char c : letters) {
    const bool v = IsVowel(c);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  const std::size_t n = letters.size();
  if (letters[n - 1] == 'e') {
    const bool consonant_le =
        n >= 3 && letters[n - 2] == 'l' && !IsVowel(letters[n - 3]);
    if (!consonant_le) --groups;
  }
  return std::max(groups, 1);
}

void RequireWords(const TextStats& stats) {
  if (stats.total_words <= 0) {
    throw DegenerateStatsError("readability formula needs at least one word");
  }
}

void RequireSentences(const TextStats& stats) {
  if (stats.total_sentences <= 0) {
    throw DegenerateStatsError(
        "readability formula needs at least one sentence");
  }
}

}  // namespace

double TargetFre(ReadabilityLevel level) {
  switch (level) {
    case ReadabilityLevel::kCollege:
      return 30;
    case ReadabilityLevel::kHighSchool:
      return 50;
    case ReadabilityLevel::kMiddleSchool:
      return 70;
    case ReadabilityLevel::kSixthGrade:
      return 90;
  }
  return 0;
}

std::string_view LevelPhrase(ReadabilityLevel level) {
  switch (level) {
    case ReadabilityLevel::kCollege:
      return "college";
    case ReadabilityLevel::kHighSchool:
      return "high school";
    case ReadabilityLevel::kMiddleSchool:
      return "middle school";
    case ReadabilityLevel::kSixthGrade:
      return "sixth grade";
  }
  return "";
}

std::string_view LevelId(ReadabilityLevel level) {
  switch (level) {
    case ReadabilityLevel::kCollege:
      return "college";
    case ReadabilityLevel::kHighSchool:
      return "high_school";
    case ReadabilityLevel::kMiddleSchool:
      return "middle_school";
    case ReadabilityLevel::kSixthGrade:
      return "sixth_grade";
  }
  return "";
}

std::optional<ReadabilityLevel> ParseLevel(std::string_view text) {
  std::string lowered;
  for (char c : text) {
    lowered.push_back(static_cast<char>(
        std::tolower(static_cast<unsigned char>(c))));
  }
  for (ReadabilityLevel level : kAllLevels) {
    if (lowered == LevelId(level) || lowered == LevelPhrase(level)) {
      return level;
    }
  }
  return std::nullopt;
}

std::optional<ReadabilityLevel> MoreReadable(ReadabilityLevel level) {
  const int next = static_cast<int>(level) + 1;
  if (next >= static_cast<int>(kAllLevels.size())) return std::nullopt;
  return static_cast<ReadabilityLevel>(next);
}

int CountSyllables(std::string_view word) {
  std::string letters;
  for (char c : word) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      letters.push_back(static_cast<char>(
          std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return CountSyllablesLower(letters);
}

TextStats Segment(std::string_view text) {
  const std::vector<char32_t> cps = DecodeUtf8(text);
  if (std::all_of(cps.begin(), cps.end(), IsSpace)) throw EmptyTextError();

  TextStats stats;
  bool sentence_open = false;
  std::size_t i = 0;
  const std::size_t n = cps.size();
  while (i < n) {
    const char32_t c = cps[i];
    if (IsWordChar(c)) {
      std::string ascii_letters;
      std::int64_t letters = 0;
      std::size_t j = i;
      while (j < n) {
        if (IsWordChar(cps[j])) {
          if (IsLetter(cps[j])) {
            ++letters;
            if (IsAsciiLetter(cps[j])) {
              ascii_letters.push_back(static_cast<char>(
                  std::tolower(static_cast<int>(cps[j]))));
            }
          }
          ++j;
        } else if (IsJoiner(cps[j]) && j + 1 < n && IsWordChar(cps[j + 1])) {
          ++j;
        } else {
          break;
        }
      }
      ++stats.total_words;
      stats.total_letters += letters;
      stats.total_syllables += CountSyllablesLower(ascii_letters);
      if (letters >= 8) ++stats.long_words;
      sentence_open = true;
      i = j;
      continue;
    }
    if (IsTerminal(c)) {
      const std::size_t run_begin = i;
      while (i < n && IsTerminal(cps[i])) ++i;
      const bool single_dot = (i - run_begin == 1) && cps[run_begin] == U'.';
      bool closed = false;
      while (i < n && IsCloser(cps[i])) {
        ++i;
        closed = true;
      }
      const bool at_break = i == n || IsSpace(cps[i]);
      if (at_break && sentence_open &&
          !(single_dot && !closed && EndsAbbreviation(cps, run_begin))) {
        ++stats.total_sentences;
        sentence_open = false;
      }
      continue;
    }
    ++i;
  }
  if (sentence_open) ++stats.total_sentences;
  return stats;
}

double FleschReadingEase(const TextStats& stats) {
  RequireWords(stats);
  RequireSentences(stats);
  const double words = static_cast<double>(stats.total_words);
  return 206.835 - 1.015 * (words / static_cast<double>(stats.total_sentences)) -
         84.6 * (static_cast<double>(stats.total_syllables) / words);
}

double GunningFog(const TextStats& stats, FogVariant variant) {
  RequireSentences(stats);
  const double words = static_cast<double>(stats.total_words);
  const double sentences = static_cast<double>(stats.total_sentences);
  const double long_words = static_cast<double>(stats.long_words);
  if (variant == FogVariant::kClassical) {
    RequireWords(stats);
    return 0.4 * (words / sentences + 100.0 * long_words / words);
  }
  return 0.4 * (words / sentences + long_words / sentences);
}

double ColemanLiau(const TextStats& stats) {
  RequireWords(stats);
  const double words = static_cast<double>(stats.total_words);
  const double letters_per_100 =
      100.0 * static_cast<double>(stats.total_letters) / words;
  const double sentences_per_100 =
      100.0 * static_cast<double>(stats.total_sentences) / words;
  return 0.0588 * letters_per_100 - 0.296 * sentences_per_100 - 15.8;
}

ReadabilityLevel LevelFromFre(double score) {
  if (score > 80) return ReadabilityLevel::kSixthGrade;
  if (score >= 60) return ReadabilityLevel::kMiddleSchool;
  if (score >= 40) return ReadabilityLevel::kHighSchool;
  return ReadabilityLevel::kCollege;
}

ReadabilityScores ScoreReadability(std::string_view text, FogVariant variant) {
  const TextStats stats = Segment(text);
  return {FleschReadingEase(stats), GunningFog(stats, variant),
          ColemanLiau(stats)};
}

}  // namespace rwb
