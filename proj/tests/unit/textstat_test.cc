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

#include <atomic>
#include <cmath>
#include <random>
#include <thread>
#include <vector>

#include <doctest.h>

#include "rwb/error.h"

namespace rwb {
namespace {

TextStats Stats(std::int64_t w, std::int64_t s, std::int64_t syl, std::int64_t lw,
                std::int64_t letters) {
  return {w, s, syl, lw, letters};
}

// Plain arithmetic, written independently of the library.
double OracleFre(double w, double s, double syl) {
  return 206.835 - 1.015 * (w / s) - 84.6 * (syl / w);
}
double OracleGfi(double w, double s, double lw) { return 0.4 * (w / s + lw / s); }
double OracleCli(double letters, double w, double s) {
  const double l_bar = letters / w * 100.0;
  const double s_bar = s / w * 100.0;
  return 0.0588 * l_bar - 0.296 * s_bar - 15.8;
}

TEST_CASE("segment counts hand examples") {
  CHECK(Segment("The cat sat on the mat.") == Stats(6, 1, 6, 0, 17));
  CHECK(Segment("Go. Stop.") == Stats(2, 2, 2, 0, 6));
  const TextStats s = Segment("Elaborate explanations support comprehension.");
  CHECK(s.total_words == 4);
  CHECK(s.total_sentences == 1);
  CHECK(s.long_words == 3);
}

TEST_CASE("segment rejects blank text") {
  CHECK_THROWS_AS(Segment(""), EmptyTextError);
  CHECK_THROWS_AS(Segment(" \n\t "), EmptyTextError);
}

TEST_CASE("sentence boundaries") {
  CHECK(Segment("Mr. Smith went home. He slept.").total_sentences == 2);
  CHECK(Segment("Use words, e.g. short ones. Then stop.").total_sentences == 2);
  CHECK(Segment("He said \"stop.\" Then he left.").total_sentences == 2);
  CHECK(Segment("Really?! Yes... Fine.").total_sentences == 3);
  CHECK(Segment("No terminal punctuation here").total_sentences == 1);
  CHECK(Segment("Version 2.5 is out.").total_sentences == 1);
}

TEST_CASE("words keep internal apostrophes and hyphens") {
  const TextStats s = Segment("Don't over-think it.");
  CHECK(s.total_words == 3);
  CHECK(s.total_letters == 15);
  CHECK(Segment("Caf\xC3\xA9 au lait.").total_words == 3);
  // Digits belong to words but are not letters.
  CHECK(Segment("Route 66 ends.").total_letters == 9);
}

TEST_CASE("syllable heuristic") {
  CHECK(CountSyllables("cat") == 1);
  CHECK(CountSyllables("make") == 1);
  CHECK(CountSyllables("the") == 1);
  CHECK(CountSyllables("table") == 2);
  CHECK(CountSyllables("syllable") == 3);
  CHECK(CountSyllables("readability") == 5);
  CHECK(CountSyllables("queue") == 1);
  CHECK(CountSyllables("rhythm") == 1);
  CHECK(CountSyllables("Offensive") == 3);
}

TEST_CASE("flesch reading ease hand examples") {
  CHECK(FleschReadingEase(Stats(6, 1, 6, 0, 0)) == doctest::Approx(116.145).epsilon(1e-12));
  CHECK(FleschReadingEase(Stats(1, 1, 1, 0, 0)) == doctest::Approx(121.22).epsilon(1e-12));
  CHECK(FleschReadingEase(Stats(100, 5, 200, 0, 0)) == doctest::Approx(17.335).epsilon(1e-12));
  CHECK_THROWS_AS(FleschReadingEase(Stats(0, 1, 0, 0, 0)), DegenerateStatsError);
  CHECK_THROWS_AS(FleschReadingEase(Stats(3, 0, 3, 0, 0)), DegenerateStatsError);
}

TEST_CASE("gunning fog hand examples") {
  CHECK(GunningFog(Stats(6, 1, 6, 0, 0)) == doctest::Approx(2.4));
  CHECK(GunningFog(Stats(4, 1, 4, 3, 0)) == doctest::Approx(2.8));
  CHECK(GunningFog(Stats(10, 2, 10, 2, 0)) == doctest::Approx(2.4));
  CHECK(GunningFog(Stats(10, 2, 10, 2, 0), FogVariant::kClassical) ==
        doctest::Approx(0.4 * (5 + 20)));
  CHECK_THROWS_AS(GunningFog(Stats(0, 0, 0, 0, 0)), DegenerateStatsError);
}

TEST_CASE("coleman liau hand examples") {
  CHECK(std::abs(ColemanLiau(Stats(6, 1, 6, 0, 17)) - (-4.073)) < 1e-3);
  CHECK(ColemanLiau(Stats(100, 4, 100, 0, 500)) == doctest::Approx(12.416));
  CHECK(ColemanLiau(Stats(100, 100, 100, 0, 100)) == doctest::Approx(-39.52));
  CHECK_THROWS_AS(ColemanLiau(Stats(0, 1, 0, 0, 0)), DegenerateStatsError);
}

TEST_CASE("formula oracle on randomized stats") {
  std::mt19937_64 rng(20260101);
  for (int i = 0; i < 1000; ++i) {
    const std::int64_t w = 1 + static_cast<std::int64_t>(rng() % 500);
    const std::int64_t s = 1 + static_cast<std::int64_t>(rng() % 60);
    const std::int64_t syl = w + static_cast<std::int64_t>(rng() % (2 * w + 1));
    const std::int64_t lw = static_cast<std::int64_t>(rng() % (w + 1));
    const std::int64_t letters = w + static_cast<std::int64_t>(rng() % (10 * w));
    const TextStats t = Stats(w, s, syl, lw, letters);
    CHECK(std::abs(FleschReadingEase(t) - OracleFre(w, s, syl)) < 1e-9);
    CHECK(std::abs(GunningFog(t) - OracleGfi(w, s, lw)) < 1e-9);
    CHECK(std::abs(ColemanLiau(t) - OracleCli(letters, w, s)) < 1e-9);
  }
}

TEST_CASE("level mapping anchors and boundaries") {
  CHECK(LevelFromFre(85.0) == ReadabilityLevel::kSixthGrade);
  CHECK(LevelFromFre(70.0) == ReadabilityLevel::kMiddleSchool);
  CHECK(LevelFromFre(50.0) == ReadabilityLevel::kHighSchool);
  CHECK(LevelFromFre(30.0) == ReadabilityLevel::kCollege);
  CHECK(LevelFromFre(39.99) == ReadabilityLevel::kCollege);
  CHECK(LevelFromFre(40.0) == ReadabilityLevel::kHighSchool);
  CHECK(LevelFromFre(60.0) == ReadabilityLevel::kMiddleSchool);
  CHECK(LevelFromFre(80.0) == ReadabilityLevel::kMiddleSchool);
  CHECK(LevelFromFre(80.0001) == ReadabilityLevel::kSixthGrade);
}

TEST_CASE("level mapping is total on a fine grid") {
  for (int i = -2000; i <= 13000; ++i) {
    const double s = i / 100.0;
    const int matches = (s > 80) + (s >= 60 && s <= 80) + (s >= 40 && s < 60) + (s < 40);
    REQUIRE(matches == 1);
    const ReadabilityLevel expected = s > 80    ? ReadabilityLevel::kSixthGrade
                                      : s >= 60 ? ReadabilityLevel::kMiddleSchool
                                      : s >= 40 ? ReadabilityLevel::kHighSchool
                                                : ReadabilityLevel::kCollege;
    REQUIRE(LevelFromFre(s) == expected);
  }
}

TEST_CASE("level metadata") {
  CHECK(TargetFre(ReadabilityLevel::kCollege) == 30);
  CHECK(TargetFre(ReadabilityLevel::kHighSchool) == 50);
  CHECK(TargetFre(ReadabilityLevel::kMiddleSchool) == 70);
  CHECK(TargetFre(ReadabilityLevel::kSixthGrade) == 90);
  CHECK(LevelPhrase(ReadabilityLevel::kHighSchool) == "high school");
  CHECK(LevelId(ReadabilityLevel::kSixthGrade) == "sixth_grade");
  CHECK(ParseLevel("middle school") == ReadabilityLevel::kMiddleSchool);
  CHECK(ParseLevel("COLLEGE") == ReadabilityLevel::kCollege);
  CHECK_FALSE(ParseLevel("kindergarten").has_value());
  CHECK(MoreReadable(ReadabilityLevel::kCollege) == ReadabilityLevel::kHighSchool);
  CHECK_FALSE(MoreReadable(ReadabilityLevel::kSixthGrade).has_value());
  for (std::size_t i = 1; i < kAllLevels.size(); ++i) {
    CHECK(TargetFre(kAllLevels[i - 1]) < TargetFre(kAllLevels[i]));
  }
}

TEST_CASE("appending a word matches the formula on the new counts") {
  std::mt19937_64 rng(7);
  const std::vector<std::string> words = {"dog", "table", "river", "information",
                                          "cat", "beautiful", "run", "comprehension"};
  for (int i = 0; i < 200; ++i) {
    std::string text;
    const int n = 1 + static_cast<int>(rng() % 12);
    for (int k = 0; k < n; ++k) {
      if (k) text += " ";
      text += words[rng() % words.size()];
    }
    const std::string extra = words[rng() % words.size()];
    const TextStats before = Segment(text);
    const TextStats after = Segment(text + " " + extra);
    CHECK(after.total_words == before.total_words + 1);
    CHECK(after.total_syllables == before.total_syllables + CountSyllables(extra));
    CHECK(std::abs(FleschReadingEase(after) -
                   OracleFre(after.total_words, after.total_sentences, after.total_syllables)) <
          1e-9);
  }
}

TEST_CASE("counts respect invariants and gfi is non-negative") {
  const char* texts[] = {"A b c.", "Extraordinary circumstances require extraordinary care.",
                         "Hi! Who? Me.", "one two three four five six seven eight"};
  for (const char* t : texts) {
    const TextStats s = Segment(t);
    CHECK(s.long_words <= s.total_words);
    CHECK(s.total_syllables >= s.total_words);
    CHECK(s.total_sentences >= 1);
    CHECK(GunningFog(s) >= 0);
  }
}

TEST_CASE("segment is deterministic across threads") {
  const std::string text =
      "The committee reviewed the proposal carefully. Several members, e.g. Dr. Lee, "
      "objected! Nevertheless, the motion passed.";
  const TextStats expected = Segment(text);
  std::vector<std::thread> threads;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 200; ++i) {
        if (!(Segment(text) == expected)) ++mismatches;
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(mismatches.load() == 0);
}

TEST_CASE("score readability bundles the three formulas") {
  const ReadabilityScores r = ScoreReadability("The cat sat on the mat.");
  CHECK(r.fre == doctest::Approx(116.145));
  CHECK(r.gfi == doctest::Approx(2.4));
  CHECK(std::abs(r.cli - (-4.073)) < 1e-3);
  CHECK_THROWS_AS(ScoreReadability("   "), EmptyTextError);
}

}  // namespace
}  // namespace rwb
