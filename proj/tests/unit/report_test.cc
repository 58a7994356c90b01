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

#include "rwb/report.h"

#include <algorithm>
#include <filesystem>
#include <random>

#include <doctest.h>

#include "rwb/error.h"
#include "test_support.h"

namespace rwb {
namespace {

RationaleRecord Scored(const std::string& id, ReadabilityLevel level, double fre,
                       const std::string& provider = "mock") {
  RationaleRecord r;
  r.instance_id = id;
  r.provider = provider;
  r.level = level;
  r.parsed.label = "normal";
  r.parsed.rationale = "Fine.";
  r.gold = GoldLabel::Of("normal");
  r.scores.readability = ReadabilityScores{fre, 5.0, 8.0};
  return r;
}

std::vector<RationaleRecord> Ladder(const std::string& id, double c, double h, double m,
                                    double s) {
  return {Scored(id, ReadabilityLevel::kCollege, c), Scored(id, ReadabilityLevel::kHighSchool, h),
          Scored(id, ReadabilityLevel::kMiddleSchool, m),
          Scored(id, ReadabilityLevel::kSixthGrade, s)};
}

TEST_CASE("adjacent pairs from one ladder") {
  const auto records = Ladder("a", 48, 51, 57, 62);
  std::size_t skipped = 9;
  const auto pairs = AdjacentPairs(records, &skipped);
  REQUIRE(pairs.size() == 3);
  CHECK(skipped == 0);
  CHECK(std::make_pair(pairs[0].x, pairs[0].y) == std::make_pair(51.0, 48.0));
  CHECK(std::make_pair(pairs[1].x, pairs[1].y) == std::make_pair(57.0, 51.0));
  CHECK(std::make_pair(pairs[2].x, pairs[2].y) == std::make_pair(62.0, 57.0));
  CHECK(pairs[0].more_readable == ReadabilityLevel::kHighSchool);
  CHECK(pairs[0].less_readable == ReadabilityLevel::kCollege);
  CHECK(DifferentiationRate(std::span<const AdjacentPair>(pairs)) == 1.0);
}

TEST_CASE("missing middle school leaves only the college pair") {
  auto records = Ladder("a", 48, 51, 57, 62);
  records.erase(records.begin() + 2);
  std::size_t skipped = 0;
  const auto pairs = AdjacentPairs(records, &skipped);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].less_readable == ReadabilityLevel::kCollege);
  CHECK(skipped == 2);
  records[0].scores.readability.reset();
  CHECK(AdjacentPairs(records).empty());
}

TEST_CASE("differentiation rate") {
  const std::vector<std::pair<double, double>> half = {{70, 50}, {60, 65}};
  CHECK(DifferentiationRate(std::span<const std::pair<double, double>>(half)) == 0.5);
  const std::vector<std::pair<double, double>> ties = {{50, 50}, {61, 61}};
  CHECK(DifferentiationRate(std::span<const std::pair<double, double>>(ties)) == 0.0);
  const std::vector<std::pair<double, double>> up = {{62, 57}, {57, 51}, {51, 48}};
  CHECK(DifferentiationRate(std::span<const std::pair<double, double>>(up)) == 1.0);
  CHECK_FALSE(DifferentiationRate(std::span<const std::pair<double, double>>()).has_value());
}

TEST_CASE("aggregate rejects empty input") {
  CHECK_THROWS_AS(Aggregate({}), ValidationError);
}

TEST_CASE("all-failed cell") {
  std::vector<RationaleRecord> records;
  for (int i = 0; i < 3; ++i) {
    RationaleRecord r;
    r.instance_id = std::to_string(i);
    r.provider = "mock";
    r.parsed.failure = "unknown label";
    r.gold = GoldLabel::Of("normal");
    records.push_back(r);
  }
  const RunReport report = Aggregate(records);
  REQUIRE(report.cells.size() == 1);
  const ReportCell& c = report.cells[0];
  CHECK(c.accuracy_raw.value == 0.0);
  CHECK_FALSE(c.accuracy_processed.value.has_value());
  CHECK_FALSE(c.accuracy_processed.reason.empty());
  CHECK_FALSE(c.fre.value.has_value());
  CHECK_FALSE(c.fre.reason.empty());
  CHECK_FALSE(c.tiger_native.full_batch.value.has_value());
  CHECK(c.similarity_kind == "none");
  const auto j = ReportToJson(report);
  CHECK(j.dump().find("every record failed to parse") != std::string::npos);
}

TEST_CASE("tiger cell aggregates") {
  auto records = Ladder("a", 40, 50, 60, 70);
  records.resize(1);
  records.push_back(Scored("b", ReadabilityLevel::kCollege, 30));
  records.push_back(Scored("c", ReadabilityLevel::kCollege, 30));
  records[0].scores.tiger_native = ParseJudgeOutput("NO ERRORS", JudgeKind::kNative);
  records[1].scores.tiger_native =
      ParseJudgeOutput("- a | fluency | x | -4", JudgeKind::kNative);
  records[2].scores.tiger_native_failure = "unparseable";
  const RunReport report = Aggregate(records);
  REQUIRE(report.cells.size() == 1);
  const TigerCell& t = report.cells[0].tiger_native;
  CHECK(t.evaluated == 2);
  CHECK(t.failures == 1);
  CHECK(t.full_batch.value == doctest::Approx(-2.0));
  CHECK(t.below_zero_count == 1);
  CHECK(t.nonzero_score.value == doctest::Approx(-4.0));
  CHECK_FALSE(report.cells[0].tiger_self.full_batch.value.has_value());
}

TEST_CASE("accuracy, readability and similarity means") {
  auto records = Ladder("a", 40, 50, 60, 70);
  auto more = Ladder("b", 20, 50, 80, 100);
  records.insert(records.end(), more.begin(), more.end());
  records[4].parsed.label = "offensive";
  records[0].scores.bertscore = SimilarityPrf{0.5, 0.5, 0.5};
  records[0].scores.pooled_similarity = 0.25;
  records[0].scores.similarity_kind = SimilarityKind::kToken;
  records[4].scores.pooled_similarity = 0.75;
  records[4].scores.similarity_kind = SimilarityKind::kPooled;
  const RunReport report = Aggregate(records);
  REQUIRE(report.cells.size() == 4);
  const ReportCell& college = report.cells[0];
  CHECK(college.level == ReadabilityLevel::kCollege);
  CHECK(college.records == 2);
  CHECK(college.accuracy_raw.value == 0.5);
  CHECK(college.fre.value == doctest::Approx(30.0));
  CHECK(college.similarity_kind == "mixed");
  CHECK(college.pooled_similarity.value == doctest::Approx(0.5));
  CHECK(college.bertscore_f1.value == doctest::Approx(0.5));
  CHECK(report.cells[3].fre.value == doctest::Approx(85.0));
  CHECK(report.cells[1].similarity_kind == "none");

  REQUIRE_FALSE(report.differentiation.empty());
  CHECK(report.differentiation[0].pair == "all");
  CHECK(report.differentiation[0].pairs == 6);
  // Pair b has 20->50, 50->80, 80->100; a has 40->50, 50->60, 60->70.
  CHECK(report.differentiation[0].rate == 1.0);
  CHECK(report.differentiation.size() == 4);
}

TEST_CASE("excluded gold stays out of accuracy") {
  auto records = Ladder("a", 40, 50, 60, 70);
  records[0].gold = GoldLabel::Excluded("tie");
  const RunReport report = Aggregate(records);
  CHECK(report.cells[0].excluded_gold == 1);
  CHECK_FALSE(report.cells[0].accuracy_raw.value.has_value());
  CHECK(report.cells[0].fre.value == doctest::Approx(40.0));
}

std::vector<RationaleRecord> RandomRecords(std::mt19937_64& rng) {
  std::vector<RationaleRecord> records;
  const std::vector<std::string> providers = {"p1", "p2"};
  const std::vector<std::string> labels = {"hatespeech", "offensive", "normal"};
  for (int i = 0; i < 12; ++i) {
    for (const auto& p : providers) {
      for (ReadabilityLevel level : kAllLevels) {
        if (rng() % 7 == 0) continue;
        RationaleRecord r =
            Scored("i" + std::to_string(i), level, static_cast<double>(rng() % 1200) / 10, p);
        r.gold = GoldLabel::Of(labels[rng() % 3]);
        if (rng() % 5 == 0) {
          r.parsed = ParsedResponse{std::nullopt, std::nullopt, "unknown label"};
          r.scores = RecordScores{};
        } else {
          r.parsed.label = labels[rng() % 3];
          r.scores.tiger_native = TigerEvaluation{};
          r.scores.tiger_native->instance_score = -0.5 * static_cast<double>(rng() % 10);
        }
        records.push_back(r);
      }
    }
  }
  return records;
}

TEST_CASE("cells partition the records") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto records = RandomRecords(rng);
    const RunReport report = Aggregate(records);
    std::size_t total = 0;
    for (const auto& c : report.cells) total += c.records;
    CHECK(total == records.size());
    CHECK(report.total_records == records.size());
  }
}

TEST_CASE("report from the serialized records is byte identical") {
  std::mt19937_64 rng(12);
  const auto records = RandomRecords(rng);
  testing::TempDir dir;
  WriteRecords(dir.file("records.jsonl"), records);
  const auto reread = ReadRecords(dir.file("records.jsonl"));
  const RunReport a = Aggregate(records);
  const RunReport b = Aggregate(reread);
  CHECK(ReportToJson(a).dump() == ReportToJson(b).dump());
  WriteReport(a, dir.file("a"));
  WriteReport(b, dir.file("b"));
  for (const char* name : {"summary.json", "accuracy.csv", "readability.csv", "tiger.csv",
                           "similarity.csv", "adjacent_pairs.csv", "differentiation.csv"}) {
    CAPTURE(name);
    const std::string left = testing::ReadFile(dir.file(std::string("a/") + name));
    CHECK_FALSE(left.empty());
    CHECK(left == testing::ReadFile(dir.file(std::string("b/") + name)));
  }
}

TEST_CASE("csv tables") {
  const RunReport report = Aggregate(Ladder("a", 40, 50, 60, 70));
  const std::string acc = ReportCsv(report, "accuracy");
  CHECK(std::count(acc.begin(), acc.end(), '\n') == 5);
  CHECK(acc.find("1.000000") != std::string::npos);
  const std::string pairs = ReportCsv(report, "adjacent_pairs");
  CHECK(std::count(pairs.begin(), pairs.end(), '\n') == 4);
  CHECK_THROWS(ReportCsv(report, "nonsense"));
}

}  // namespace
}  // namespace rwb
