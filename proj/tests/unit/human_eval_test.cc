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

#include "rwb/human_eval.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <thread>

#include <doctest.h>

#include "rwb/error.h"
#include "test_support.h"

namespace rwb {
namespace {

using nlohmann::json;

// Nominal alpha by enumerating every ordered pair of values within each
// unit: alpha = 1 - (n - 1) * sum_u(disagreeing pairs / (m_u - 1)) /
// sum_{c != k} n_c * n_k.
std::optional<double> AlphaOracle(const std::vector<Rating>& ratings) {
  std::map<std::string, std::vector<std::string>> units;
  for (const auto& r : ratings) units[r.item].push_back(r.value);
  double disagree = 0;
  std::map<std::string, double> nc;
  double n = 0;
  std::size_t pairable = 0;
  for (const auto& [item, values] : units) {
    const std::size_t m = values.size();
    if (m < 2) continue;
    ++pairable;
    double d = 0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (i != j && values[i] != values[j]) d += 1;
      }
    }
    disagree += d / static_cast<double>(m - 1);
    for (const auto& v : values) nc[v] += 1;
    n += static_cast<double>(m);
  }
  double expected = 0;
  for (const auto& [c, a] : nc) {
    for (const auto& [k, b] : nc) {
      if (c != k) expected += a * b;
    }
  }
  if (pairable < 2 || expected == 0) return std::nullopt;
  return 1.0 - (n - 1) * disagree / expected;
}

std::vector<Rating> TwoRaters(const std::vector<std::pair<std::string, std::string>>& items) {
  std::vector<Rating> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    out.push_back({"i" + std::to_string(i), "r1", items[i].first});
    out.push_back({"i" + std::to_string(i), "r2", items[i].second});
  }
  return out;
}

TEST_CASE("fleiss kappa hand fixture") {
  // Items (A,A) and (A,B): P = (1 + 0) / 2, Pe = (3/4)^2 + (1/4)^2.
  const double p_bar = 0.5;
  const double p_e = 0.75 * 0.75 + 0.25 * 0.25;
  const auto kappa = FleissKappa({{2, 0}, {1, 1}});
  REQUIRE(kappa.has_value());
  CHECK(*kappa == doctest::Approx((p_bar - p_e) / (1 - p_e)));
  CHECK(*kappa == doctest::Approx(-1.0 / 3));
}

TEST_CASE("fleiss kappa edge cases") {
  CHECK(FleissKappa({{3, 0}, {0, 3}, {3, 0}}) == doctest::Approx(1.0));
  CHECK_FALSE(FleissKappa({{2, 0}, {2, 0}}).has_value());
  CHECK_THROWS_AS(FleissKappa({}), ValidationError);
  CHECK_THROWS_AS(FleissKappa({{2, 0}, {1, 2}}), ValidationError);
  CHECK_THROWS_AS(FleissKappa({{1, 0}, {0, 1}}), ValidationError);
  CHECK_THROWS_AS(FleissKappa({{2, 0}, {2}}), ValidationError);
  CHECK_THROWS_AS(FleissKappa({{3, -1}}), ValidationError);
}

TEST_CASE("fleiss kappa near zero for random ratings") {
  std::mt19937_64 rng(2024);
  std::vector<std::vector<int>> counts;
  for (int i = 0; i < 1000; ++i) {
    int a = 0;
    for (int r = 0; r < 3; ++r) a += static_cast<int>(rng() % 2);
    counts.push_back({a, 3 - a});
  }
  const auto kappa = FleissKappa(counts);
  REQUIRE(kappa.has_value());
  CHECK(std::abs(*kappa) < 0.05);
}

TEST_CASE("krippendorff alpha hand and oracle") {
  // Four items, one disagreement: o_aa = 4, o_bb = 2, o_ab = o_ba = 1.
  const auto ratings = TwoRaters({{"a", "a"}, {"b", "b"}, {"a", "a"}, {"a", "b"}});
  const auto alpha = KrippendorffAlpha(ratings);
  REQUIRE(alpha.has_value());
  CHECK(*alpha == doctest::Approx(1.0 - (2.0 / 8) / (30.0 / 56)));
  CHECK(*alpha == doctest::Approx(*AlphaOracle(ratings)));
  CHECK(KrippendorffAlpha(TwoRaters({{"a", "a"}, {"b", "b"}})) == doctest::Approx(1.0));
  CHECK_FALSE(KrippendorffAlpha(TwoRaters({{"a", "b"}})).has_value());
  CHECK_FALSE(KrippendorffAlpha(TwoRaters({{"a", "a"}, {"a", "a"}})).has_value());
  const std::vector<Rating> lonely = {{"i", "r1", "a"}, {"j", "r1", "b"}};
  CHECK_FALSE(KrippendorffAlpha(lonely).has_value());
}

TEST_CASE("krippendorff alpha matches oracle on sparse random data") {
  std::mt19937_64 rng(8);
  const std::vector<std::string> values = {"x", "y", "z"};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Rating> ratings;
    const int items = 2 + static_cast<int>(rng() % 8);
    for (int i = 0; i < items; ++i) {
      for (int r = 0; r < 4; ++r) {
        if (rng() % 3 == 0) continue;
        ratings.push_back({"i" + std::to_string(i), "r" + std::to_string(r), values[rng() % 3]});
      }
    }
    const auto got = KrippendorffAlpha(ratings);
    const auto want = AlphaOracle(ratings);
    REQUIRE(got.has_value() == want.has_value());
    if (got) CHECK(*got == doctest::Approx(*want).epsilon(1e-12));
  }
}

TEST_CASE("agreement is invariant to relabeling and rater order") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Rating> ratings;
    for (int i = 0; i < 6; ++i) {
      for (int r = 0; r < 3; ++r) {
        ratings.push_back({"i" + std::to_string(i), "r" + std::to_string(r),
                           rng() % 2 ? "low" : "high"});
      }
    }
    std::vector<Rating> relabeled = ratings;
    for (auto& r : relabeled) r.value = r.value == "low" ? "HIGH!" : "LOW!";
    std::vector<Rating> shuffled = ratings;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto a = KrippendorffAlpha(ratings);
    CHECK(KrippendorffAlpha(relabeled) == a);
    const auto b = KrippendorffAlpha(shuffled);
    REQUIRE(b.has_value() == a.has_value());
    if (a) CHECK(*b == doctest::Approx(*a));
  }
  CHECK(FleissKappa({{2, 1}, {0, 3}, {3, 0}}) == FleissKappa({{1, 2}, {3, 0}, {0, 3}}));
}

TEST_CASE("binarization thresholds") {
  CHECK(BinarizeLikert(1) == "low");
  CHECK(BinarizeLikert(2) == "low");
  CHECK(BinarizeLikert(3) == "high");
  CHECK(BinarizeLikert(4) == "high");
  CHECK(BinarizeLevel(ReadabilityLevel::kCollege) == "hard");
  CHECK(BinarizeLevel(ReadabilityLevel::kHighSchool) == "hard");
  CHECK(BinarizeLevel(ReadabilityLevel::kMiddleSchool) == "easy");
  CHECK(BinarizeLevel(ReadabilityLevel::kSixthGrade) == "easy");
}

std::vector<RationaleRecord> Records(int providers, int per_level) {
  std::vector<RationaleRecord> out;
  for (int p = 0; p < providers; ++p) {
    for (ReadabilityLevel level : kAllLevels) {
      for (int i = 0; i < per_level; ++i) {
        RationaleRecord r;
        r.instance_id = "inst" + std::to_string(i);
        r.provider = "model" + std::to_string(p);
        r.level = level;
        r.source_text = "text " + std::to_string(i);
        r.parsed.label = "offensive";
        r.parsed.rationale = "Because it insults " + std::to_string(i) + ".";
        r.gold = GoldLabel::Of("offensive");
        out.push_back(r);
      }
    }
  }
  return out;
}

TEST_CASE("sampling sizes and cells") {
  const auto records = Records(2, 30);
  const auto tasks = SampleTasks(records, 25, 1);
  CHECK(tasks.size() == 200);
  std::map<std::pair<std::string, int>, int> cells;
  std::set<std::string> ids;
  std::set<std::tuple<std::string, int, std::string>> picks;
  for (const auto& t : tasks) {
    ++cells[{t.provider, static_cast<int>(t.level)}];
    ids.insert(t.task_id);
    picks.insert({t.provider, static_cast<int>(t.level), t.instance_id});
    CHECK(t.predicted_label == "offensive");
  }
  CHECK(ids.size() == 200);
  CHECK(picks.size() == 200);
  CHECK(cells.size() == 8);
  for (const auto& [cell, n] : cells) CHECK(n == 25);
  CHECK(tasks.front().task_id == "t0001");
  CHECK(SampleTasks(Records(1, 3), 1, 9).size() == 4);
}

TEST_CASE("sampling is deterministic and seed dependent") {
  const auto records = Records(2, 30);
  const auto a = SampleTasks(records, 5, 42);
  const auto b = SampleTasks(records, 5, 42);
  const auto c = SampleTasks(records, 5, 43);
  REQUIRE(a.size() == b.size());
  bool same_c = a.size() == c.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(TaskToJson(a[i]) == TaskToJson(b[i]));
    if (same_c) same_c = TaskToJson(a[i]) == TaskToJson(c[i]);
  }
  CHECK_FALSE(same_c);
}

TEST_CASE("sampling errors") {
  auto records = Records(1, 3);
  for (auto& r : records) {
    if (r.level == ReadabilityLevel::kSixthGrade && r.instance_id == "inst0") {
      r.parsed.label.reset();
      r.parsed.failure = "unknown label";
    }
  }
  try {
    SampleTasks(records, 3, 1);
    FAIL("expected SamplingError");
  } catch (const SamplingError& e) {
    const std::string what = e.what();
    CHECK(what.find("model0") != std::string::npos);
    CHECK(what.find("sixth") != std::string::npos);
  }
  CHECK_THROWS_AS(SampleTasks(records, 0, 1), ValidationError);
}

TEST_CASE("public task json is blind") {
  const auto tasks = SampleTasks(Records(2, 2), 2, 5);
  for (const auto& t : tasks) {
    const json pub = TaskToPublicJson(t);
    CHECK(pub.size() == 4);
    const std::string s = pub.dump();
    for (const char* hidden : {"college", "high school", "middle school", "sixth grade",
                               "high_school", "middle_school", "sixth_grade", "model0",
                               "model1", "provider", "level"}) {
      CHECK(s.find(hidden) == std::string::npos);
    }
    const AnnotationTask back = TaskFromJson(TaskToJson(t));
    CHECK(TaskToJson(back) == TaskToJson(t));
  }
}

TEST_CASE("tasks file round trip") {
  testing::TempDir dir;
  const auto tasks = SampleTasks(Records(1, 2), 2, 5);
  WriteTasks(dir.file("t.jsonl"), tasks);
  const auto back = ReadTasks(dir.file("t.jsonl"));
  REQUIRE(back.size() == tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) CHECK(TaskToJson(back[i]) == TaskToJson(tasks[i]));
}

Annotation Ann(std::string task, std::string who, ReadabilityLevel level, int coh, int inf,
               bool agrees, std::int64_t ts = 0) {
  return {std::move(task), std::move(who), level, coh, inf, agrees, ts};
}

TEST_CASE("annotation validation") {
  const Annotation a = Ann("t1", "ann", ReadabilityLevel::kHighSchool, 3, 2, true, 5);
  CHECK(AnnotationFromJson(AnnotationToJson(a)) == a);
  json bad = AnnotationToJson(a);
  bad["coherence"] = 5;
  CHECK_THROWS_AS(AnnotationFromJson(bad), ValidationError);
  bad = AnnotationToJson(a);
  bad["informativeness"] = 2.5;
  CHECK_THROWS_AS(AnnotationFromJson(bad), ValidationError);
  bad = AnnotationToJson(a);
  bad["perceived_level"] = "toddler";
  CHECK_THROWS_AS(AnnotationFromJson(bad), ValidationError);
  bad = AnnotationToJson(a);
  bad.erase("agrees_with_label");
  CHECK_THROWS_AS(AnnotationFromJson(bad), ValidationError);
  bad = AnnotationToJson(a);
  bad["annotator_id"] = "";
  CHECK_THROWS_AS(AnnotationFromJson(bad), ValidationError);
  CHECK_THROWS_AS(AnnotationFromJson(json::array()), ValidationError);
}

TEST_CASE("latest annotation wins") {
  const std::vector<Annotation> log = {
      Ann("t1", "a", ReadabilityLevel::kCollege, 1, 1, false, 10),
      Ann("t1", "a", ReadabilityLevel::kSixthGrade, 4, 4, true, 20),
      Ann("t1", "b", ReadabilityLevel::kCollege, 2, 2, true, 15),
      Ann("t1", "b", ReadabilityLevel::kHighSchool, 3, 3, true, 15),
      Ann("t0", "a", ReadabilityLevel::kCollege, 1, 1, true, 30),
  };
  const auto latest = ResolveLatest(log);
  REQUIRE(latest.size() == 3);
  CHECK(latest[0].task_id == "t0");
  CHECK(latest[1].perceived_level == ReadabilityLevel::kSixthGrade);
  CHECK(latest[2].perceived_level == ReadabilityLevel::kHighSchool);
}

std::vector<AnnotationTask> FourTasks() {
  std::vector<AnnotationTask> tasks;
  for (int i = 0; i < 4; ++i) {
    AnnotationTask t;
    t.task_id = "t" + std::to_string(i);
    t.display_text = "x";
    t.predicted_label = "normal";
    t.rationale = "r";
    t.level = kAllLevels[static_cast<std::size_t>(i)];
    t.provider = "p";
    tasks.push_back(t);
  }
  return tasks;
}

TEST_CASE("perception report counts") {
  const auto tasks = FourTasks();
  // Only t0 (college) is recognized.
  const std::vector<Annotation> anns = {
      Ann("t0", "a", ReadabilityLevel::kCollege, 3, 3, true),
      Ann("t1", "a", ReadabilityLevel::kCollege, 3, 2, true),
      Ann("t2", "a", ReadabilityLevel::kCollege, 4, 1, true),
      Ann("t3", "a", ReadabilityLevel::kCollege, 2, 4, true),
  };
  const AgreementReport r = PerceptionReport(anns, tasks);
  CHECK(r.annotations == 4);
  CHECK(r.annotators == 1);
  CHECK(r.perceived_level_accuracy == doctest::Approx(0.25));
  CHECK(r.label_agreement_rate == doctest::Approx(1.0));
  CHECK(r.mean_coherence == doctest::Approx(3.0));
  REQUIRE(r.cells.size() == 4);
  CHECK(r.cells[0].level == ReadabilityLevel::kCollege);
  CHECK(r.cells[0].perceived_level_accuracy == 1.0);
  CHECK(r.aspects.size() == 4);
  CHECK_FALSE(r.krippendorff_alpha.has_value());

  const std::vector<Annotation> unknown = {Ann("nope", "a", ReadabilityLevel::kCollege, 1, 1, true)};
  CHECK_THROWS_AS(PerceptionReport(unknown, tasks), ValidationError);
  const AgreementReport empty = PerceptionReport({}, tasks);
  CHECK_FALSE(empty.perceived_level_accuracy.has_value());
}

TEST_CASE("perception cell means") {
  const auto tasks = FourTasks();
  const std::vector<Annotation> anns = {
      Ann("t0", "a", ReadabilityLevel::kCollege, 3, 1, true),
      Ann("t0", "b", ReadabilityLevel::kCollege, 3, 1, false),
      Ann("t0", "c", ReadabilityLevel::kCollege, 4, 1, true),
  };
  const AgreementReport r = PerceptionReport(anns, tasks);
  REQUIRE(r.cells.size() == 1);
  CHECK(std::abs(r.cells[0].mean_coherence - 10.0 / 3) < 0.005);
  CHECK(r.cells[0].label_agreement_rate == doctest::Approx(2.0 / 3));
  const json j = AgreementReportToJson(r);
  CHECK(j.at("cells").size() == 1);
  CHECK(j.at("aspects").size() == 4);
}

TEST_CASE("agreement under unanimous varied data") {
  const auto tasks = FourTasks();
  std::vector<Annotation> anns;
  for (const char* who : {"a", "b", "c"}) {
    anns.push_back(Ann("t0", who, ReadabilityLevel::kCollege, 1, 4, true));
    anns.push_back(Ann("t1", who, ReadabilityLevel::kSixthGrade, 4, 1, false));
  }
  const AgreementReport r = PerceptionReport(anns, tasks);
  for (const auto& a : r.aspects) {
    CAPTURE(a.aspect);
    CHECK(a.krippendorff_alpha == doctest::Approx(1.0));
    CHECK(a.fleiss_kappa == doctest::Approx(1.0));
    CHECK(a.kappa_items == 2);
    CHECK(a.kappa_raters == 3);
  }
  CHECK(r.krippendorff_alpha == doctest::Approx(1.0));
  CHECK(r.fleiss_kappa == doctest::Approx(1.0));
}

TEST_CASE("guidelines content") {
  const json g = Guidelines();
  CHECK(g.at("levels").size() == 4);
  CHECK(g.at("levels").at(0).at("id") == "college");
  CHECK(g.at("likert").at("coherence").at("anchors").size() == 4);
  CHECK(g.at("likert").at("informativeness").at("anchors").size() == 4);
  CHECK(g.contains("label_agreement"));
  CHECK(g.at("labels").size() >= 6);
}

TEST_CASE("store overwrites on resubmit and reloads") {
  testing::TempDir dir;
  const std::string path = dir.file("annotations.jsonl");
  std::int64_t last = 0;
  {
    AnnotationStore store(path);
    const Annotation first = store.Submit(Ann("t1", "a", ReadabilityLevel::kCollege, 1, 1, false));
    const Annotation second =
        store.Submit(Ann("t1", "a", ReadabilityLevel::kSixthGrade, 4, 4, true));
    CHECK(second.timestamp_ms > first.timestamp_ms);
    last = second.timestamp_ms;
    store.Submit(Ann("t2", "a", ReadabilityLevel::kHighSchool, 2, 3, true));
    const auto snap = store.snapshot();
    CHECK(snap->log_entries == 3);
    CHECK(snap->latest.size() == 2);
    CHECK(snap->latest.at({"t1", "a"}).perceived_level == ReadabilityLevel::kSixthGrade);
    CHECK_THROWS_AS(store.Submit(Ann("t1", "a", ReadabilityLevel::kCollege, 0, 1, true)),
                    ValidationError);
    CHECK(store.snapshot()->log_entries == 3);
  }
  AnnotationStore reopened(path);
  const auto snap = reopened.snapshot();
  CHECK(snap->log_entries == 3);
  CHECK(snap->latest.at({"t1", "a"}).coherence == 4);
  const Annotation next = reopened.Submit(Ann("t3", "b", ReadabilityLevel::kCollege, 1, 1, true));
  CHECK(next.timestamp_ms > last);
  CHECK(ReadAnnotationLog(path).size() == 4);
}

TEST_CASE("store handles concurrent writers") {
  testing::TempDir dir;
  AnnotationStore store(dir.file("a.jsonl"));
  std::vector<std::thread> threads;
  for (int w = 0; w < 4; ++w) {
    threads.emplace_back([&, w] {
      for (int i = 0; i < 25; ++i) {
        store.Submit(Ann("t" + std::to_string(i), "w" + std::to_string(w),
                         ReadabilityLevel::kMiddleSchool, 2, 2, true));
        (void)store.snapshot()->latest.size();
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(store.snapshot()->latest.size() == 100);
  const auto log = ReadAnnotationLog(dir.file("a.jsonl"));
  CHECK(log.size() == 100);
  std::set<std::int64_t> stamps;
  for (const auto& a : log) stamps.insert(a.timestamp_ms);
  CHECK(stamps.size() == 100);
}

}  // namespace
}  // namespace rwb
