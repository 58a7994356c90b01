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

// Aggregation of scored records into per-(task, provider, level) tables,
// adjacent-level FRE pairs and differentiation rates.
//
// Output files written by WriteReport:
//   summary.json        the whole report
//   accuracy.csv        raw and processed accuracy
//   readability.csv     mean FRE, GFI, CLI
//   tiger.csv           error-analysis aggregates, native and self
//   similarity.csv      embedding similarity means
//   adjacent_pairs.csv  scatter data for adjacent prompted levels
//   differentiation.csv share of pairs where the more readable prompt won

#ifndef RWB_REPORT_H_
#define RWB_REPORT_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rwb/judges.h"
#include "rwb/parse_eval.h"

namespace rwb {

// A value that may be undefined, with the reason when it is.
struct Metric {
  std::optional<double> value;
  std::string reason;
};

struct TigerCell {
  std::size_t evaluated = 0;
  std::size_t failures = 0;  // judge output could not be parsed
  Metric full_batch;
  std::size_t below_zero_count = 0;
  Metric nonzero_score;
};

struct ReportCell {
  Task task = Task::kHateSpeechMulti;
  std::string provider;
  ReadabilityLevel level = ReadabilityLevel::kCollege;

  std::size_t records = 0;
  std::size_t parse_failures = 0;
  std::size_t excluded_gold = 0;  // records without a gold label
  std::size_t correct = 0;
  Metric accuracy_raw;
  Metric accuracy_processed;

  std::size_t readability_n = 0;
  Metric fre, gfi, cli;

  TigerCell tiger_native;
  TigerCell tiger_self;

  // "token", "pooled", "mixed" or "none".
  std::string similarity_kind = "none";
  std::size_t similarity_n = 0;
  Metric bertscore_precision, bertscore_recall, bertscore_f1;
  Metric pooled_similarity;
};

struct AdjacentPair {
  Task task = Task::kHateSpeechMulti;
  std::string provider;
  std::string instance_id;
  ReadabilityLevel more_readable = ReadabilityLevel::kHighSchool;
  ReadabilityLevel less_readable = ReadabilityLevel::kCollege;
  double x = 0;  // FRE of the more readable prompt
  double y = 0;  // FRE of the less readable prompt
};

struct DifferentiationRow {
  Task task = Task::kHateSpeechMulti;
  std::string provider;
  std::string pair;  // "all" or e.g. "high_school>college"
  std::size_t pairs = 0;
  std::optional<double> rate;
};

struct RunReport {
  std::size_t total_records = 0;
  std::vector<ReportCell> cells;  // sorted by (task, provider, level)
  std::vector<AdjacentPair> pairs;
  std::size_t skipped_pairs = 0;
  std::vector<DifferentiationRow> differentiation;
};

// For every (task, provider, instance) and each adjacent level pair, from
// (high school, college) up to (sixth grade, middle school), emits the FRE
// of both rationales. Pairs with a side that is missing or unscored are
// skipped and counted in `skipped`.
std::vector<AdjacentPair> AdjacentPairs(std::span<const RationaleRecord> records,
                                        std::size_t* skipped = nullptr);

// Share of pairs with x > y. Ties do not count. Unset when empty.
std::optional<double> DifferentiationRate(std::span<const std::pair<double, double>> pairs);
std::optional<double> DifferentiationRate(std::span<const AdjacentPair> pairs);

// Throws ValidationError on an empty record set.
RunReport Aggregate(std::span<const RationaleRecord> records);

nlohmann::json ReportToJson(const RunReport& report);

// Table names: "accuracy", "readability", "tiger", "similarity",
// "adjacent_pairs", "differentiation".
std::string ReportCsv(const RunReport& report, std::string_view table);

// Writes summary.json and every CSV table into `dir`.
void WriteReport(const RunReport& report, const std::string& dir);

}  // namespace rwb

#endif  // RWB_REPORT_H_
