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

// Blind human evaluation: task sampling, the annotation log and agreement
// statistics.

#ifndef RWB_HUMAN_EVAL_H_
#define RWB_HUMAN_EVAL_H_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rwb/parse_eval.h"
#include "rwb/textstat.h"

namespace rwb {

struct AnnotationTask {
  std::string task_id;
  std::string display_text;
  std::string predicted_label;  // display form
  std::string rationale;

  // Hidden from annotators.
  ReadabilityLevel level = ReadabilityLevel::kCollege;
  std::string provider;
  std::string instance_id;
};

// Only task_id, display_text, predicted_label and rationale.
nlohmann::json TaskToPublicJson(const AnnotationTask& task);
// Every field, for the run directory.
nlohmann::json TaskToJson(const AnnotationTask& task);
AnnotationTask TaskFromJson(const nlohmann::json& j);

void WriteTasks(const std::string& path, std::span<const AnnotationTask> tasks);
std::vector<AnnotationTask> ReadTasks(const std::string& path);

// Draws exactly `per_cell` parse-successful records from every
// (provider, level) cell without replacement, then shuffles the whole list.
// Task ids are "t0001", "t0002", ... in presentation order. A pure function
// of its arguments. Throws SamplingError naming the short cell, or
// ValidationError when per_cell < 1.
std::vector<AnnotationTask> SampleTasks(std::span<const RationaleRecord> records,
                                        int per_cell, std::uint64_t seed);

struct Annotation {
  std::string task_id;
  std::string annotator_id;
  ReadabilityLevel perceived_level = ReadabilityLevel::kCollege;
  int coherence = 0;        // 1 (very unreasonable) .. 4 (very reasonable)
  int informativeness = 0;  // 1 (very insufficient) .. 4 (very sufficient)
  bool agrees_with_label = false;
  std::int64_t timestamp_ms = 0;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

nlohmann::json AnnotationToJson(const Annotation& a);
// Throws ValidationError on missing fields, an unknown level or a Likert
// value outside 1..4. A missing timestamp reads as 0.
Annotation AnnotationFromJson(const nlohmann::json& j);

// Keeps the latest annotation per (task, annotator). Equal timestamps
// resolve to the later entry. Output is sorted by (task, annotator).
std::vector<Annotation> ResolveLatest(std::span<const Annotation> log);

// Reads an annotation log (all entries, in file order).
std::vector<Annotation> ReadAnnotationLog(const std::string& path);

// {1,2} -> "low", {3,4} -> "high".
std::string_view BinarizeLikert(int value);
// College and high school -> "hard", middle school and sixth grade -> "easy".
std::string_view BinarizeLevel(ReadabilityLevel level);

// items x categories count matrix. Every row must sum to the same n >= 2.
// Returns nullopt when expected agreement is 1. Throws ValidationError on
// unequal rater counts or an empty matrix.
std::optional<double> FleissKappa(const std::vector<std::vector<int>>& counts);

struct Rating {
  std::string item;
  std::string rater;
  std::string value;
};

// Nominal alpha over sparse ratings. Units with a single value are not
// pairable and are dropped. Returns nullopt with fewer than two pairable
// units or when expected disagreement is 0.
std::optional<double> KrippendorffAlpha(std::span<const Rating> ratings);

struct AspectAgreement {
  std::string aspect;  // "readability", "coherence", "informativeness", "label"
  std::optional<double> krippendorff_alpha;
  std::optional<double> fleiss_kappa;
  // Items entering kappa (those rated by the most common rater count).
  std::size_t kappa_items = 0;
  std::size_t kappa_raters = 0;
};

struct PerceptionCell {
  std::string provider;
  ReadabilityLevel level = ReadabilityLevel::kCollege;
  std::size_t annotations = 0;
  double mean_coherence = 0;
  double mean_informativeness = 0;
  double perceived_level_accuracy = 0;
  double label_agreement_rate = 0;
};

struct AgreementReport {
  std::size_t annotations = 0;
  std::size_t annotators = 0;
  std::vector<AspectAgreement> aspects;
  // Pooled over all aspects, each (task, aspect) pair acting as one item.
  std::optional<double> krippendorff_alpha;
  std::optional<double> fleiss_kappa;
  std::optional<double> perceived_level_accuracy;
  std::optional<double> label_agreement_rate;
  std::optional<double> mean_coherence;
  std::optional<double> mean_informativeness;
  std::vector<PerceptionCell> cells;  // sorted by (provider, level)
};

// Resolves the latest annotation per (task, annotator) and computes the
// agreement statistics (on binarized values) and perception means (on raw
// values). Throws ValidationError when an annotation names an unknown task.
AgreementReport PerceptionReport(std::span<const Annotation> annotations,
                                 std::span<const AnnotationTask> tasks);

nlohmann::json AgreementReportToJson(const AgreementReport& report);

// Level descriptions, Likert anchors and label definitions shown to
// annotators.
nlohmann::json Guidelines();

// Append-only annotation log. Submissions are serialized through one
// writer; readers take an immutable snapshot without blocking it.
class AnnotationStore {
 public:
  struct Snapshot {
    // Latest annotation per (task_id, annotator_id).
    std::map<std::pair<std::string, std::string>, Annotation> latest;
    std::size_t log_entries = 0;
  };

  // Loads `path` if it exists; the file is created on first submission.
  explicit AnnotationStore(std::string path);

  // Validates, stamps a server timestamp (strictly increasing per store)
  // and appends. Returns the stored annotation.
  Annotation Submit(Annotation annotation);

  std::shared_ptr<const Snapshot> snapshot() const;

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::mutex writer_mu_;
  std::int64_t last_timestamp_ = 0;
  std::shared_ptr<const Snapshot> snapshot_;
};

}  // namespace rwb

#endif  // RWB_HUMAN_EVAL_H_
