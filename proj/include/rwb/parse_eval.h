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

#ifndef RWB_PARSE_EVAL_H_
#define RWB_PARSE_EVAL_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rwb/corpus.h"
#include "rwb/judges.h"
#include "rwb/textstat.h"

namespace rwb {

struct ParsedResponse {
  std::optional<std::string> label;  // canonical; unset on failure
  std::optional<std::string> rationale;
  std::string failure;  // reason when label is unset

  bool ok() const { return label.has_value(); }
  friend bool operator==(const ParsedResponse&, const ParsedResponse&) = default;
};

// Extracts (label, rationale) from a completion. The first "Answer:" line
// wins; its text is matched against the task's surface forms exactly, then
// as a whole-word substring. Without an answer line the whole completion is
// searched and the rationale is whatever follows the matched label. The
// rationale is otherwise the text after the first "Explanation:" marker, or
// everything after the answer line. Never throws.
ParsedResponse ParseResponse(std::string_view raw, Task task);

// "Answer: {label}\nExplanation: {rationale}".
std::string RenderParsed(const ParsedResponse& parsed);

enum class SimilarityKind { kNone, kToken, kPooled };

struct RecordScores {
  std::optional<ReadabilityScores> readability;
  std::optional<TigerEvaluation> tiger_native;
  std::string tiger_native_failure;
  std::optional<TigerEvaluation> tiger_self;
  std::string tiger_self_failure;
  std::optional<SimilarityPrf> bertscore;
  std::optional<double> pooled_similarity;
  SimilarityKind similarity_kind = SimilarityKind::kNone;
};

// One generation result for (instance, level, provider).
struct RationaleRecord {
  std::string instance_id;
  Task task = Task::kHateSpeechMulti;
  ReadabilityLevel level = ReadabilityLevel::kCollege;
  std::string provider;
  std::string prompt_digest;
  std::string source_text;  // instance as displayed in the prompt
  std::optional<std::string> reference;
  std::string raw_completion;
  ParsedResponse parsed;
  GoldLabel gold;
  RecordScores scores;

  bool has_rationale() const { return parsed.ok() && parsed.rationale.has_value(); }
};

nlohmann::json RecordToJson(const RationaleRecord& record);
RationaleRecord RecordFromJson(const nlohmann::json& j);

void WriteRecords(const std::string& path, std::span<const RationaleRecord> records);
std::vector<RationaleRecord> ReadRecords(const std::string& path);

enum class AccuracyMode { kRaw, kProcessed };

struct AccuracyResult {
  std::size_t correct = 0;
  std::size_t total = 0;
  std::size_t parse_failures = 0;
  std::size_t numerator = 0;
  std::size_t denominator = 0;
  std::optional<double> value;  // unset when the denominator is 0
};

// Raw: failures count as wrong. Processed: failures leave the denominator.
// Throws ValidationError when records mix tasks or carry an excluded gold.
AccuracyResult Accuracy(std::span<const RationaleRecord> records,
                        AccuracyMode mode);

}  // namespace rwb

#endif  // RWB_PARSE_EVAL_H_
