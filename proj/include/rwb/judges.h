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

// Rationale-quality scoring.
//
// Error-analysis judging: a judge model receives an instruction, the source
// context and the system output, and lists structured errors, one per line:
//
//   - <location> | <aspect> | <explanation> | <reduction>
//
// or the single line "NO ERRORS". Each reduction lies in [-5, -0.5]; the
// instance score is their sum (0 when there are no errors). The same
// request can be routed to the model that produced the rationale for
// self-evaluation.
//
// Embedding similarity: greedy token matching on cosine similarity
// (precision, recall, F1) and pooled-vector cosine.

#ifndef RWB_JUDGES_H_
#define RWB_JUDGES_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rwb/gateway.h"

namespace rwb {

inline constexpr std::string_view kJudgeLineFormat =
    "- <location> | <aspect> | <explanation> | <reduction>";
inline constexpr std::string_view kNoErrorsSentinel = "NO ERRORS";
inline constexpr double kMinReduction = -5.0;
inline constexpr double kMaxReduction = -0.5;

enum class Aspect {
  kFactuality,
  kRelevance,
  kFluency,
  kCoherence,
  kCompleteness,
  kOther,
};

inline constexpr std::array<Aspect, 6> kAllAspects = {
    Aspect::kFactuality, Aspect::kRelevance,    Aspect::kFluency,
    Aspect::kCoherence,  Aspect::kCompleteness, Aspect::kOther};

std::string_view AspectName(Aspect aspect);
std::optional<Aspect> ParseAspect(std::string_view text);

enum class JudgeKind { kNative, kSelf };

std::string_view JudgeKindName(JudgeKind kind);

struct JudgeRequest {
  std::string instruction;
  std::string source_context;
  std::string system_output;
};

struct ErrorRecord {
  std::string location;
  Aspect aspect = Aspect::kOther;
  std::string explanation;
  double reduction = kMaxReduction;
};

struct TigerEvaluation {
  std::vector<ErrorRecord> errors;
  double instance_score = 0;
  JudgeKind judge = JudgeKind::kNative;
  // Clamped reductions, unknown aspects and similar repairs.
  std::vector<std::string> warnings;
};

nlohmann::json TigerToJson(const TigerEvaluation& eval);
TigerEvaluation TigerFromJson(const nlohmann::json& j);

// Fixed judging prompt. Throws ValidationError when a field is empty.
std::string RenderJudgePrompt(const JudgeRequest& request);

// Parses a judge completion. Reductions outside [-5, -0.5] are clamped to
// the nearest bound with a warning. Throws JudgeParseFailure when the text
// holds neither error lines nor the sentinel.
TigerEvaluation ParseJudgeOutput(std::string_view completion, JudgeKind kind);

// Renders the prompt, sends it through `gateway` to `profile` and parses
// the completion.
TigerEvaluation JudgeRationale(Gateway& gateway, const ProviderProfile& profile,
                               const JudgeRequest& request, JudgeKind kind);

struct TigerAggregate {
  double full_batch = 0;
  std::size_t below_zero_count = 0;
  // Sum of all scores over below_zero_count; unset when that count is 0.
  std::optional<double> nonzero_score;
};

// Throws ValidationError on empty input.
TigerAggregate AggregateTiger(std::span<const double> scores);
TigerAggregate AggregateTiger(std::span<const TigerEvaluation> evals);

struct SimilarityPrf {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

using VectorList = std::vector<std::vector<double>>;

// Greedy matching on the candidate x reference cosine matrix: recall is the
// mean over reference tokens of the best candidate similarity, precision
// the converse. Negative similarities count as 0 so every value lies in
// [0, 1]. Throws ValidationError on empty input, unequal dimensions or a
// zero vector.
SimilarityPrf BertScore(const VectorList& candidate, const VectorList& reference);

enum class Pooling { kEndOfSequence, kMean };

std::optional<Pooling> ParsePooling(std::string_view text);

// Pools token vectors into one vector. Throws ValidationError when empty.
std::vector<double> Pool(const VectorList& tokens, Pooling pooling);

// Cosine of two vectors. Throws ValidationError on a dimension mismatch or
// a zero-norm vector.
double PooledSimilarity(std::span<const double> candidate,
                        std::span<const double> reference);

}  // namespace rwb

#endif  // RWB_JUDGES_H_
