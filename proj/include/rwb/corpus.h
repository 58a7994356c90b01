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

// Task instances in the normalized line-delimited schema, gold-label
// derivation and rule-based reference explanations.
//
// One record per line:
//
//   {"id": "hx-001", "task": "hate_speech_multi", "text": "...",
//    "annotator_labels": ["hatespeech", "offensive", "hatespeech"],
//    "explanation": {"targets": ["Women"]}, "split": "test"}
//
// Binary records carry {"category": "person directed abuse"} and NLI
// records carry "premise"/"hypothesis" plus
// {"relations": [{"token_a": "a girl", "token_b": "a man",
//                 "relation": "contradiction"}]}.

#ifndef RWB_CORPUS_H_
#define RWB_CORPUS_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace rwb {

enum class Task {
  kHateSpeechMulti,   // hatespeech / offensive / normal
  kHateSpeechBinary,  // offensive / normal
  kNli,               // entailment / contradiction / neutral
};

std::string_view TaskId(Task task);

// Accepts the identifiers above and the dataset aliases "hatexplain",
// "cad" and "spanex".
std::optional<Task> ParseTask(std::string_view text);

// Canonical label set of `task`, in presentation order.
std::span<const std::string_view> TaskLabels(Task task);

// Human-facing form of a canonical label ("hatespeech" -> "hate speech").
std::string_view DisplayLabel(std::string_view canonical);

struct Relation {
  std::string token_a;
  std::string token_b;
  std::string relation;  // may be empty
};

struct ExplanationAnnotations {
  std::vector<std::string> targets;  // multi-class hate speech
  std::string category;              // binary abuse category
  std::vector<Relation> relations;   // NLI
};

struct Instance {
  std::string id;
  Task task = Task::kHateSpeechMulti;
  std::string text;
  std::string premise;
  std::string hypothesis;
  std::vector<std::string> annotator_labels;
  ExplanationAnnotations explanation;
  std::string split = "test";
};

struct GoldLabel {
  std::optional<std::string> value;
  std::string excluded_reason;

  static GoldLabel Of(std::string label) { return {std::move(label), {}}; }
  static GoldLabel Excluded(std::string reason) {
    return {std::nullopt, std::move(reason)};
  }
  bool excluded() const { return !value.has_value(); }

  friend bool operator==(const GoldLabel&, const GoldLabel&) = default;
};

// Parses and validates one record. Throws ValidationError naming the field.
Instance InstanceFromJson(const nlohmann::json& record);
nlohmann::json InstanceToJson(const Instance& instance);

// Reads a line-delimited file. Blank lines are skipped. Any malformed
// record raises SchemaError with its 1-based line number. Records whose
// task differs from `task` are schema violations; only the test split is
// returned.
std::vector<Instance> LoadInstances(const std::string& path, Task task);

// Maps a binary-task annotation (either a raw abuse category such as
// "PersonDirectedAbuse" or an already collapsed label) to "offensive" or
// "normal". Returns nullopt for unknown categories.
std::optional<std::string> CollapseBinaryLabel(std::string_view label);

// Multi-class: strict majority, Excluded("tie") otherwise. Binary: any
// abuse category makes the instance offensive. NLI: the provided label
// (strict majority if several). Throws MissingLabelsError when no labels.
GoldLabel DeriveGold(const Instance& instance);

// Fills the task's reference template. Throws ReferenceUnavailableError if
// the gold label is excluded or the needed annotation fields are missing.
std::string BuildReference(const Instance& instance, const GoldLabel& gold);

// Text of the instance as shown to a model or an annotator. NLI instances
// render as "Premise: ...\nHypothesis: ...".
std::string InstanceDisplayText(const Instance& instance);

// Best-effort converters from the original dataset layouts into the
// normalized schema. Parsing fidelity beyond the documented fields is not
// guaranteed.
namespace convert {

// One entry of HateXplain's dataset.json ({"post_id", "annotators":
// [{"label", "target": [...]}], "post_tokens": [...]}). Targets are the
// distinct non-"None" annotator targets, most frequent first.
Instance FromHateXplain(const nlohmann::json& post, std::string split = "test");

// One CAD row given as header-name -> value. Uses "id", "text" (or
// "meta_text"), "label" (or "annotation_Primary") and "split".
Instance FromCad(const std::vector<std::pair<std::string, std::string>>& row);

// One SpanEx-style record carrying "premise", "hypothesis", "label" and an
// optional "relations" list of {"premise_span"|"token_a",
// "hypothesis_span"|"token_b", "relation"}.
Instance FromSpanEx(const nlohmann::json& record);

}  // namespace convert

}  // namespace rwb

#endif  // RWB_CORPUS_H_
