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

// Prompt construction for readability-controlled rationale generation.
//
// A prompt has three sections separated by blank lines: the task
// description (with the answer options), the few-shot samples, and the test
// instance followed by the readability instruction and the answer-format
// directive:
//
//   Classify whether ...
//   Answer options: hate speech, offensive, normal.
//
//   Text: ...
//   Answer: normal
//   Explanation: ...
//
//   Text: <test instance>
//
//   Elaborate the explanation in three sentences to a sixth grade student.
//   Respond with 'Answer:' on one line and 'Explanation:' afterward.

#ifndef RWB_PROMPTGEN_H_
#define RWB_PROMPTGEN_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rwb/corpus.h"
#include "rwb/textstat.h"

namespace rwb {

inline constexpr std::string_view kDefaultLengthPhrase = "three sentences";
inline constexpr std::string_view kInstructionPrefix =
    "Elaborate the explanation in ";
inline constexpr std::string_view kAnswerDirective =
    "Respond with 'Answer:' on one line and 'Explanation:' afterward.";
inline constexpr std::string_view kAnswerOptionsPrefix = "Answer options: ";

struct FewShotSample {
  std::string text;  // unused for NLI
  std::string premise;
  std::string hypothesis;
  std::string label;  // canonical
  std::string explanation;
};

struct PromptSpec {
  Task task = Task::kHateSpeechMulti;
  std::string task_description;
  std::vector<FewShotSample> few_shot_samples;
  std::string instance_rendering;
  ReadabilityLevel level = ReadabilityLevel::kCollege;
  std::string length_phrase{kDefaultLengthPhrase};
};

// Paraphrased description used when the config does not override it.
std::string DefaultTaskDescription(Task task);

// "Text: ...\nAnswer: ...\nExplanation: ..." (NLI uses Premise/Hypothesis
// lines). Embedded newlines are collapsed to spaces. Throws ValidationError
// on empty fields.
std::string RenderSample(const FewShotSample& sample, Task task);

// Test-instance block ("Text: ..." or "Premise: ...\nHypothesis: ...").
std::string RenderInstance(const Instance& instance);

// The sentence asking for the rationale, without trailing punctuation.
std::string ReadabilityInstruction(std::string_view length_phrase,
                                   ReadabilityLevel level);

// Deterministic, byte-stable prompt text. Throws ValidationError when the
// spec is invalid (empty length phrase or instance).
std::string BuildPrompt(const PromptSpec& spec);

// Reads few-shot samples: corpus records with an extra "rationale" string.
// Returns at most `count` samples in file order.
std::vector<FewShotSample> LoadFewShot(const std::string& path, Task task,
                                       std::size_t count);

// Prompt introspection, used by the mock provider.
std::optional<ReadabilityLevel> ExtractLevel(std::string_view prompt);
std::optional<std::string> ExtractTestInstance(std::string_view prompt);
std::vector<std::string> ExtractAnswerOptions(std::string_view prompt);

}  // namespace rwb

#endif  // RWB_PROMPTGEN_H_
