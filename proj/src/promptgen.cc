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

#include "rwb/promptgen.h"

#include <fstream>

#include "rwb/error.h"
#include "strings.h"

namespace rwb {
namespace {

using internal::CollapseWhitespace;
using internal::Trim;

std::string RequireField(std::string_view value, std::string_view name) {
  std::string collapsed = CollapseWhitespace(value);
  if (collapsed.empty()) {
    throw ValidationError("few-shot sample has empty " + std::string(name));
  }
  return collapsed;
}

std::string AnswerOptionsLine(Task task) {
  std::string line(kAnswerOptionsPrefix);
  const auto labels = TaskLabels(task);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i > 0) line += ", ";
    line += DisplayLabel(labels[i]);
  }
  line += ".";
  return line;
}

// Block boundaries are blank lines.
std::vector<std::string> SplitBlocks(std::string_view prompt) {
  std::vector<std::string> blocks;
  std::string current;
  for (std::string_view line : internal::SplitLines(prompt)) {
    if (Trim(line).empty()) {
      if (!current.empty()) blocks.push_back(std::move(current));
      current.clear();
      continue;
    }
    if (!current.empty()) current.push_back('\n');
    current += line;
  }
  if (!current.empty()) blocks.push_back(std::move(current));
  return blocks;
}

}  // namespace

std::string DefaultTaskDescription(Task task) {
  switch (task) {
    case Task::kHateSpeechMulti:
      return "Classify whether the following social media post is hate "
             "speech, offensive, or normal, and explain the decision.";
    case Task::kHateSpeechBinary:
      return "Decide whether the following online comment is offensive or "
             "normal, and explain the decision.";
    case Task::kNli:
      return "Decide whether the hypothesis is entailed by, contradicts, or "
             "is neutral with respect to the premise, and explain the "
             "decision.";
  }
  return {};
}

std::string RenderSample(const FewShotSample& sample, Task task) {
  std::string out;
  if (task == Task::kNli) {
    out += "Premise: " + RequireField(sample.premise, "premise") + "\n";
    out += "Hypothesis: " + RequireField(sample.hypothesis, "hypothesis") + "\n";
  } else {
    out += "Text: " + RequireField(sample.text, "text") + "\n";
  }
  out += "Answer: " +
         std::string(DisplayLabel(RequireField(sample.label, "label"))) + "\n";
  out += "Explanation: " + RequireField(sample.explanation, "explanation");
  return out;
}

std::string RenderInstance(const Instance& instance) {
  if (instance.task == Task::kNli) return InstanceDisplayText(instance);
  return "Text: " + InstanceDisplayText(instance);
}

std::string ReadabilityInstruction(std::string_view length_phrase,
                                   ReadabilityLevel level) {
  return std::string(kInstructionPrefix) + std::string(length_phrase) +
         " to a " + std::string(LevelPhrase(level)) + " student";
}

std::string BuildPrompt(const PromptSpec& spec) {
  if (Trim(spec.length_phrase).empty()) {
    throw ValidationError("length phrase must not be empty");
  }
  if (Trim(spec.instance_rendering).empty()) {
    throw ValidationError("instance rendering must not be empty");
  }
  const std::string description = spec.task_description.empty()
                                      ? DefaultTaskDescription(spec.task)
                                      : spec.task_description;
  std::string prompt = std::string(Trim(description)) + "\n" +
                       AnswerOptionsLine(spec.task) + "\n\n";
  for (const FewShotSample& sample : spec.few_shot_samples) {
    prompt += RenderSample(sample, spec.task) + "\n\n";
  }
  prompt += std::string(Trim(spec.instance_rendering)) + "\n\n";
  prompt += ReadabilityInstruction(spec.length_phrase, spec.level) + ".\n";
  prompt += kAnswerDirective;
  prompt += "\n";
  return prompt;
}

std::vector<FewShotSample> LoadFewShot(const std::string& path, Task task,
                                       std::size_t count) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open few-shot file: " + path);
  std::vector<FewShotSample> out;
  std::string line;
  std::size_t lineno = 0;
  while (out.size() < count && std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    try {
      const auto record = nlohmann::json::parse(line);
      const Instance inst = InstanceFromJson(record);
      if (inst.task != task) throw ValidationError("task mismatch");
      const GoldLabel gold = DeriveGold(inst);
      if (gold.excluded()) throw ValidationError("few-shot label is a tie");
      FewShotSample sample;
      sample.text = inst.text;
      sample.premise = inst.premise;
      sample.hypothesis = inst.hypothesis;
      sample.label = *gold.value;
      sample.explanation = record.at("rationale").get<std::string>();
      out.push_back(std::move(sample));
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(path, lineno, e.what());
    } catch (const ValidationError& e) {
      throw SchemaError(path, lineno, e.what());
    }
  }
  return out;
}

std::optional<ReadabilityLevel> ExtractLevel(std::string_view prompt) {
  const std::size_t at = prompt.rfind(kInstructionPrefix);
  if (at == std::string_view::npos) return std::nullopt;
  std::string_view rest = prompt.substr(at);
  rest = rest.substr(0, rest.find('\n'));
  for (ReadabilityLevel level : kAllLevels) {
    const std::string needle =
        " to a " + std::string(LevelPhrase(level)) + " student";
    if (rest.find(needle) != std::string_view::npos) return level;
  }
  return std::nullopt;
}

std::optional<std::string> ExtractTestInstance(std::string_view prompt) {
  const auto blocks = SplitBlocks(prompt);
  for (std::size_t i = blocks.size(); i-- > 1;) {
    if (blocks[i].rfind(kInstructionPrefix, 0) == 0) return blocks[i - 1];
  }
  return std::nullopt;
}

std::vector<std::string> ExtractAnswerOptions(std::string_view prompt) {
  std::vector<std::string> options;
  for (std::string_view line : internal::SplitLines(prompt)) {
    if (line.rfind(kAnswerOptionsPrefix, 0) != 0) continue;
    std::string_view rest = line.substr(kAnswerOptionsPrefix.size());
    if (!rest.empty() && rest.back() == '.') rest.remove_suffix(1);
    while (!rest.empty()) {
      const std::size_t comma = rest.find(',');
      options.emplace_back(Trim(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    break;
  }
  return options;
}

}  // namespace rwb
