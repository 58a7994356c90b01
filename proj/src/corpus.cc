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

#include "rwb/corpus.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <string>

#include "rwb/error.h"
#include "strings.h"

namespace rwb {
namespace {

using internal::CollapseWhitespace;
using internal::ToLower;
using internal::Trim;
using nlohmann::json;

constexpr std::array<std::string_view, 3> kMultiLabels = {
    "hatespeech", "offensive", "normal"};
constexpr std::array<std::string_view, 2> kBinaryLabels = {"offensive",
                                                           "normal"};
constexpr std::array<std::string_view, 3> kNliLabels = {
    "entailment", "contradiction", "neutral"};

constexpr std::array<std::string_view, 4> kAbuseCategories = {
    "identity directed abuse", "affiliation directed abuse",
    "person directed abuse", "offensive"};
constexpr std::array<std::string_view, 6> kNonAbuseCategories = {
    "neutral", "none", "counter speech", "non hateful slurs", "slur",
    "normal"};

constexpr std::string_view kNormalReference =
    "The text is labeled as normal because no abusive expression is involved.";

// "PersonDirectedAbuse" / "person_directed-abuse" -> "person directed abuse".
std::string NormalizeCategory(std::string_view raw) {
  std::string spaced;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (c == '_' || c == '-') {
      spaced.push_back(' ');
      continue;
    }
    if (i > 0 && std::isupper(static_cast<unsigned char>(c)) &&
        std::islower(static_cast<unsigned char>(raw[i - 1]))) {
      spaced.push_back(' ');
    }
    spaced.push_back(c);
  }
  return CollapseWhitespace(ToLower(spaced));
}

// Lowercase with spaces, underscores and hyphens dropped.
std::string SquashLabel(std::string_view raw) {
  std::string out;
  for (char c : ToLower(Trim(raw))) {
    if (c != ' ' && c != '_' && c != '-') out.push_back(c);
  }
  return out;
}

std::optional<std::string> CanonicalLabel(Task task, std::string_view raw) {
  if (task == Task::kHateSpeechBinary) return CollapseBinaryLabel(raw);
  const std::string squashed = SquashLabel(raw);
  for (std::string_view label : TaskLabels(task)) {
    if (squashed == label) return std::string(label);
  }
  return std::nullopt;
}

std::optional<std::string> StrictMajority(const std::vector<std::string>& labels) {
  std::map<std::string, std::size_t> counts;
  for (const auto& l : labels) ++counts[l];
  for (const auto& [label, count] : counts) {
    if (2 * count > labels.size()) return label;
  }
  return std::nullopt;
}

std::string RequireString(const json& record, const char* field) {
  const auto it = record.find(field);
  if (it == record.end() || !it->is_string()) {
    throw ValidationError(std::string("missing or non-string field \"") +
                          field + "\"");
  }
  return it->get<std::string>();
}

std::string OptionalString(const json& record, const char* field) {
  const auto it = record.find(field);
  if (it == record.end() || it->is_null()) return {};
  if (!it->is_string()) {
    throw ValidationError(std::string("field \"") + field +
                          "\" must be a string");
  }
  return it->get<std::string>();
}

std::string Connective(std::string_view relation, std::string_view gold) {
  const std::string r = NormalizeCategory(relation);
  if (r == "contradiction" || r == "exclusion" || r == "alternation") {
    return "does not equal to";
  }
  if (r == "equivalence" || r == "entailment") return "equals to";
  if (r == "forward entailment") return "is a kind of";
  if (r == "reverse entailment" || r == "backward entailment") {
    return "includes";
  }
  if (r == "neutral" || r == "independence") return "is not related to";
  if (gold == "contradiction") return "does not equal to";
  if (gold == "entailment") return "equals to";
  return "is not related to";
}

}  // namespace

std::string_view TaskId(Task task) {
  switch (task) {
    case Task::kHateSpeechMulti:
      return "hate_speech_multi";
    case Task::kHateSpeechBinary:
      return "hate_speech_binary";
    case Task::kNli:
      return "nli";
  }
  return "";
}

std::optional<Task> ParseTask(std::string_view text) {
  const std::string t = ToLower(Trim(text));
  if (t == "hate_speech_multi" || t == "hatexplain") {
    return Task::kHateSpeechMulti;
  }
  if (t == "hate_speech_binary" || t == "cad") return Task::kHateSpeechBinary;
  if (t == "nli" || t == "spanex") return Task::kNli;
  return std::nullopt;
}

std::span<const std::string_view> TaskLabels(Task task) {
  switch (task) {
    case Task::kHateSpeechMulti:
      return kMultiLabels;
    case Task::kHateSpeechBinary:
      return kBinaryLabels;
    case Task::kNli:
      return kNliLabels;
  }
  return {};
}

std::string_view DisplayLabel(std::string_view canonical) {
  if (canonical == "hatespeech") return "hate speech";
  return canonical;
}

std::optional<std::string> CollapseBinaryLabel(std::string_view label) {
  const std::string normalized = NormalizeCategory(label);
  for (std::string_view c : kAbuseCategories) {
    if (normalized == c) return std::string("offensive");
  }
  for (std::string_view c : kNonAbuseCategories) {
    if (normalized == c) return std::string("normal");
  }
  return std::nullopt;
}

Instance InstanceFromJson(const json& record) {
  if (!record.is_object()) throw ValidationError("record is not an object");
  Instance inst;
  inst.id = RequireString(record, "id");
  if (inst.id.empty()) throw ValidationError("empty \"id\"");
  const auto task = ParseTask(RequireString(record, "task"));
  if (!task) throw ValidationError("unknown task");
  inst.task = *task;

  if (inst.task == Task::kNli) {
    inst.premise = RequireString(record, "premise");
    inst.hypothesis = RequireString(record, "hypothesis");
    if (Trim(inst.premise).empty() || Trim(inst.hypothesis).empty()) {
      throw ValidationError("NLI record needs premise and hypothesis");
    }
    inst.text = OptionalString(record, "text");
  } else {
    inst.text = RequireString(record, "text");
    if (Trim(inst.text).empty()) throw ValidationError("empty \"text\"");
  }

  const auto labels = record.find("annotator_labels");
  if (labels == record.end() || !labels->is_array()) {
    throw ValidationError("missing field \"annotator_labels\"");
  }
  for (const auto& l : *labels) {
    if (!l.is_string()) throw ValidationError("non-string annotator label");
    const std::string raw = l.get<std::string>();
    const auto canonical = CanonicalLabel(inst.task, raw);
    if (!canonical) throw ValidationError("unknown label \"" + raw + "\"");
    // Binary labels keep the raw category: it feeds the reference template.
    inst.annotator_labels.push_back(
        inst.task == Task::kHateSpeechBinary ? NormalizeCategory(raw)
                                             : *canonical);
  }
  if (inst.annotator_labels.empty()) {
    throw ValidationError("\"annotator_labels\" is empty");
  }

  if (const auto ex = record.find("explanation");
      ex != record.end() && !ex->is_null()) {
    if (!ex->is_object()) throw ValidationError("\"explanation\" not an object");
    if (const auto t = ex->find("targets"); t != ex->end()) {
      for (const auto& target : *t) {
        inst.explanation.targets.push_back(target.get<std::string>());
      }
    }
    inst.explanation.category = OptionalString(*ex, "category");
    if (const auto r = ex->find("relations"); r != ex->end()) {
      for (const auto& rel : *r) {
        inst.explanation.relations.push_back(
            {RequireString(rel, "token_a"), RequireString(rel, "token_b"),
             OptionalString(rel, "relation")});
      }
    }
  }
  const std::string split = OptionalString(record, "split");
  inst.split = split.empty() ? "test" : ToLower(split);
  return inst;
}

json InstanceToJson(const Instance& inst) {
  json j;
  j["id"] = inst.id;
  j["task"] = TaskId(inst.task);
  if (inst.task == Task::kNli) {
    j["premise"] = inst.premise;
    j["hypothesis"] = inst.hypothesis;
  } else {
    j["text"] = inst.text;
  }
  j["annotator_labels"] = inst.annotator_labels;
  json ex = json::object();
  if (!inst.explanation.targets.empty()) {
    ex["targets"] = inst.explanation.targets;
  }
  if (!inst.explanation.category.empty()) {
    ex["category"] = inst.explanation.category;
  }
  if (!inst.explanation.relations.empty()) {
    json rels = json::array();
    for (const auto& r : inst.explanation.relations) {
      json rel = {{"token_a", r.token_a}, {"token_b", r.token_b}};
      if (!r.relation.empty()) rel["relation"] = r.relation;
      rels.push_back(rel);
    }
    ex["relations"] = rels;
  }
  j["explanation"] = ex;
  j["split"] = inst.split;
  return j;
}

std::vector<Instance> LoadInstances(const std::string& path, Task task) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open instance file: " + path);
  std::vector<Instance> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    Instance inst;
    try {
      inst = InstanceFromJson(json::parse(line));
    } catch (const json::exception& e) {
      throw SchemaError(path, lineno, e.what());
    } catch (const ValidationError& e) {
      throw SchemaError(path, lineno, e.what());
    }
    if (inst.task != task) {
      throw SchemaError(path, lineno,
                        "task \"" + std::string(TaskId(inst.task)) +
                            "\" does not match \"" +
                            std::string(TaskId(task)) + "\"");
    }
    if (inst.split == "test") out.push_back(std::move(inst));
  }
  return out;
}

GoldLabel DeriveGold(const Instance& instance) {
  const auto& labels = instance.annotator_labels;
  if (labels.empty()) {
    throw MissingLabelsError("instance " + instance.id + " has no labels");
  }
  if (instance.task == Task::kHateSpeechBinary) {
    for (const auto& l : labels) {
      const auto collapsed = CollapseBinaryLabel(l);
      if (!collapsed) throw ValidationError("unknown binary category " + l);
      if (*collapsed == "offensive") return GoldLabel::Of("offensive");
    }
    return GoldLabel::Of("normal");
  }
  if (const auto majority = StrictMajority(labels)) {
    return GoldLabel::Of(*majority);
  }
  return GoldLabel::Excluded("tie");
}

std::string BuildReference(const Instance& instance, const GoldLabel& gold) {
  if (gold.excluded()) {
    throw ReferenceUnavailableError("gold label excluded: " +
                                    gold.excluded_reason);
  }
  const std::string& label = *gold.value;
  switch (instance.task) {
    case Task::kHateSpeechMulti: {
      if (label == "normal") return std::string(kNormalReference);
      if (instance.explanation.targets.empty()) {
        throw ReferenceUnavailableError("instance " + instance.id +
                                        " has no targets");
      }
      return "The text is labeled as " + std::string(DisplayLabel(label)) +
             " because of expressions against " +
             internal::JoinEnglish(instance.explanation.targets) + ".";
    }
    case Task::kHateSpeechBinary: {
      if (label == "normal") return std::string(kNormalReference);
      std::string category = NormalizeCategory(instance.explanation.category);
      if (category.empty()) {
        for (const auto& l : instance.annotator_labels) {
          if (l != "offensive" && CollapseBinaryLabel(l) == "offensive") {
            category = NormalizeCategory(l);
            break;
          }
        }
      }
      if (category.empty()) {
        throw ReferenceUnavailableError("instance " + instance.id +
                                        " has no abuse category");
      }
      return "The text is labeled as offensive because the expression "
             "involves " +
             category + ".";
    }
    case Task::kNli: {
      const auto& rels = instance.explanation.relations;
      if (rels.empty()) {
        throw ReferenceUnavailableError("instance " + instance.id +
                                        " has no token relations");
      }
      std::vector<std::string> clauses;
      for (const auto& r : rels) {
        clauses.push_back(r.token_a + " " + Connective(r.relation, label) +
                          " " + r.token_b);
      }
      return "The relation between hypothesis and premise is " + label +
             " because " + internal::JoinEnglish(clauses) + ".";
    }
  }
  throw ReferenceUnavailableError("unknown task");
}

std::string InstanceDisplayText(const Instance& instance) {
  if (instance.task == Task::kNli) {
    return "Premise: " + CollapseWhitespace(instance.premise) +
           "\nHypothesis: " + CollapseWhitespace(instance.hypothesis);
  }
  return CollapseWhitespace(instance.text);
}

namespace convert {

Instance FromHateXplain(const json& post, std::string split) {
  Instance inst;
  inst.task = Task::kHateSpeechMulti;
  inst.id = post.at("post_id").get<std::string>();
  std::string text;
  for (const auto& tok : post.at("post_tokens")) {
    if (!text.empty()) text.push_back(' ');
    text += tok.get<std::string>();
  }
  inst.text = text;
  std::map<std::string, int> target_counts;
  for (const auto& a : post.at("annotators")) {
    const std::string raw = a.at("label").get<std::string>();
    const auto canonical = CanonicalLabel(Task::kHateSpeechMulti, raw);
    if (!canonical) throw ValidationError("unknown label \"" + raw + "\"");
    inst.annotator_labels.push_back(*canonical);
    if (const auto t = a.find("target"); t != a.end()) {
      for (const auto& target : *t) {
        const std::string name = target.get<std::string>();
        if (name != "None") ++target_counts[name];
      }
    }
  }
  std::vector<std::pair<std::string, int>> ranked(target_counts.begin(),
                                                  target_counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) {
                     return a.second > b.second;
                   });
  for (const auto& [name, count] : ranked) {
    inst.explanation.targets.push_back(name);
  }
  inst.split = std::move(split);
  return inst;
}

Instance FromCad(const std::vector<std::pair<std::string, std::string>>& row) {
  auto get = [&](std::initializer_list<std::string_view> names) {
    for (std::string_view name : names) {
      for (const auto& [key, value] : row) {
        if (key == name) return value;
      }
    }
    return std::string();
  };
  Instance inst;
  inst.task = Task::kHateSpeechBinary;
  inst.id = get({"id"});
  inst.text = get({"text", "meta_text"});
  const std::string label = get({"label", "annotation_Primary"});
  if (inst.id.empty() || inst.text.empty() || label.empty()) {
    throw ValidationError("CAD row needs id, text and label columns");
  }
  if (!CollapseBinaryLabel(label)) {
    throw ValidationError("unknown CAD label \"" + label + "\"");
  }
  inst.annotator_labels.push_back(NormalizeCategory(label));
  if (CollapseBinaryLabel(label) == "offensive") {
    inst.explanation.category = NormalizeCategory(label);
  }
  const std::string split = get({"split"});
  inst.split = split.empty() ? "test" : ToLower(split);
  return inst;
}

Instance FromSpanEx(const json& record) {
  Instance inst;
  inst.task = Task::kNli;
  inst.id = RequireString(record, "id");
  inst.premise = RequireString(record, "premise");
  inst.hypothesis = RequireString(record, "hypothesis");
  const std::string label = RequireString(record, "label");
  const auto canonical = CanonicalLabel(Task::kNli, label);
  if (!canonical) throw ValidationError("unknown NLI label \"" + label + "\"");
  inst.annotator_labels.push_back(*canonical);
  if (const auto rels = record.find("relations"); rels != record.end()) {
    for (const auto& r : *rels) {
      Relation rel;
      rel.token_a = r.contains("token_a") ? r.at("token_a").get<std::string>()
                                          : r.at("premise_span").get<std::string>();
      rel.token_b = r.contains("token_b")
                        ? r.at("token_b").get<std::string>()
                        : r.at("hypothesis_span").get<std::string>();
      rel.relation = OptionalString(r, "relation");
      inst.explanation.relations.push_back(std::move(rel));
    }
  }
  const std::string split = OptionalString(record, "split");
  inst.split = split.empty() ? "test" : ToLower(split);
  return inst;
}

}  // namespace convert

}  // namespace rwb
