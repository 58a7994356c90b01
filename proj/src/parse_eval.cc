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

#include "rwb/parse_eval.h"

#include <cctype>
#include <fstream>

#include "rwb/error.h"
#include "strings.h"

namespace rwb {
namespace {

using internal::CollapseWhitespace;
using internal::Trim;
using nlohmann::json;

struct SurfaceForm {
  std::string_view canonical;
  std::string_view form;  // already normalized
};

// Surface forms a model may use for each canonical label.
constexpr SurfaceForm kSurfaceForms[] = {
    {"hatespeech", "hate speech"},     {"hatespeech", "hatespeech"},
    {"hatespeech", "hateful speech"},  {"offensive", "offensive"},
    {"offensive", "offensive language"}, {"normal", "normal"},
    {"normal", "not offensive"},       {"normal", "non offensive"},
    {"normal", "neither"},             {"entailment", "entailment"},
    {"entailment", "entails"},         {"entailment", "entailed"},
    {"contradiction", "contradiction"}, {"contradiction", "contradicts"},
    {"contradiction", "contradictory"}, {"neutral", "neutral"},
};

// Lower-cased text with every run of non-alphanumeric ASCII replaced by one
// space. `offsets[i]` is the raw byte offset of normalized byte i.
struct Normalized {
  std::string text;
  std::vector<std::size_t> offsets;
};

Normalized Normalize(std::string_view raw) {
  Normalized n;
  bool pending_space = false;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto c = static_cast<unsigned char>(raw[i]);
    if (std::isalnum(c) || c >= 0x80) {
      if (pending_space && !n.text.empty()) {
        n.text.push_back(' ');
        n.offsets.push_back(i);
      }
      pending_space = false;
      n.text.push_back(static_cast<char>(std::tolower(c)));
      n.offsets.push_back(i);
    } else {
      pending_space = true;
    }
  }
  return n;
}

bool InTask(Task task, std::string_view canonical) {
  for (std::string_view l : TaskLabels(task)) {
    if (l == canonical) return true;
  }
  return false;
}

struct LabelMatch {
  std::string canonical;
  std::size_t raw_end = 0;  // byte offset just past the match
};

std::optional<LabelMatch> ExactLabel(std::string_view text, Task task) {
  const Normalized n = Normalize(text);
  for (const auto& sf : kSurfaceForms) {
    if (InTask(task, sf.canonical) && n.text == sf.form) {
      return LabelMatch{std::string(sf.canonical), text.size()};
    }
  }
  return std::nullopt;
}

// Earliest whole-word occurrence of any surface form; longer forms win ties.
std::optional<LabelMatch> SubstringLabel(std::string_view text, Task task) {
  const Normalized n = Normalize(text);
  const std::string padded = " " + n.text + " ";
  std::optional<LabelMatch> best;
  std::size_t best_pos = std::string::npos;
  std::size_t best_len = 0;
  for (const auto& sf : kSurfaceForms) {
    if (!InTask(task, sf.canonical)) continue;
    const std::string needle = " " + std::string(sf.form) + " ";
    const std::size_t pos = padded.find(needle);
    if (pos == std::string::npos) continue;
    if (pos < best_pos || (pos == best_pos && sf.form.size() > best_len)) {
      best_pos = pos;
      best_len = sf.form.size();
      // padded[pos] is the leading space, so the form starts at n.text[pos].
      const std::size_t last = pos + sf.form.size() - 1;
      best = LabelMatch{std::string(sf.canonical), n.offsets[last] + 1};
    }
  }
  return best;
}

std::size_t FindIgnoreCase(std::string_view hay, std::string_view needle,
                           std::size_t from = 0) {
  if (needle.size() > hay.size()) return std::string_view::npos;
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    if (internal::StartsWithIgnoreCase(hay.substr(i), needle)) return i;
  }
  return std::string_view::npos;
}

std::optional<std::string> CleanRationale(std::string_view text) {
  std::string out = CollapseWhitespace(text);
  std::size_t skip = 0;
  while (skip < out.size() &&
         (out[skip] == '*' || out[skip] == ':' || out[skip] == ',' ||
          out[skip] == '.' || out[skip] == ' ' || out[skip] == '-')) {
    ++skip;
  }
  out.erase(0, skip);
  if (out.empty()) return std::nullopt;
  return out;
}

constexpr std::string_view kAnswerMarker = "answer:";
constexpr std::string_view kExplanationMarker = "explanation:";

json OptionalString(const std::optional<std::string>& s) {
  return s ? json(*s) : json(nullptr);
}

std::optional<std::string> ReadOptionalString(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

std::string_view SimilarityKindName(SimilarityKind kind) {
  switch (kind) {
    case SimilarityKind::kToken:
      return "token";
    case SimilarityKind::kPooled:
      return "pooled";
    case SimilarityKind::kNone:
      break;
  }
  return "none";
}

}  // namespace

ParsedResponse ParseResponse(std::string_view raw, Task task) {
  ParsedResponse out;
  // Locate the first answer line.
  std::size_t line_begin = 0;
  std::optional<std::size_t> answer_begin;  // offset of text after the marker
  std::size_t answer_line_end = raw.size();
  while (line_begin <= raw.size()) {
    std::size_t line_end = raw.find('\n', line_begin);
    if (line_end == std::string_view::npos) line_end = raw.size();
    std::size_t p = line_begin;
    while (p < line_end && (internal::IsAsciiSpace(raw[p]) || raw[p] == '*' ||
                            raw[p] == '#')) {
      ++p;
    }
    if (internal::StartsWithIgnoreCase(raw.substr(p, line_end - p), kAnswerMarker)) {
      answer_begin = p + kAnswerMarker.size();
      answer_line_end = line_end;
      break;
    }
    if (line_end == raw.size()) break;
    line_begin = line_end + 1;
  }

  if (answer_begin) {
    std::string_view answer =
        raw.substr(*answer_begin, answer_line_end - *answer_begin);
    const std::size_t inline_expl = FindIgnoreCase(answer, kExplanationMarker);
    if (inline_expl != std::string_view::npos) answer = answer.substr(0, inline_expl);

    const std::size_t marker = FindIgnoreCase(raw, kExplanationMarker, *answer_begin);
    const std::string_view rationale_text =
        marker != std::string_view::npos
            ? raw.substr(marker + kExplanationMarker.size())
            : raw.substr(std::min(answer_line_end + 1, raw.size()));

    if (Normalize(answer).text.empty()) {
      out.failure = "empty answer";
      return out;
    }
    auto match = ExactLabel(answer, task);
    if (!match) match = SubstringLabel(answer, task);
    if (!match) {
      out.failure = "unknown label";
      return out;
    }
    out.label = match->canonical;
    out.rationale = CleanRationale(rationale_text);
    return out;
  }

  const auto match = SubstringLabel(raw, task);
  if (!match) {
    out.failure = "no answer line and no known label";
    return out;
  }
  out.label = match->canonical;
  const std::size_t marker = FindIgnoreCase(raw, kExplanationMarker);
  out.rationale = CleanRationale(
      marker != std::string_view::npos ? raw.substr(marker + kExplanationMarker.size())
                                       : raw.substr(match->raw_end));
  return out;
}

std::string RenderParsed(const ParsedResponse& parsed) {
  std::string out = "Answer: ";
  if (parsed.label) out += DisplayLabel(*parsed.label);
  if (parsed.rationale) out += "\nExplanation: " + *parsed.rationale;
  return out;
}

json RecordToJson(const RationaleRecord& r) {
  json scores = json::object();
  const RecordScores& s = r.scores;
  scores["readability"] =
      s.readability ? json{{"fre", s.readability->fre},
                           {"gfi", s.readability->gfi},
                           {"cli", s.readability->cli}}
                    : json(nullptr);
  scores["tiger_native"] = s.tiger_native ? TigerToJson(*s.tiger_native) : json(nullptr);
  scores["tiger_native_failure"] = s.tiger_native_failure;
  scores["tiger_self"] = s.tiger_self ? TigerToJson(*s.tiger_self) : json(nullptr);
  scores["tiger_self_failure"] = s.tiger_self_failure;
  scores["bertscore"] = s.bertscore ? json{{"precision", s.bertscore->precision},
                                           {"recall", s.bertscore->recall},
                                           {"f1", s.bertscore->f1}}
                                    : json(nullptr);
  scores["pooled_similarity"] =
      s.pooled_similarity ? json(*s.pooled_similarity) : json(nullptr);
  scores["similarity_kind"] = SimilarityKindName(s.similarity_kind);

  return {{"instance_id", r.instance_id},
          {"task", TaskId(r.task)},
          {"level", LevelId(r.level)},
          {"provider", r.provider},
          {"prompt_digest", r.prompt_digest},
          {"source_text", r.source_text},
          {"reference", OptionalString(r.reference)},
          {"raw_completion", r.raw_completion},
          {"parsed",
           {{"label", OptionalString(r.parsed.label)},
            {"rationale", OptionalString(r.parsed.rationale)},
            {"failure", r.parsed.failure}}},
          {"gold",
           {{"label", OptionalString(r.gold.value)},
            {"excluded", r.gold.excluded_reason}}},
          {"scores", scores}};
}

RationaleRecord RecordFromJson(const json& j) {
  RationaleRecord r;
  r.instance_id = j.at("instance_id").get<std::string>();
  const auto task = ParseTask(j.at("task").get<std::string>());
  if (!task) throw ValidationError("record has unknown task");
  r.task = *task;
  const auto level = ParseLevel(j.at("level").get<std::string>());
  if (!level) throw ValidationError("record has unknown level");
  r.level = *level;
  r.provider = j.at("provider").get<std::string>();
  r.prompt_digest = j.value("prompt_digest", std::string());
  r.source_text = j.value("source_text", std::string());
  r.reference = ReadOptionalString(j, "reference");
  r.raw_completion = j.at("raw_completion").get<std::string>();
  const json& p = j.at("parsed");
  r.parsed.label = ReadOptionalString(p, "label");
  r.parsed.rationale = ReadOptionalString(p, "rationale");
  r.parsed.failure = p.value("failure", std::string());
  const json& g = j.at("gold");
  r.gold.value = ReadOptionalString(g, "label");
  r.gold.excluded_reason = g.value("excluded", std::string());

  if (const auto it = j.find("scores"); it != j.end()) {
    const json& s = *it;
    RecordScores& out = r.scores;
    if (s.contains("readability") && !s["readability"].is_null()) {
      out.readability = ReadabilityScores{s["readability"].at("fre").get<double>(),
                                          s["readability"].at("gfi").get<double>(),
                                          s["readability"].at("cli").get<double>()};
    }
    if (s.contains("tiger_native") && !s["tiger_native"].is_null()) {
      out.tiger_native = TigerFromJson(s["tiger_native"]);
    }
    out.tiger_native_failure = s.value("tiger_native_failure", std::string());
    if (s.contains("tiger_self") && !s["tiger_self"].is_null()) {
      out.tiger_self = TigerFromJson(s["tiger_self"]);
    }
    out.tiger_self_failure = s.value("tiger_self_failure", std::string());
    if (s.contains("bertscore") && !s["bertscore"].is_null()) {
      out.bertscore = SimilarityPrf{s["bertscore"].at("precision").get<double>(),
                                    s["bertscore"].at("recall").get<double>(),
                                    s["bertscore"].at("f1").get<double>()};
    }
    if (s.contains("pooled_similarity") && !s["pooled_similarity"].is_null()) {
      out.pooled_similarity = s["pooled_similarity"].get<double>();
    }
    const std::string kind = s.value("similarity_kind", std::string("none"));
    out.similarity_kind = kind == "token"    ? SimilarityKind::kToken
                          : kind == "pooled" ? SimilarityKind::kPooled
                                             : SimilarityKind::kNone;
  }
  return r;
}

void WriteRecords(const std::string& path, std::span<const RationaleRecord> records) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp);
    for (const auto& r : records) out << RecordToJson(r).dump() << "\n";
    if (!out) throw Error("short write to " + tmp);
  }
  std::rename(tmp.c_str(), path.c_str());
}

std::vector<RationaleRecord> ReadRecords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open record file: " + path);
  std::vector<RationaleRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    try {
      out.push_back(RecordFromJson(json::parse(line)));
    } catch (const json::exception& e) {
      throw SchemaError(path, lineno, e.what());
    } catch (const ValidationError& e) {
      throw SchemaError(path, lineno, e.what());
    }
  }
  return out;
}

AccuracyResult Accuracy(std::span<const RationaleRecord> records,
                        AccuracyMode mode) {
  AccuracyResult result;
  for (const auto& r : records) {
    if (r.task != records.front().task) {
      throw ValidationError("accuracy over records of different tasks");
    }
    if (r.gold.excluded()) {
      throw ValidationError("record " + r.instance_id + " has an excluded gold label");
    }
    ++result.total;
    if (!r.parsed.ok()) {
      ++result.parse_failures;
    } else if (*r.parsed.label == *r.gold.value) {
      ++result.correct;
    }
  }
  result.numerator = result.correct;
  result.denominator = mode == AccuracyMode::kRaw
                           ? result.total
                           : result.total - result.parse_failures;
  if (result.denominator > 0) {
    result.value = static_cast<double>(result.numerator) /
                   static_cast<double>(result.denominator);
  }
  return result;
}

}  // namespace rwb
