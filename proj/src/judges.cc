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

#include "rwb/judges.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "rwb/error.h"
#include "strings.h"

namespace rwb {
namespace {

using internal::Trim;
using nlohmann::json;

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  while (true) {
    const std::size_t bar = line.find('|');
    fields.push_back(Trim(line.substr(0, bar)));
    if (bar == std::string_view::npos) break;
    line = line.substr(bar + 1);
  }
  return fields;
}

std::string_view StripBullet(std::string_view s) {
  s = Trim(s);
  if (!s.empty() && (s.front() == '-' || s.front() == '*')) {
    s.remove_prefix(1);
  } else {
    std::size_t digits = 0;
    while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits]))) {
      ++digits;
    }
    if (digits > 0 && digits < s.size() && (s[digits] == '.' || s[digits] == ')')) {
      s.remove_prefix(digits + 1);
    }
  }
  return Trim(s);
}

std::optional<double> ParseNumber(std::string_view field) {
  const std::string s(Trim(field));
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || !std::isfinite(v)) return std::nullopt;
  return v;
}

void Normalize(std::vector<double>& v) {
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0) throw ValidationError("zero-norm embedding vector");
  for (double& x : v) x /= norm;
}

}  // namespace

std::string_view AspectName(Aspect aspect) {
  switch (aspect) {
    case Aspect::kFactuality:
      return "factuality";
    case Aspect::kRelevance:
      return "relevance";
    case Aspect::kFluency:
      return "fluency";
    case Aspect::kCoherence:
      return "coherence";
    case Aspect::kCompleteness:
      return "completeness";
    case Aspect::kOther:
      return "other";
  }
  return "other";
}

std::optional<Aspect> ParseAspect(std::string_view text) {
  const std::string lowered = internal::ToLower(Trim(text));
  for (Aspect a : kAllAspects) {
    if (lowered == AspectName(a)) return a;
  }
  return std::nullopt;
}

std::string_view JudgeKindName(JudgeKind kind) {
  return kind == JudgeKind::kSelf ? "self" : "native";
}

json TigerToJson(const TigerEvaluation& eval) {
  json errors = json::array();
  for (const auto& e : eval.errors) {
    errors.push_back({{"location", e.location},
                      {"aspect", AspectName(e.aspect)},
                      {"explanation", e.explanation},
                      {"reduction", e.reduction}});
  }
  json j = {{"judge", JudgeKindName(eval.judge)},
            {"score", eval.instance_score},
            {"errors", errors}};
  if (!eval.warnings.empty()) j["warnings"] = eval.warnings;
  return j;
}

TigerEvaluation TigerFromJson(const json& j) {
  TigerEvaluation eval;
  eval.judge = j.value("judge", std::string("native")) == "self"
                   ? JudgeKind::kSelf
                   : JudgeKind::kNative;
  eval.instance_score = j.at("score").get<double>();
  for (const auto& e : j.at("errors")) {
    eval.errors.push_back(
        {e.at("location").get<std::string>(),
         ParseAspect(e.at("aspect").get<std::string>()).value_or(Aspect::kOther),
         e.at("explanation").get<std::string>(), e.at("reduction").get<double>()});
  }
  if (j.contains("warnings")) {
    eval.warnings = j.at("warnings").get<std::vector<std::string>>();
  }
  return eval;
}

std::string RenderJudgePrompt(const JudgeRequest& request) {
  if (Trim(request.instruction).empty() || Trim(request.source_context).empty() ||
      Trim(request.system_output).empty()) {
    throw ValidationError("judge request needs instruction, source and output");
  }
  std::string prompt =
      "You are evaluating the output of a text generation system by error "
      "analysis.\n\n";
  prompt += "Instruction: " + std::string(Trim(request.instruction)) + "\n\n";
  prompt += "Source context: " + std::string(Trim(request.source_context)) + "\n\n";
  prompt += "System output: " + std::string(Trim(request.system_output)) + "\n\n";
  prompt += "List every error in the system output, one per line, using the format:\n";
  prompt += std::string(kJudgeLineFormat) + "\n";
  prompt += "The aspect must be one of: ";
  for (std::size_t i = 0; i < kAllAspects.size(); ++i) {
    if (i > 0) prompt += ", ";
    prompt += AspectName(kAllAspects[i]);
  }
  prompt += ".\nThe reduction is a number from -5 (severe) to -0.5 (minor).\n";
  prompt += "If the system output has no errors, reply with the single line: ";
  prompt += kNoErrorsSentinel;
  prompt += "\n";
  return prompt;
}

TigerEvaluation ParseJudgeOutput(std::string_view completion, JudgeKind kind) {
  TigerEvaluation eval;
  eval.judge = kind;
  bool sentinel = false;
  for (std::string_view raw : internal::SplitLines(completion)) {
    const std::string_view line = Trim(raw);
    if (line.empty()) continue;
    if (internal::StartsWithIgnoreCase(line, "no error")) {
      sentinel = true;
      continue;
    }
    if (line.find('|') == std::string_view::npos) continue;
    const auto fields = SplitFields(line);
    if (fields.size() < 4) {
      eval.warnings.push_back("skipped line with too few fields: " +
                              std::string(line));
      continue;
    }
    const auto reduction = ParseNumber(fields.back());
    if (!reduction) {
      eval.warnings.push_back("skipped line without numeric reduction: " +
                              std::string(line));
      continue;
    }
    ErrorRecord err;
    err.location = std::string(StripBullet(fields[0]));
    if (const auto aspect = ParseAspect(fields[1])) {
      err.aspect = *aspect;
    } else {
      err.aspect = Aspect::kOther;
      eval.warnings.push_back("unknown aspect \"" + std::string(fields[1]) +
                              "\" mapped to other");
    }
    for (std::size_t i = 2; i + 1 < fields.size(); ++i) {
      if (i > 2) err.explanation += " | ";
      err.explanation += fields[i];
    }
    err.reduction = std::clamp(*reduction, kMinReduction, kMaxReduction);
    if (err.reduction != *reduction) {
      eval.warnings.push_back("reduction " + std::string(Trim(fields.back())) +
                              " clamped to " + std::to_string(err.reduction));
    }
    eval.errors.push_back(std::move(err));
  }
  if (eval.errors.empty() && !sentinel) {
    throw JudgeParseFailure("judge output has no error lines and no sentinel");
  }
  for (const auto& e : eval.errors) eval.instance_score += e.reduction;
  return eval;
}

TigerEvaluation JudgeRationale(Gateway& gateway, const ProviderProfile& profile,
                               const JudgeRequest& request, JudgeKind kind) {
  const std::string completion = gateway.Chat(profile, RenderJudgePrompt(request));
  return ParseJudgeOutput(completion, kind);
}

TigerAggregate AggregateTiger(std::span<const double> scores) {
  if (scores.empty()) throw ValidationError("no scores to aggregate");
  TigerAggregate agg;
  const double total = std::accumulate(scores.begin(), scores.end(), 0.0);
  agg.full_batch = total / static_cast<double>(scores.size());
  agg.below_zero_count = static_cast<std::size_t>(
      std::count_if(scores.begin(), scores.end(), [](double s) { return s < 0; }));
  if (agg.below_zero_count > 0) {
    agg.nonzero_score = total / static_cast<double>(agg.below_zero_count);
  }
  return agg;
}

TigerAggregate AggregateTiger(std::span<const TigerEvaluation> evals) {
  std::vector<double> scores;
  scores.reserve(evals.size());
  for (const auto& e : evals) scores.push_back(e.instance_score);
  return AggregateTiger(std::span<const double>(scores));
}

SimilarityPrf BertScore(const VectorList& candidate, const VectorList& reference) {
  if (candidate.empty() || reference.empty()) {
    throw ValidationError("similarity needs non-empty token sequences");
  }
  const std::size_t dim = candidate.front().size();
  VectorList cand = candidate;
  VectorList ref = reference;
  for (auto* side : {&cand, &ref}) {
    for (auto& v : *side) {
      if (v.size() != dim) throw ValidationError("embedding dimension mismatch");
      Normalize(v);
    }
  }
  std::vector<double> best_for_cand(cand.size(), 0.0);
  std::vector<double> best_for_ref(ref.size(), 0.0);
  for (std::size_t i = 0; i < cand.size(); ++i) {
    for (std::size_t j = 0; j < ref.size(); ++j) {
      double sim = 0;
      for (std::size_t k = 0; k < dim; ++k) sim += cand[i][k] * ref[j][k];
      sim = std::clamp(sim, 0.0, 1.0);
      best_for_cand[i] = std::max(best_for_cand[i], sim);
      best_for_ref[j] = std::max(best_for_ref[j], sim);
    }
  }
  SimilarityPrf prf;
  prf.precision = std::accumulate(best_for_cand.begin(), best_for_cand.end(), 0.0) /
                  static_cast<double>(cand.size());
  prf.recall = std::accumulate(best_for_ref.begin(), best_for_ref.end(), 0.0) /
               static_cast<double>(ref.size());
  const double denom = prf.precision + prf.recall;
  prf.f1 = denom > 0 ? 2 * prf.precision * prf.recall / denom : 0.0;
  return prf;
}

std::optional<Pooling> ParsePooling(std::string_view text) {
  if (text == "eos" || text == "end_of_sequence") return Pooling::kEndOfSequence;
  if (text == "mean") return Pooling::kMean;
  return std::nullopt;
}

std::vector<double> Pool(const VectorList& tokens, Pooling pooling) {
  if (tokens.empty()) throw ValidationError("no token vectors to pool");
  if (pooling == Pooling::kEndOfSequence) return tokens.back();
  std::vector<double> mean(tokens.front().size(), 0.0);
  for (const auto& t : tokens) {
    if (t.size() != mean.size()) throw ValidationError("embedding dimension mismatch");
    for (std::size_t k = 0; k < t.size(); ++k) mean[k] += t[k];
  }
  for (double& x : mean) x /= static_cast<double>(tokens.size());
  return mean;
}

double PooledSimilarity(std::span<const double> candidate,
                        std::span<const double> reference) {
  if (candidate.size() != reference.size() || candidate.empty()) {
    throw ValidationError("embedding dimension mismatch");
  }
  double dot = 0, nc = 0, nr = 0;
  for (std::size_t k = 0; k < candidate.size(); ++k) {
    dot += candidate[k] * reference[k];
    nc += candidate[k] * candidate[k];
    nr += reference[k] * reference[k];
  }
  if (nc == 0 || nr == 0) throw ValidationError("zero-norm embedding vector");
  return std::clamp(dot / (std::sqrt(nc) * std::sqrt(nr)), -1.0, 1.0);
}

}  // namespace rwb
