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

// Python bindings. Structured values cross the boundary as JSON text so the
// Python side can use plain dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rwb/corpus.h"
#include "rwb/error.h"
#include "rwb/gateway.h"
#include "rwb/human_eval.h"
#include "rwb/judges.h"
#include "rwb/parse_eval.h"
#include "rwb/pipeline.h"
#include "rwb/promptgen.h"
#include "rwb/report.h"
#include "rwb/textstat.h"

namespace py = pybind11;
using nlohmann::json;

namespace {

rwb::Task TaskOrThrow(const std::string& id) {
  const auto task = rwb::ParseTask(id);
  if (!task) throw rwb::ValidationError("unknown task: " + id);
  return *task;
}

rwb::ReadabilityLevel LevelOrThrow(const std::string& id) {
  const auto level = rwb::ParseLevel(id);
  if (!level) throw rwb::ValidationError("unknown level: " + id);
  return *level;
}

py::object Optional(const std::optional<double>& v) {
  return v ? py::object(py::float_(*v)) : py::object(py::none());
}

}  // namespace

PYBIND11_MODULE(_rwb, m) {
  m.doc() = "Readability-controlled rationale workbench";

  // Translators run newest first, so the base class goes first.
  py::register_exception<rwb::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<rwb::ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<rwb::EmptyTextError>(m, "EmptyTextError", PyExc_ValueError);
  py::register_exception<rwb::JudgeParseFailure>(m, "JudgeParseFailure", PyExc_ValueError);

  py::class_<rwb::TextStats>(m, "TextStats")
      .def(py::init<>())
      .def(py::init([](std::int64_t w, std::int64_t s, std::int64_t syl, std::int64_t lw,
                       std::int64_t letters) {
             return rwb::TextStats{w, s, syl, lw, letters};
           }),
           py::arg("total_words"), py::arg("total_sentences"), py::arg("total_syllables"),
           py::arg("long_words") = 0, py::arg("total_letters") = 0)
      .def_readwrite("total_words", &rwb::TextStats::total_words)
      .def_readwrite("total_sentences", &rwb::TextStats::total_sentences)
      .def_readwrite("total_syllables", &rwb::TextStats::total_syllables)
      .def_readwrite("long_words", &rwb::TextStats::long_words)
      .def_readwrite("total_letters", &rwb::TextStats::total_letters)
      .def("__eq__", [](const rwb::TextStats& a, const rwb::TextStats& b) { return a == b; })
      .def("__repr__", [](const rwb::TextStats& s) {
        return "TextStats(words=" + std::to_string(s.total_words) +
               ", sentences=" + std::to_string(s.total_sentences) +
               ", syllables=" + std::to_string(s.total_syllables) + ")";
      });

  m.def("segment", [](const std::string& text) { return rwb::Segment(text); });
  m.def("count_syllables", [](const std::string& w) { return rwb::CountSyllables(w); });
  m.def("fre", &rwb::FleschReadingEase);
  m.def(
      "gfi",
      [](const rwb::TextStats& s, bool classical) {
        return rwb::GunningFog(s, classical ? rwb::FogVariant::kClassical
                                            : rwb::FogVariant::kPerSentence);
      },
      py::arg("stats"), py::arg("classical") = false);
  m.def("cli_index", &rwb::ColemanLiau);
  m.def("level_from_fre",
        [](double score) { return std::string(rwb::LevelId(rwb::LevelFromFre(score))); });
  m.def("score_readability", [](const std::string& text) {
    const auto s = rwb::ScoreReadability(text);
    return py::dict(py::arg("fre") = s.fre, py::arg("gfi") = s.gfi, py::arg("cli") = s.cli);
  });

  m.def("parse_response", [](const std::string& raw, const std::string& task) {
    const auto p = rwb::ParseResponse(raw, TaskOrThrow(task));
    py::dict d;
    d["label"] = p.label ? py::object(py::str(*p.label)) : py::object(py::none());
    d["rationale"] = p.rationale ? py::object(py::str(*p.rationale)) : py::object(py::none());
    d["failure"] = p.failure;
    return d;
  });

  m.def("build_prompt",
        [](const std::string& task, const std::string& instance_text, const std::string& level) {
          rwb::PromptSpec spec;
          spec.task = TaskOrThrow(task);
          spec.task_description = rwb::DefaultTaskDescription(spec.task);
          spec.instance_rendering = "Text: " + instance_text;
          spec.level = LevelOrThrow(level);
          return rwb::BuildPrompt(spec);
        });
  m.def("mock_complete", [](const std::string& prompt) { return rwb::mock::Complete(prompt); });

  m.def("aggregate_tiger", [](const std::vector<double>& scores) {
    const auto agg = rwb::AggregateTiger(std::span<const double>(scores));
    return py::make_tuple(agg.full_batch, agg.below_zero_count, Optional(agg.nonzero_score));
  });
  m.def("parse_judge_output", [](const std::string& text) {
    return rwb::TigerToJson(rwb::ParseJudgeOutput(text, rwb::JudgeKind::kNative)).dump();
  });
  m.def("bertscore", [](const rwb::VectorList& cand, const rwb::VectorList& ref) {
    const auto prf = rwb::BertScore(cand, ref);
    return py::make_tuple(prf.precision, prf.recall, prf.f1);
  });
  m.def("pooled_similarity", [](const std::vector<double>& a, const std::vector<double>& b) {
    return rwb::PooledSimilarity(a, b);
  });

  m.def("fleiss_kappa", [](const std::vector<std::vector<int>>& counts) {
    return Optional(rwb::FleissKappa(counts));
  });
  m.def("krippendorff_alpha",
        [](const std::vector<std::tuple<std::string, std::string, std::string>>& triples) {
          std::vector<rwb::Rating> ratings;
          for (const auto& [item, rater, value] : triples) ratings.push_back({item, rater, value});
          return Optional(rwb::KrippendorffAlpha(ratings));
        });

  m.def("differentiation_rate", [](const std::vector<std::pair<double, double>>& pairs) {
    return Optional(rwb::DifferentiationRate(std::span<const std::pair<double, double>>(pairs)));
  });

  m.def("sha256_hex", [](const std::string& data) { return rwb::Sha256Hex(data); });

  // Runs generate + score + report for a config file with the mock or live
  // providers; returns the summary as JSON text.
  m.def("run_pipeline", [](const std::string& config_path) {
    const rwb::RunConfig config = rwb::LoadConfig(config_path);
    py::gil_scoped_release release;
    rwb::Gateway gateway(rwb::GatewayOptionsFor(config));
    auto records = rwb::Generate(config, gateway);
    rwb::Score(config, gateway, records);
    return rwb::ReportToJson(rwb::Aggregate(records)).dump();
  });
}
