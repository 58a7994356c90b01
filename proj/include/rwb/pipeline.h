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

// Run configuration and the generate / score stages.
//
// A run is driven by one JSON file:
//
//   {
//     "dataset": "data/sample_hatexplain.jsonl",
//     "task": "hate_speech_multi",
//     "levels": ["college", "high_school", "middle_school", "sixth_grade"],
//     "few_shot": {"path": "data/fewshot/hate_speech_multi.jsonl", "count": 2},
//     "length_phrase": "three sentences",
//     "providers": {"mock": {"kind": "mock"}},
//     "generators": ["mock"],
//     "judge": "mock",
//     "embedder": "mock",
//     "self_eval": true,
//     "run_dir": "runs/demo",
//     "seed": 7
//   }
//
// Relative paths resolve against the directory holding the config file.

#ifndef RWB_PIPELINE_H_
#define RWB_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rwb/gateway.h"
#include "rwb/judges.h"
#include "rwb/parse_eval.h"
#include "rwb/promptgen.h"
#include "rwb/textstat.h"

namespace rwb {

struct RunConfig {
  std::filesystem::path base_dir;
  std::filesystem::path dataset;
  Task task = Task::kHateSpeechMulti;
  std::vector<ReadabilityLevel> levels{kAllLevels.begin(), kAllLevels.end()};
  std::filesystem::path few_shot_path;  // empty means zero-shot
  std::size_t few_shot_count = 2;
  std::string task_description;  // empty selects DefaultTaskDescription
  std::string length_phrase{kDefaultLengthPhrase};

  std::map<std::string, ProviderProfile> providers;
  std::vector<std::string> generators;
  std::string judge;     // empty skips native judging
  std::string embedder;  // empty skips similarity
  bool self_eval = true;

  std::filesystem::path run_dir = "run";
  std::uint64_t seed = 0;
  int concurrency = 4;
  FogVariant fog_variant = FogVariant::kPerSentence;
  Pooling pooling = Pooling::kEndOfSequence;

  int per_cell = 25;
  std::filesystem::path ui_dir;
  std::string host = "127.0.0.1";
  int port = 8080;

  std::filesystem::path RecordsPath() const { return run_dir / "records.jsonl"; }
  std::filesystem::path TasksPath() const { return run_dir / "annotation_tasks.jsonl"; }
  std::filesystem::path AnnotationsPath() const { return run_dir / "annotations.jsonl"; }
  std::filesystem::path ReportDir() const { return run_dir / "report"; }
  std::filesystem::path CacheDir() const { return run_dir / "cache"; }

  const ProviderProfile& Profile(const std::string& name) const;
};

// Throws ConfigError on unknown keys' values (bad task, level, kind...) or
// references to undefined providers.
RunConfig ConfigFromJson(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig LoadConfig(const std::filesystem::path& path);

Gateway::Options GatewayOptionsFor(const RunConfig& config);

struct GenerateStats {
  std::size_t instances = 0;
  std::size_t excluded = 0;  // tied gold labels
  std::size_t references_missing = 0;
  std::size_t records = 0;
};

// Prompts every generator for every instance and level. Output order is
// (generator, instance, level) regardless of concurrency.
std::vector<RationaleRecord> Generate(const RunConfig& config, Gateway& gateway,
                                      GenerateStats* stats = nullptr);

struct ScoreStats {
  std::size_t readability = 0;
  std::size_t readability_failures = 0;
  std::size_t judged_native = 0;
  std::size_t judged_self = 0;
  std::size_t judge_failures = 0;
  std::size_t similarity_token = 0;
  std::size_t similarity_pooled = 0;
};

// Fills readability, error-analysis and similarity scores in place.
void Score(const RunConfig& config, Gateway& gateway,
           std::vector<RationaleRecord>& records, ScoreStats* stats = nullptr);

// The judge request for a parsed record.
JudgeRequest JudgeRequestFor(const RunConfig& config, const RationaleRecord& record);

}  // namespace rwb

#endif  // RWB_PIPELINE_H_
