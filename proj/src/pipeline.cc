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

#include "rwb/pipeline.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

#include "rwb/corpus.h"
#include "rwb/error.h"

namespace rwb {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path Resolve(const fs::path& base, const std::string& value) {
  if (value.empty()) return {};
  const fs::path p(value);
  return (p.is_absolute() ? p : base / p).lexically_normal();
}

// Runs fn(i) for i in [0, n) on up to `workers` threads. The first
// exception stops further work and is rethrown.
void ParallelFor(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t threads =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  const auto body = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  if (threads <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

std::string TaskDescription(const RunConfig& config) {
  return config.task_description.empty() ? DefaultTaskDescription(config.task)
                                         : config.task_description;
}

}  // namespace

const ProviderProfile& RunConfig::Profile(const std::string& name) const {
  const auto it = providers.find(name);
  if (it == providers.end()) throw ConfigError("unknown provider: " + name);
  return it->second;
}

RunConfig ConfigFromJson(const json& j, const fs::path& base_dir) {
  RunConfig c;
  c.base_dir = base_dir;
  try {
    c.dataset = Resolve(base_dir, j.value("dataset", std::string()));
    const auto task = ParseTask(j.value("task", std::string("hate_speech_multi")));
    if (!task) throw ConfigError("unknown task: " + j.value("task", std::string()));
    c.task = *task;
    if (j.contains("levels")) {
      c.levels.clear();
      for (const auto& l : j.at("levels")) {
        const auto level = ParseLevel(l.get<std::string>());
        if (!level) throw ConfigError("unknown level: " + l.get<std::string>());
        c.levels.push_back(*level);
      }
      if (c.levels.empty()) throw ConfigError("levels must not be empty");
    }
    if (j.contains("few_shot")) {
      const json& fs_cfg = j.at("few_shot");
      c.few_shot_path = Resolve(base_dir, fs_cfg.value("path", std::string()));
      c.few_shot_count = fs_cfg.value("count", std::size_t{2});
    }
    c.task_description = j.value("task_description", std::string());
    c.length_phrase = j.value("length_phrase", std::string(kDefaultLengthPhrase));
    if (j.contains("providers")) {
      for (const auto& [name, profile] : j.at("providers").items()) {
        c.providers.emplace(name, ProfileFromJson(name, profile));
      }
    }
    if (j.contains("generators")) {
      c.generators = j.at("generators").get<std::vector<std::string>>();
    } else if (j.contains("generator")) {
      c.generators = {j.at("generator").get<std::string>()};
    }
    c.judge = j.value("judge", std::string());
    c.embedder = j.value("embedder", std::string());
    c.self_eval = j.value("self_eval", true);
    c.run_dir = Resolve(base_dir, j.value("run_dir", std::string("run")));
    c.seed = j.value("seed", std::uint64_t{0});
    c.concurrency = j.value("concurrency", 4);
    const std::string fog = j.value("gfi_variant", std::string("per_sentence"));
    if (fog == "per_sentence") {
      c.fog_variant = FogVariant::kPerSentence;
    } else if (fog == "classical") {
      c.fog_variant = FogVariant::kClassical;
    } else {
      throw ConfigError("unknown gfi_variant: " + fog);
    }
    const auto pooling = ParsePooling(j.value("pooling", std::string("eos")));
    if (!pooling) throw ConfigError("unknown pooling: " + j.value("pooling", std::string()));
    c.pooling = *pooling;
    if (j.contains("annotation")) {
      const json& a = j.at("annotation");
      c.per_cell = a.value("per_cell", 25);
      c.ui_dir = Resolve(base_dir, a.value("ui_dir", std::string()));
      c.host = a.value("host", std::string("127.0.0.1"));
      c.port = a.value("port", 8080);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  for (const auto& g : c.generators) c.Profile(g);
  if (!c.judge.empty()) c.Profile(c.judge);
  if (!c.embedder.empty()) c.Profile(c.embedder);
  if (c.concurrency < 1) throw ConfigError("concurrency must be at least 1");
  return c;
}

RunConfig LoadConfig(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return ConfigFromJson(j, fs::absolute(path).parent_path());
}

Gateway::Options GatewayOptionsFor(const RunConfig& config) {
  Gateway::Options options;
  options.cache_dir = config.CacheDir();
  options.max_in_flight = config.concurrency;
  return options;
}

std::vector<RationaleRecord> Generate(const RunConfig& config, Gateway& gateway,
                                      GenerateStats* stats) {
  if (config.generators.empty()) throw ConfigError("no generator configured");
  const std::vector<Instance> instances = LoadInstances(config.dataset.string(), config.task);
  std::vector<FewShotSample> shots;
  if (!config.few_shot_path.empty()) {
    shots = LoadFewShot(config.few_shot_path.string(), config.task, config.few_shot_count);
  }

  GenerateStats local;
  local.instances = instances.size();
  struct Prepared {
    const Instance* instance;
    GoldLabel gold;
    std::optional<std::string> reference;
  };
  std::vector<Prepared> usable;
  for (const auto& inst : instances) {
    GoldLabel gold = DeriveGold(inst);
    if (gold.excluded()) {
      ++local.excluded;
      continue;
    }
    std::optional<std::string> reference;
    try {
      reference = BuildReference(inst, gold);
    } catch (const ReferenceUnavailableError&) {
      ++local.references_missing;
    }
    usable.push_back({&inst, std::move(gold), std::move(reference)});
  }

  std::vector<RationaleRecord> records;
  std::vector<std::string> prompts;
  for (const auto& name : config.generators) {
    const ProviderProfile& profile = config.Profile(name);
    for (const auto& u : usable) {
      for (ReadabilityLevel level : config.levels) {
        PromptSpec spec;
        spec.task = config.task;
        spec.task_description = TaskDescription(config);
        spec.few_shot_samples = shots;
        spec.instance_rendering = RenderInstance(*u.instance);
        spec.level = level;
        spec.length_phrase = config.length_phrase;
        RationaleRecord r;
        r.instance_id = u.instance->id;
        r.task = config.task;
        r.level = level;
        r.provider = profile.name;
        r.source_text = InstanceDisplayText(*u.instance);
        r.reference = u.reference;
        r.gold = u.gold;
        prompts.push_back(BuildPrompt(spec));
        r.prompt_digest = Sha256Hex(prompts.back());
        records.push_back(std::move(r));
      }
    }
  }

  ParallelFor(records.size(), config.concurrency, [&](std::size_t i) {
    RationaleRecord& r = records[i];
    r.raw_completion = gateway.Chat(config.Profile(r.provider), prompts[i]);
    r.parsed = ParseResponse(r.raw_completion, r.task);
  });
  local.records = records.size();
  if (stats) *stats = local;
  return records;
}

JudgeRequest JudgeRequestFor(const RunConfig& config, const RationaleRecord& record) {
  JudgeRequest request;
  request.instruction = TaskDescription(config) + " " +
                        ReadabilityInstruction(config.length_phrase, record.level) + ".";
  request.source_context = record.source_text;
  if (record.parsed.label) {
    request.source_context +=
        "\nPredicted label: " + std::string(DisplayLabel(*record.parsed.label));
  }
  request.system_output = record.parsed.rationale.value_or("");
  return request;
}

void Score(const RunConfig& config, Gateway& gateway, std::vector<RationaleRecord>& records,
           ScoreStats* stats) {
  std::mutex stats_mu;
  ScoreStats local;
  const auto bump = [&](std::size_t ScoreStats::*field) {
    std::lock_guard<std::mutex> lock(stats_mu);
    ++(local.*field);
  };

  ParallelFor(records.size(), config.concurrency, [&](std::size_t i) {
    RationaleRecord& r = records[i];
    r.scores = RecordScores{};
    if (!r.has_rationale()) return;
    const std::string& rationale = *r.parsed.rationale;

    try {
      r.scores.readability = ScoreReadability(rationale, config.fog_variant);
      bump(&ScoreStats::readability);
    } catch (const EmptyTextError&) {
      bump(&ScoreStats::readability_failures);
    } catch (const DegenerateStatsError&) {
      bump(&ScoreStats::readability_failures);
    }

    const JudgeRequest request = JudgeRequestFor(config, r);
    if (!config.judge.empty()) {
      try {
        r.scores.tiger_native =
            JudgeRationale(gateway, config.Profile(config.judge), request, JudgeKind::kNative);
        bump(&ScoreStats::judged_native);
      } catch (const JudgeParseFailure& e) {
        r.scores.tiger_native_failure = e.what();
        bump(&ScoreStats::judge_failures);
      }
    }
    if (config.self_eval) {
      try {
        r.scores.tiger_self =
            JudgeRationale(gateway, config.Profile(r.provider), request, JudgeKind::kSelf);
        bump(&ScoreStats::judged_self);
      } catch (const JudgeParseFailure& e) {
        r.scores.tiger_self_failure = e.what();
        bump(&ScoreStats::judge_failures);
      }
    }

    if (config.embedder.empty() || !r.reference) return;
    const std::vector<Embedding> emb =
        gateway.Embed(config.Profile(config.embedder), {rationale, *r.reference});
    try {
      if (!emb[0].tokens.empty() && !emb[1].tokens.empty()) {
        r.scores.bertscore = BertScore(emb[0].tokens, emb[1].tokens);
        r.scores.pooled_similarity = PooledSimilarity(Pool(emb[0].tokens, config.pooling),
                                                      Pool(emb[1].tokens, config.pooling));
        r.scores.similarity_kind = SimilarityKind::kToken;
        bump(&ScoreStats::similarity_token);
      } else {
        r.scores.pooled_similarity = PooledSimilarity(emb[0].pooled, emb[1].pooled);
        r.scores.similarity_kind = SimilarityKind::kPooled;
        bump(&ScoreStats::similarity_pooled);
      }
    } catch (const ValidationError&) {
      // Degenerate vectors leave the record without a similarity score.
      r.scores.bertscore.reset();
      r.scores.pooled_similarity.reset();
      r.scores.similarity_kind = SimilarityKind::kNone;
    }
  });
  if (stats) *stats = local;
}

}  // namespace rwb
