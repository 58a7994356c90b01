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

// Command-line driver: generate, score, report, sample-annotation, serve,
// agreement and convert.

#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "rwb/corpus.h"
#include "rwb/error.h"
#include "rwb/gateway.h"
#include "rwb/human_eval.h"
#include "rwb/pipeline.h"
#include "rwb/report.h"
#include "rwb/service.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonFlags {
  std::string config;
  std::string run_dir;
  std::string provider;
  std::optional<std::uint64_t> seed;
};

void AddCommon(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("-c,--config", flags.config, "Run configuration file");
  cmd->add_option("-r,--run-dir", flags.run_dir, "Run directory (overrides the config)");
  cmd->add_option("-p,--provider", flags.provider,
                  "Generator profile to use instead of the configured list");
  cmd->add_option("-s,--seed", flags.seed, "Seed (overrides the config)");
}

rwb::RunConfig Resolve(const CommonFlags& flags, bool need_config) {
  rwb::RunConfig config;
  if (!flags.config.empty()) {
    config = rwb::LoadConfig(flags.config);
  } else if (need_config) {
    throw rwb::ConfigError("--config is required");
  } else if (flags.run_dir.empty()) {
    throw rwb::ConfigError("--config or --run-dir is required");
  }
  if (!flags.run_dir.empty()) config.run_dir = flags.run_dir;
  if (!flags.provider.empty()) {
    config.Profile(flags.provider);
    config.generators = {flags.provider};
  }
  if (flags.seed) config.seed = *flags.seed;
  return config;
}

std::vector<rwb::RationaleRecord> ReadRunRecords(const rwb::RunConfig& config) {
  return rwb::ReadRecords(config.RecordsPath().string());
}

int Generate(const CommonFlags& flags) {
  const rwb::RunConfig config = Resolve(flags, true);
  fs::create_directories(config.run_dir);
  rwb::Gateway gateway(rwb::GatewayOptionsFor(config));
  rwb::GenerateStats stats;
  const auto records = rwb::Generate(config, gateway, &stats);
  rwb::WriteRecords(config.RecordsPath().string(), records);
  std::size_t failures = 0;
  for (const auto& r : records) failures += !r.parsed.ok();
  std::cout << "instances " << stats.instances << ", excluded ties " << stats.excluded
            << ", records " << stats.records << ", parse failures " << failures << "\n"
            << "wrote " << config.RecordsPath().string() << "\n";
  return 0;
}

int Score(const CommonFlags& flags) {
  const rwb::RunConfig config = Resolve(flags, true);
  auto records = ReadRunRecords(config);
  rwb::Gateway gateway(rwb::GatewayOptionsFor(config));
  rwb::ScoreStats stats;
  rwb::Score(config, gateway, records, &stats);
  rwb::WriteRecords(config.RecordsPath().string(), records);
  std::cout << "readability " << stats.readability << " (" << stats.readability_failures
            << " failed), native " << stats.judged_native << ", self " << stats.judged_self
            << ", judge failures " << stats.judge_failures << ", token similarity "
            << stats.similarity_token << ", pooled similarity " << stats.similarity_pooled
            << "\n";
  return 0;
}

int Report(const CommonFlags& flags, const std::string& out_dir) {
  const rwb::RunConfig config = Resolve(flags, false);
  const auto records = ReadRunRecords(config);
  const rwb::RunReport report = rwb::Aggregate(records);
  const std::string dir = out_dir.empty() ? config.ReportDir().string() : out_dir;
  rwb::WriteReport(report, dir);
  std::cout << rwb::ReportCsv(report, "accuracy") << "wrote " << dir << "\n";
  return 0;
}

int SampleAnnotation(const CommonFlags& flags, std::optional<int> per_cell) {
  const rwb::RunConfig config = Resolve(flags, false);
  const auto records = ReadRunRecords(config);
  const auto tasks = rwb::SampleTasks(records, per_cell.value_or(config.per_cell), config.seed);
  rwb::WriteTasks(config.TasksPath().string(), tasks);
  std::cout << "sampled " << tasks.size() << " tasks into " << config.TasksPath().string()
            << "\n";
  return 0;
}

volatile std::sig_atomic_t g_stop = 0;

void HandleSignal(int) { g_stop = 1; }

int Serve(const CommonFlags& flags, std::optional<int> port, const std::string& host,
          const std::string& ui_dir) {
  const rwb::RunConfig config = Resolve(flags, false);
  rwb::AnnotationService::Options options;
  options.tasks = rwb::ReadTasks(config.TasksPath().string());
  options.annotation_log = config.AnnotationsPath().string();
  options.static_dir = ui_dir.empty() ? config.ui_dir.string() : ui_dir;
  options.host = host.empty() ? config.host : host;
  options.port = port.value_or(config.port);
  rwb::AnnotationService service(std::move(options));
  std::signal(SIGINT, HandleSignal);
  std::signal(SIGTERM, HandleSignal);
  const int bound = service.Start();
  std::cout << "serving " << config.TasksPath().string() << " on port " << bound << std::endl;
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(200));
  service.Stop();
  return 0;
}

int Agreement(const CommonFlags& flags, const std::string& log_path) {
  const rwb::RunConfig config = Resolve(flags, false);
  const auto tasks = rwb::ReadTasks(config.TasksPath().string());
  const auto log = rwb::ReadAnnotationLog(log_path.empty() ? config.AnnotationsPath().string()
                                                           : log_path);
  const rwb::AgreementReport report = rwb::PerceptionReport(log, tasks);
  const json j = rwb::AgreementReportToJson(report);
  const fs::path out = config.run_dir / "agreement.json";
  std::ofstream(out) << j.dump(2) << "\n";
  std::cout << j.dump(2) << "\n";
  return 0;
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, '\t')) fields.push_back(field);
  if (!line.empty() && line.back() == '\t') fields.emplace_back();
  return fields;
}

int Convert(const std::string& from, const std::string& input, const std::string& output,
            const std::string& split) {
  std::ifstream in(input);
  if (!in) throw rwb::ConfigError("cannot open " + input);
  std::ofstream out(output, std::ios::binary | std::ios::trunc);
  if (!out) throw rwb::ConfigError("cannot write " + output);
  std::size_t written = 0;
  const auto emit = [&](const rwb::Instance& inst) {
    out << rwb::InstanceToJson(inst).dump() << "\n";
    ++written;
  };
  if (from == "hatexplain") {
    const json dataset = json::parse(in);
    for (const auto& [id, post] : dataset.items()) emit(rwb::convert::FromHateXplain(post, split));
  } else if (from == "cad") {
    std::string line;
    std::getline(in, line);
    const auto header = SplitTabs(line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto values = SplitTabs(line);
      std::vector<std::pair<std::string, std::string>> row;
      for (std::size_t i = 0; i < header.size() && i < values.size(); ++i) {
        row.emplace_back(header[i], values[i]);
      }
      emit(rwb::convert::FromCad(row));
    }
  } else if (from == "spanex") {
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      emit(rwb::convert::FromSpanEx(json::parse(line)));
    }
  } else {
    throw rwb::ConfigError("unknown source format: " + from);
  }
  std::cout << "wrote " << written << " records to " << output << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Readability-controlled rationale generation and evaluation"};
  app.require_subcommand(1);
  CommonFlags flags;

  auto* generate = app.add_subcommand("generate", "Prompt generators for every level");
  AddCommon(generate, flags);
  auto* score = app.add_subcommand("score", "Readability, judge and similarity scores");
  AddCommon(score, flags);

  std::string report_out;
  auto* report = app.add_subcommand("report", "Aggregate scored records into tables");
  AddCommon(report, flags);
  report->add_option("-o,--out", report_out, "Output directory (default run/report)");

  std::optional<int> per_cell;
  auto* sample = app.add_subcommand("sample-annotation", "Draw blinded annotation tasks");
  AddCommon(sample, flags);
  sample->add_option("--per-cell", per_cell, "Tasks per (provider, level) cell");

  std::optional<int> port;
  std::string host, ui_dir;
  auto* serve = app.add_subcommand("serve", "Serve the annotation API and UI bundle");
  AddCommon(serve, flags);
  serve->add_option("--port", port, "Port (0 picks a free one)");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--ui-dir", ui_dir, "Static UI bundle directory");

  std::string log_path;
  auto* agreement = app.add_subcommand("agreement", "Agreement report from an annotation log");
  AddCommon(agreement, flags);
  agreement->add_option("--annotations", log_path, "Annotation log (default run dir)");

  std::string from, input, output, split = "test";
  auto* convert = app.add_subcommand("convert", "Convert a source dataset to JSONL");
  convert->add_option("--from", from, "hatexplain, cad or spanex")->required();
  convert->add_option("-i,--input", input, "Source file")->required();
  convert->add_option("-o,--output", output, "Normalized JSONL output")->required();
  convert->add_option("--split", split, "Split assigned to HateXplain posts");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*generate) return Generate(flags);
    if (*score) return Score(flags);
    if (*report) return Report(flags, report_out);
    if (*sample) return SampleAnnotation(flags, per_cell);
    if (*serve) return Serve(flags, port, host, ui_dir);
    if (*agreement) return Agreement(flags, log_path);
    if (*convert) return Convert(from, input, output, split);
  } catch (const rwb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
