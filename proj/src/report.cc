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

#include "rwb/report.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <tuple>

#include "rwb/error.h"

namespace rwb {
namespace {

using nlohmann::json;

constexpr std::string_view kTables[] = {"accuracy",   "readability",    "tiger",
                                        "similarity", "adjacent_pairs", "differentiation"};

// Adjacent pairs as (more readable, less readable), least readable first.
constexpr std::pair<ReadabilityLevel, ReadabilityLevel> kAdjacent[] = {
    {ReadabilityLevel::kHighSchool, ReadabilityLevel::kCollege},
    {ReadabilityLevel::kMiddleSchool, ReadabilityLevel::kHighSchool},
    {ReadabilityLevel::kSixthGrade, ReadabilityLevel::kMiddleSchool},
};

std::string PairName(ReadabilityLevel more, ReadabilityLevel less) {
  return std::string(LevelId(more)) + ">" + std::string(LevelId(less));
}

Metric MeanOf(double sum, std::size_t n, const char* reason) {
  if (n == 0) return {std::nullopt, reason};
  return {sum / static_cast<double>(n), {}};
}

TigerCell SummarizeTiger(const std::vector<double>& scores, std::size_t failures) {
  TigerCell cell;
  cell.evaluated = scores.size();
  cell.failures = failures;
  if (scores.empty()) {
    cell.full_batch.reason = "no judged rationale";
    cell.nonzero_score.reason = "no judged rationale";
    return cell;
  }
  const TigerAggregate agg = AggregateTiger(std::span<const double>(scores));
  cell.full_batch.value = agg.full_batch;
  cell.below_zero_count = agg.below_zero_count;
  cell.nonzero_score.value = agg.nonzero_score;
  if (!agg.nonzero_score) cell.nonzero_score.reason = "no rationale scored below zero";
  return cell;
}

ReportCell BuildCell(const std::vector<const RationaleRecord*>& members) {
  ReportCell cell;
  cell.task = members.front()->task;
  cell.provider = members.front()->provider;
  cell.level = members.front()->level;
  cell.records = members.size();

  std::vector<RationaleRecord> gold_records;
  double fre = 0, gfi = 0, cli = 0;
  std::vector<double> native, self;
  double bp = 0, br = 0, bf = 0, pooled = 0;
  std::size_t token_n = 0, pooled_n = 0;
  for (const RationaleRecord* r : members) {
    if (!r->parsed.ok()) ++cell.parse_failures;
    if (r->gold.excluded()) {
      ++cell.excluded_gold;
    } else {
      gold_records.push_back(*r);
    }
    const RecordScores& s = r->scores;
    if (r->has_rationale() && s.readability) {
      ++cell.readability_n;
      fre += s.readability->fre;
      gfi += s.readability->gfi;
      cli += s.readability->cli;
    }
    if (s.tiger_native) native.push_back(s.tiger_native->instance_score);
    if (!s.tiger_native_failure.empty()) ++cell.tiger_native.failures;
    if (s.tiger_self) self.push_back(s.tiger_self->instance_score);
    if (!s.tiger_self_failure.empty()) ++cell.tiger_self.failures;
    if (s.bertscore) {
      ++token_n;
      bp += s.bertscore->precision;
      br += s.bertscore->recall;
      bf += s.bertscore->f1;
    }
    if (s.pooled_similarity) {
      ++pooled_n;
      pooled += *s.pooled_similarity;
    }
  }

  if (gold_records.empty()) {
    cell.accuracy_raw.reason = "no record has a gold label";
    cell.accuracy_processed.reason = "no record has a gold label";
  } else {
    const AccuracyResult raw = Accuracy(gold_records, AccuracyMode::kRaw);
    const AccuracyResult processed = Accuracy(gold_records, AccuracyMode::kProcessed);
    cell.correct = raw.correct;
    cell.accuracy_raw.value = raw.value;
    cell.accuracy_processed.value = processed.value;
    if (!processed.value) cell.accuracy_processed.reason = "every record failed to parse";
  }

  cell.fre = MeanOf(fre, cell.readability_n, "no scored rationale");
  cell.gfi = MeanOf(gfi, cell.readability_n, "no scored rationale");
  cell.cli = MeanOf(cli, cell.readability_n, "no scored rationale");

  const std::size_t native_failures = cell.tiger_native.failures;
  const std::size_t self_failures = cell.tiger_self.failures;
  cell.tiger_native = SummarizeTiger(native, native_failures);
  cell.tiger_self = SummarizeTiger(self, self_failures);

  cell.bertscore_precision = MeanOf(bp, token_n, "no token-level similarity");
  cell.bertscore_recall = MeanOf(br, token_n, "no token-level similarity");
  cell.bertscore_f1 = MeanOf(bf, token_n, "no token-level similarity");
  cell.pooled_similarity = MeanOf(pooled, pooled_n, "no pooled similarity");
  std::size_t token_kind = 0, pooled_kind = 0;
  for (const RationaleRecord* r : members) {
    token_kind += r->scores.similarity_kind == SimilarityKind::kToken;
    pooled_kind += r->scores.similarity_kind == SimilarityKind::kPooled;
  }
  cell.similarity_n = token_kind + pooled_kind;
  cell.similarity_kind = token_kind && pooled_kind ? "mixed"
                         : token_kind              ? "token"
                         : pooled_kind             ? "pooled"
                                                   : "none";
  return cell;
}

json MetricJson(const Metric& m) { return m.value ? json(*m.value) : json(nullptr); }

// Collects the reasons of undefined metrics under their field names.
void NoteUndefined(json& undefined, const char* name, const Metric& m) {
  if (!m.value) undefined[name] = m.reason;
}

json TigerJson(const TigerCell& t) {
  return {{"evaluated", t.evaluated},
          {"failures", t.failures},
          {"full_batch", MetricJson(t.full_batch)},
          {"below_zero_count", t.below_zero_count},
          {"nonzero_score", MetricJson(t.nonzero_score)}};
}

std::string Num(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

std::string Num(const Metric& m) { return Num(m.value); }

std::string Field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string Row(std::initializer_list<std::string> fields) {
  std::string out;
  bool first = true;
  for (const auto& f : fields) {
    if (!first) out += ',';
    first = false;
    out += f;
  }
  return out + "\n";
}

std::string Prefix(const ReportCell& c) {
  return std::string(TaskId(c.task)) + "," + Field(c.provider) + "," +
         std::string(LevelId(c.level));
}

}  // namespace

std::vector<AdjacentPair> AdjacentPairs(std::span<const RationaleRecord> records,
                                        std::size_t* skipped) {
  using Key = std::tuple<int, std::string, std::string>;
  std::map<Key, std::map<int, std::optional<double>>> by_instance;
  for (const auto& r : records) {
    auto& slots = by_instance[{static_cast<int>(r.task), r.provider, r.instance_id}];
    std::optional<double> fre;
    if (r.has_rationale() && r.scores.readability) fre = r.scores.readability->fre;
    slots.try_emplace(static_cast<int>(r.level), fre);
  }
  std::vector<AdjacentPair> pairs;
  std::size_t missing = 0;
  for (const auto& [key, slots] : by_instance) {
    for (const auto& [more, less] : kAdjacent) {
      const auto hi = slots.find(static_cast<int>(more));
      const auto lo = slots.find(static_cast<int>(less));
      if (hi == slots.end() && lo == slots.end()) continue;
      if (hi == slots.end() || lo == slots.end() || !hi->second || !lo->second) {
        ++missing;
        continue;
      }
      AdjacentPair p;
      p.task = static_cast<Task>(std::get<0>(key));
      p.provider = std::get<1>(key);
      p.instance_id = std::get<2>(key);
      p.more_readable = more;
      p.less_readable = less;
      p.x = *hi->second;
      p.y = *lo->second;
      pairs.push_back(std::move(p));
    }
  }
  if (skipped) *skipped = missing;
  return pairs;
}

std::optional<double> DifferentiationRate(std::span<const std::pair<double, double>> pairs) {
  if (pairs.empty()) return std::nullopt;
  std::size_t wins = 0;
  for (const auto& [x, y] : pairs) wins += x > y;
  return static_cast<double>(wins) / static_cast<double>(pairs.size());
}

std::optional<double> DifferentiationRate(std::span<const AdjacentPair> pairs) {
  std::vector<std::pair<double, double>> xy;
  xy.reserve(pairs.size());
  for (const auto& p : pairs) xy.emplace_back(p.x, p.y);
  return DifferentiationRate(std::span<const std::pair<double, double>>(xy));
}

RunReport Aggregate(std::span<const RationaleRecord> records) {
  if (records.empty()) throw ValidationError("no records to aggregate");
  RunReport report;
  report.total_records = records.size();

  std::map<std::tuple<int, std::string, int>, std::vector<const RationaleRecord*>> groups;
  for (const auto& r : records) {
    groups[{static_cast<int>(r.task), r.provider, static_cast<int>(r.level)}].push_back(&r);
  }
  for (const auto& [key, members] : groups) report.cells.push_back(BuildCell(members));

  report.pairs = AdjacentPairs(records, &report.skipped_pairs);
  std::map<std::pair<int, std::string>, std::vector<AdjacentPair>> by_provider;
  for (const auto& p : report.pairs) {
    by_provider[{static_cast<int>(p.task), p.provider}].push_back(p);
  }
  for (const auto& [key, pairs] : by_provider) {
    DifferentiationRow all{static_cast<Task>(key.first), key.second, "all", pairs.size(),
                           DifferentiationRate(std::span<const AdjacentPair>(pairs))};
    report.differentiation.push_back(all);
    for (const auto& [more, less] : kAdjacent) {
      std::vector<AdjacentPair> subset;
      for (const auto& p : pairs) {
        if (p.more_readable == more && p.less_readable == less) subset.push_back(p);
      }
      report.differentiation.push_back(
          {static_cast<Task>(key.first), key.second, PairName(more, less), subset.size(),
           DifferentiationRate(std::span<const AdjacentPair>(subset))});
    }
  }
  return report;
}

json ReportToJson(const RunReport& report) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    json undefined = json::object();
    NoteUndefined(undefined, "accuracy_raw", c.accuracy_raw);
    NoteUndefined(undefined, "accuracy_processed", c.accuracy_processed);
    NoteUndefined(undefined, "fre", c.fre);
    NoteUndefined(undefined, "gfi", c.gfi);
    NoteUndefined(undefined, "cli", c.cli);
    NoteUndefined(undefined, "tiger_native", c.tiger_native.full_batch);
    NoteUndefined(undefined, "tiger_native_nonzero", c.tiger_native.nonzero_score);
    NoteUndefined(undefined, "tiger_self", c.tiger_self.full_batch);
    NoteUndefined(undefined, "tiger_self_nonzero", c.tiger_self.nonzero_score);
    NoteUndefined(undefined, "bertscore", c.bertscore_f1);
    NoteUndefined(undefined, "pooled_similarity", c.pooled_similarity);
    cells.push_back({{"task", TaskId(c.task)},
                     {"provider", c.provider},
                     {"level", LevelId(c.level)},
                     {"records", c.records},
                     {"parse_failures", c.parse_failures},
                     {"excluded_gold", c.excluded_gold},
                     {"correct", c.correct},
                     {"accuracy_raw", MetricJson(c.accuracy_raw)},
                     {"accuracy_processed", MetricJson(c.accuracy_processed)},
                     {"readability_n", c.readability_n},
                     {"fre", MetricJson(c.fre)},
                     {"gfi", MetricJson(c.gfi)},
                     {"cli", MetricJson(c.cli)},
                     {"tiger_native", TigerJson(c.tiger_native)},
                     {"tiger_self", TigerJson(c.tiger_self)},
                     {"similarity_kind", c.similarity_kind},
                     {"similarity_n", c.similarity_n},
                     {"bertscore_precision", MetricJson(c.bertscore_precision)},
                     {"bertscore_recall", MetricJson(c.bertscore_recall)},
                     {"bertscore_f1", MetricJson(c.bertscore_f1)},
                     {"pooled_similarity", MetricJson(c.pooled_similarity)},
                     {"undefined", undefined}});
  }
  json pairs = json::array();
  for (const auto& p : report.pairs) {
    pairs.push_back({{"task", TaskId(p.task)},
                     {"provider", p.provider},
                     {"instance_id", p.instance_id},
                     {"more_readable", LevelId(p.more_readable)},
                     {"less_readable", LevelId(p.less_readable)},
                     {"x", p.x},
                     {"y", p.y}});
  }
  json diff = json::array();
  for (const auto& d : report.differentiation) {
    diff.push_back({{"task", TaskId(d.task)},
                    {"provider", d.provider},
                    {"pair", d.pair},
                    {"pairs", d.pairs},
                    {"rate", d.rate ? json(*d.rate) : json(nullptr)}});
  }
  return {{"total_records", report.total_records},
          {"cells", cells},
          {"adjacent_pairs", pairs},
          {"skipped_pairs", report.skipped_pairs},
          {"differentiation", diff}};
}

std::string ReportCsv(const RunReport& report, std::string_view table) {
  std::string out;
  if (table == "accuracy") {
    out = "task,provider,level,records,parse_failures,excluded_gold,correct,"
          "raw_accuracy,processed_accuracy\n";
    for (const auto& c : report.cells) {
      out += Row({Prefix(c), std::to_string(c.records), std::to_string(c.parse_failures),
                  std::to_string(c.excluded_gold), std::to_string(c.correct),
                  Num(c.accuracy_raw), Num(c.accuracy_processed)});
    }
  } else if (table == "readability") {
    out = "task,provider,level,n,fre,gfi,cli\n";
    for (const auto& c : report.cells) {
      out += Row({Prefix(c), std::to_string(c.readability_n), Num(c.fre), Num(c.gfi),
                  Num(c.cli)});
    }
  } else if (table == "tiger") {
    out = "task,provider,level,judge,evaluated,failures,full_batch,below_zero_count,"
          "nonzero_score\n";
    for (const auto& c : report.cells) {
      for (const auto& [name, t] :
           {std::pair<const char*, const TigerCell*>{"native", &c.tiger_native},
            {"self", &c.tiger_self}}) {
        out += Row({Prefix(c), name, std::to_string(t->evaluated),
                    std::to_string(t->failures), Num(t->full_batch),
                    std::to_string(t->below_zero_count), Num(t->nonzero_score)});
      }
    }
  } else if (table == "similarity") {
    out = "task,provider,level,kind,n,bertscore_precision,bertscore_recall,"
          "bertscore_f1,pooled_similarity\n";
    for (const auto& c : report.cells) {
      out += Row({Prefix(c), c.similarity_kind, std::to_string(c.similarity_n),
                  Num(c.bertscore_precision), Num(c.bertscore_recall),
                  Num(c.bertscore_f1), Num(c.pooled_similarity)});
    }
  } else if (table == "adjacent_pairs") {
    out = "task,provider,instance_id,more_readable,less_readable,fre_more_readable,"
          "fre_less_readable\n";
    for (const auto& p : report.pairs) {
      out += Row({std::string(TaskId(p.task)), Field(p.provider), Field(p.instance_id),
                  std::string(LevelId(p.more_readable)),
                  std::string(LevelId(p.less_readable)), Num(p.x), Num(p.y)});
    }
  } else if (table == "differentiation") {
    out = "task,provider,pair,pairs,rate\n";
    for (const auto& d : report.differentiation) {
      out += Row({std::string(TaskId(d.task)), Field(d.provider), d.pair,
                  std::to_string(d.pairs), Num(d.rate)});
    }
  } else {
    throw ValidationError("unknown report table: " + std::string(table));
  }
  return out;
}

void WriteReport(const RunReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto write = [&dir](const std::string& name, const std::string& content) {
    const std::filesystem::path path = std::filesystem::path(dir) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
  };
  write("summary.json", ReportToJson(report).dump(2) + "\n");
  for (std::string_view table : kTables) {
    write(std::string(table) + ".csv", ReportCsv(report, table));
  }
}

}  // namespace rwb
