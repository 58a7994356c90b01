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

#include "rwb/human_eval.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "rwb/error.h"
#include "strings.h"

namespace rwb {
namespace {

using nlohmann::json;

// Portable Fisher-Yates: the engine's output sequence is fixed by the
// standard, and the index draw avoids implementation-defined distributions.
template <typename T>
void Shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(items[i - 1], items[j]);
  }
}

std::string TaskIdFor(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "t%04zu", index + 1);
  return buf;
}

int ReadLikert(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer()) {
    throw ValidationError(std::string("annotation needs integer field ") + key);
  }
  const int v = it->get<int>();
  if (v < 1 || v > 4) {
    throw ValidationError(std::string(key) + " must be between 1 and 4");
  }
  return v;
}

std::string ReadRequiredString(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string() || internal::Trim(it->get<std::string>()).empty()) {
    throw ValidationError(std::string("annotation needs non-empty string field ") + key);
  }
  return it->get<std::string>();
}

std::optional<double> Mean(double sum, std::size_t n) {
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

json OptionalNumber(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

// Builds the count matrix from the items holding the modal number of
// ratings (ties prefer more raters) and returns kappa over it.
AspectAgreement Agreement(std::string aspect, std::span<const Rating> ratings) {
  AspectAgreement out;
  out.aspect = std::move(aspect);
  out.krippendorff_alpha = KrippendorffAlpha(ratings);

  std::map<std::string, std::map<std::string, int>> per_item;
  std::set<std::string> categories;
  for (const auto& r : ratings) {
    ++per_item[r.item][r.value];
    categories.insert(r.value);
  }
  std::map<int, std::size_t> by_count;
  for (const auto& [item, counts] : per_item) {
    int n = 0;
    for (const auto& [value, c] : counts) n += c;
    if (n >= 2) ++by_count[n];
  }
  if (by_count.empty()) return out;
  int modal = 0;
  std::size_t modal_items = 0;
  for (const auto& [n, items] : by_count) {
    if (items >= modal_items) {
      modal = n;
      modal_items = items;
    }
  }
  std::vector<std::vector<int>> matrix;
  for (const auto& [item, counts] : per_item) {
    int n = 0;
    for (const auto& [value, c] : counts) n += c;
    if (n != modal) continue;
    std::vector<int> row;
    for (const auto& cat : categories) {
      const auto it = counts.find(cat);
      row.push_back(it == counts.end() ? 0 : it->second);
    }
    matrix.push_back(std::move(row));
  }
  out.kappa_items = matrix.size();
  out.kappa_raters = static_cast<std::size_t>(modal);
  out.fleiss_kappa = FleissKappa(matrix);
  return out;
}

std::int64_t NowMs() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

json TaskToPublicJson(const AnnotationTask& task) {
  return {{"task_id", task.task_id},
          {"display_text", task.display_text},
          {"predicted_label", task.predicted_label},
          {"rationale", task.rationale}};
}

json TaskToJson(const AnnotationTask& task) {
  json j = TaskToPublicJson(task);
  j["level"] = LevelId(task.level);
  j["provider"] = task.provider;
  j["instance_id"] = task.instance_id;
  return j;
}

AnnotationTask TaskFromJson(const json& j) {
  AnnotationTask t;
  t.task_id = j.at("task_id").get<std::string>();
  t.display_text = j.at("display_text").get<std::string>();
  t.predicted_label = j.at("predicted_label").get<std::string>();
  t.rationale = j.at("rationale").get<std::string>();
  const auto level = ParseLevel(j.at("level").get<std::string>());
  if (!level) throw ValidationError("task has unknown level");
  t.level = *level;
  t.provider = j.at("provider").get<std::string>();
  t.instance_id = j.value("instance_id", std::string());
  return t;
}

void WriteTasks(const std::string& path, std::span<const AnnotationTask> tasks) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  for (const auto& t : tasks) out << TaskToJson(t).dump() << "\n";
}

std::vector<AnnotationTask> ReadTasks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open task file: " + path);
  std::vector<AnnotationTask> tasks;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (internal::Trim(line).empty()) continue;
    try {
      tasks.push_back(TaskFromJson(json::parse(line)));
    } catch (const json::exception& e) {
      throw SchemaError(path, lineno, e.what());
    } catch (const ValidationError& e) {
      throw SchemaError(path, lineno, e.what());
    }
  }
  return tasks;
}

std::vector<AnnotationTask> SampleTasks(std::span<const RationaleRecord> records,
                                        int per_cell, std::uint64_t seed) {
  if (per_cell < 1) throw ValidationError("per_cell must be at least 1");
  // (provider, level) -> eligible records. Every provider/level pair seen in
  // the input is a cell, even when none of its records parsed.
  std::map<std::pair<std::string, int>, std::vector<const RationaleRecord*>> cells;
  std::set<std::string> providers;
  std::set<int> levels;
  for (const auto& r : records) {
    providers.insert(r.provider);
    levels.insert(static_cast<int>(r.level));
  }
  for (const auto& p : providers) {
    for (int level : levels) cells[{p, level}];
  }
  for (const auto& r : records) {
    if (!r.has_rationale()) continue;
    cells[{r.provider, static_cast<int>(r.level)}].push_back(&r);
  }

  std::mt19937_64 rng(seed);
  std::vector<const RationaleRecord*> picked;
  for (auto& [key, members] : cells) {
    if (members.size() < static_cast<std::size_t>(per_cell)) {
      throw SamplingError("cell (" + key.first + ", " +
                          std::string(LevelId(static_cast<ReadabilityLevel>(key.second))) +
                          ") has " + std::to_string(members.size()) +
                          " usable records, need " + std::to_string(per_cell));
    }
    std::stable_sort(members.begin(), members.end(),
                     [](const RationaleRecord* a, const RationaleRecord* b) {
                       return a->instance_id < b->instance_id;
                     });
    Shuffle(members, rng);
    picked.insert(picked.end(), members.begin(), members.begin() + per_cell);
  }
  Shuffle(picked, rng);

  std::vector<AnnotationTask> tasks;
  tasks.reserve(picked.size());
  for (std::size_t i = 0; i < picked.size(); ++i) {
    const RationaleRecord& r = *picked[i];
    AnnotationTask t;
    t.task_id = TaskIdFor(i);
    t.display_text = r.source_text;
    t.predicted_label = std::string(DisplayLabel(*r.parsed.label));
    t.rationale = *r.parsed.rationale;
    t.level = r.level;
    t.provider = r.provider;
    t.instance_id = r.instance_id;
    tasks.push_back(std::move(t));
  }
  return tasks;
}

json AnnotationToJson(const Annotation& a) {
  return {{"task_id", a.task_id},
          {"annotator_id", a.annotator_id},
          {"perceived_level", LevelId(a.perceived_level)},
          {"coherence", a.coherence},
          {"informativeness", a.informativeness},
          {"agrees_with_label", a.agrees_with_label},
          {"timestamp", a.timestamp_ms}};
}

Annotation AnnotationFromJson(const json& j) {
  if (!j.is_object()) throw ValidationError("annotation must be an object");
  Annotation a;
  a.task_id = ReadRequiredString(j, "task_id");
  a.annotator_id = ReadRequiredString(j, "annotator_id");
  const auto level = ParseLevel(ReadRequiredString(j, "perceived_level"));
  if (!level) throw ValidationError("perceived_level is not a known level");
  a.perceived_level = *level;
  a.coherence = ReadLikert(j, "coherence");
  a.informativeness = ReadLikert(j, "informativeness");
  const auto agrees = j.find("agrees_with_label");
  if (agrees == j.end() || !agrees->is_boolean()) {
    throw ValidationError("annotation needs boolean field agrees_with_label");
  }
  a.agrees_with_label = agrees->get<bool>();
  if (const auto ts = j.find("timestamp"); ts != j.end() && ts->is_number_integer()) {
    a.timestamp_ms = ts->get<std::int64_t>();
  }
  return a;
}

std::vector<Annotation> ResolveLatest(std::span<const Annotation> log) {
  std::map<std::pair<std::string, std::string>, Annotation> latest;
  for (const auto& a : log) {
    auto [it, inserted] = latest.try_emplace({a.task_id, a.annotator_id}, a);
    if (!inserted && a.timestamp_ms >= it->second.timestamp_ms) it->second = a;
  }
  std::vector<Annotation> out;
  out.reserve(latest.size());
  for (auto& [key, a] : latest) out.push_back(std::move(a));
  return out;
}

std::vector<Annotation> ReadAnnotationLog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open annotation log: " + path);
  std::vector<Annotation> log;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (internal::Trim(line).empty()) continue;
    try {
      log.push_back(AnnotationFromJson(json::parse(line)));
    } catch (const json::exception& e) {
      throw SchemaError(path, lineno, e.what());
    } catch (const ValidationError& e) {
      throw SchemaError(path, lineno, e.what());
    }
  }
  return log;
}

std::string_view BinarizeLikert(int value) { return value <= 2 ? "low" : "high"; }

std::string_view BinarizeLevel(ReadabilityLevel level) {
  return level == ReadabilityLevel::kCollege || level == ReadabilityLevel::kHighSchool
             ? "hard"
             : "easy";
}

std::optional<double> FleissKappa(const std::vector<std::vector<int>>& counts) {
  if (counts.empty() || counts.front().empty()) {
    throw ValidationError("kappa needs a non-empty count matrix");
  }
  const std::size_t k = counts.front().size();
  long n = -1;
  for (const auto& row : counts) {
    if (row.size() != k) throw ValidationError("ragged count matrix");
    long sum = 0;
    for (int c : row) {
      if (c < 0) throw ValidationError("negative count");
      sum += c;
    }
    if (n < 0) n = sum;
    if (sum != n) throw ValidationError("every item needs the same number of ratings");
  }
  if (n < 2) throw ValidationError("kappa needs at least two ratings per item");

  const double items = static_cast<double>(counts.size());
  const double nd = static_cast<double>(n);
  std::vector<double> column(k, 0.0);
  double p_bar = 0;
  for (const auto& row : counts) {
    double sq = 0;
    for (std::size_t j = 0; j < k; ++j) {
      column[j] += row[j];
      sq += static_cast<double>(row[j]) * row[j];
    }
    p_bar += (sq - nd) / (nd * (nd - 1));
  }
  p_bar /= items;
  double p_e = 0;
  for (double c : column) {
    const double p = c / (items * nd);
    p_e += p * p;
  }
  if (p_e >= 1.0) return std::nullopt;
  return (p_bar - p_e) / (1 - p_e);
}

std::optional<double> KrippendorffAlpha(std::span<const Rating> ratings) {
  std::map<std::string, std::map<std::string, int>> units;
  for (const auto& r : ratings) ++units[r.item][r.value];

  std::map<std::pair<std::string, std::string>, double> o;
  std::size_t pairable = 0;
  for (const auto& [item, counts] : units) {
    int m = 0;
    for (const auto& [v, c] : counts) m += c;
    if (m < 2) continue;
    ++pairable;
    for (const auto& [c, nc] : counts) {
      for (const auto& [k, nk] : counts) {
        const double pairs = c == k ? static_cast<double>(nc) * (nc - 1)
                                    : static_cast<double>(nc) * nk;
        o[{c, k}] += pairs / (m - 1);
      }
    }
  }
  if (pairable < 2) return std::nullopt;

  std::map<std::string, double> marginal;
  double n = 0;
  double observed = 0;
  for (const auto& [ck, value] : o) {
    marginal[ck.first] += value;
    n += value;
    if (ck.first != ck.second) observed += value;
  }
  double expected = 0;
  for (const auto& [c, nc] : marginal) {
    for (const auto& [k, nk] : marginal) {
      if (c != k) expected += nc * nk;
    }
  }
  if (expected == 0) return std::nullopt;
  return 1.0 - (n - 1) * observed / expected;
}

AgreementReport PerceptionReport(std::span<const Annotation> annotations,
                                 std::span<const AnnotationTask> tasks) {
  std::map<std::string, const AnnotationTask*> by_id;
  for (const auto& t : tasks) by_id[t.task_id] = &t;
  const std::vector<Annotation> resolved = ResolveLatest(annotations);

  AgreementReport report;
  report.annotations = resolved.size();
  std::set<std::string> annotators;

  struct Acc {
    std::size_t n = 0;
    double coherence = 0, informativeness = 0, level_hits = 0, agrees = 0;
  };
  std::map<std::pair<std::string, int>, Acc> cells;
  Acc total;
  std::vector<Rating> readability, coherence, informativeness, label, pooled;
  for (const auto& a : resolved) {
    const auto it = by_id.find(a.task_id);
    if (it == by_id.end()) {
      throw ValidationError("annotation references unknown task " + a.task_id);
    }
    const AnnotationTask& t = *it->second;
    annotators.insert(a.annotator_id);
    for (Acc* acc : {&cells[{t.provider, static_cast<int>(t.level)}], &total}) {
      ++acc->n;
      acc->coherence += a.coherence;
      acc->informativeness += a.informativeness;
      acc->level_hits += a.perceived_level == t.level ? 1 : 0;
      acc->agrees += a.agrees_with_label ? 1 : 0;
    }
    const std::string lvl(BinarizeLevel(a.perceived_level));
    const std::string coh(BinarizeLikert(a.coherence));
    const std::string inf(BinarizeLikert(a.informativeness));
    const std::string agr = a.agrees_with_label ? "agree" : "disagree";
    readability.push_back({a.task_id, a.annotator_id, lvl});
    coherence.push_back({a.task_id, a.annotator_id, coh});
    informativeness.push_back({a.task_id, a.annotator_id, inf});
    label.push_back({a.task_id, a.annotator_id, agr});
    pooled.push_back({a.task_id + "/readability", a.annotator_id, "readability:" + lvl});
    pooled.push_back({a.task_id + "/coherence", a.annotator_id, "coherence:" + coh});
    pooled.push_back(
        {a.task_id + "/informativeness", a.annotator_id, "informativeness:" + inf});
    pooled.push_back({a.task_id + "/label", a.annotator_id, "label:" + agr});
  }
  report.annotators = annotators.size();

  report.aspects.push_back(Agreement("readability", readability));
  report.aspects.push_back(Agreement("coherence", coherence));
  report.aspects.push_back(Agreement("informativeness", informativeness));
  report.aspects.push_back(Agreement("label", label));
  const AspectAgreement all = Agreement("pooled", pooled);
  report.krippendorff_alpha = all.krippendorff_alpha;
  report.fleiss_kappa = all.fleiss_kappa;

  report.perceived_level_accuracy = Mean(total.level_hits, total.n);
  report.label_agreement_rate = Mean(total.agrees, total.n);
  report.mean_coherence = Mean(total.coherence, total.n);
  report.mean_informativeness = Mean(total.informativeness, total.n);
  for (const auto& [key, acc] : cells) {
    PerceptionCell cell;
    cell.provider = key.first;
    cell.level = static_cast<ReadabilityLevel>(key.second);
    cell.annotations = acc.n;
    const double n = static_cast<double>(acc.n);
    cell.mean_coherence = acc.coherence / n;
    cell.mean_informativeness = acc.informativeness / n;
    cell.perceived_level_accuracy = acc.level_hits / n;
    cell.label_agreement_rate = acc.agrees / n;
    report.cells.push_back(cell);
  }
  return report;
}

json AgreementReportToJson(const AgreementReport& report) {
  json aspects = json::array();
  for (const auto& a : report.aspects) {
    aspects.push_back({{"aspect", a.aspect},
                       {"krippendorff_alpha", OptionalNumber(a.krippendorff_alpha)},
                       {"fleiss_kappa", OptionalNumber(a.fleiss_kappa)},
                       {"kappa_items", a.kappa_items},
                       {"kappa_raters", a.kappa_raters}});
  }
  json cells = json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"provider", c.provider},
                     {"level", LevelId(c.level)},
                     {"annotations", c.annotations},
                     {"mean_coherence", c.mean_coherence},
                     {"mean_informativeness", c.mean_informativeness},
                     {"perceived_level_accuracy", c.perceived_level_accuracy},
                     {"label_agreement_rate", c.label_agreement_rate}});
  }
  return {{"annotations", report.annotations},
          {"annotators", report.annotators},
          {"krippendorff_alpha", OptionalNumber(report.krippendorff_alpha)},
          {"fleiss_kappa", OptionalNumber(report.fleiss_kappa)},
          {"perceived_level_accuracy", OptionalNumber(report.perceived_level_accuracy)},
          {"label_agreement_rate", OptionalNumber(report.label_agreement_rate)},
          {"mean_coherence", OptionalNumber(report.mean_coherence)},
          {"mean_informativeness", OptionalNumber(report.mean_informativeness)},
          {"aspects", aspects},
          {"cells", cells}};
}

json Guidelines() {
  json levels = json::array();
  const std::pair<ReadabilityLevel, const char*> descriptions[] = {
      {ReadabilityLevel::kCollege,
       "Long sentences with technical or abstract vocabulary. Suited to "
       "readers with university education."},
      {ReadabilityLevel::kHighSchool,
       "Fairly long sentences with some less common words. Suited to older "
       "teenagers."},
      {ReadabilityLevel::kMiddleSchool,
       "Plain sentences of moderate length with everyday words. Suited to "
       "readers around twelve to fourteen."},
      {ReadabilityLevel::kSixthGrade,
       "Short sentences with short, common words. Easy for a child around "
       "eleven to follow."},
  };
  for (const auto& [level, text] : descriptions) {
    levels.push_back({{"id", LevelId(level)},
                      {"name", LevelPhrase(level)},
                      {"target_fre", TargetFre(level)},
                      {"description", text}});
  }
  return {
      {"question", "Pick the audience the rationale is written for."},
      {"levels", levels},
      {"likert",
       {{"coherence",
         {{"question", "Is the reasoning in the rationale sound?"},
          {"anchors",
           {{{"value", 4}, {"text", "very reasonable"}},
            {{"value", 3}, {"text", "reasonable"}},
            {{"value", 2}, {"text", "unreasonable"}},
            {{"value", 1}, {"text", "very unreasonable"}}}}}},
        {"informativeness",
         {{"question", "Does the rationale give enough information to support the label?"},
          {"anchors",
           {{{"value", 4}, {"text", "very sufficient"}},
            {{"value", 3}, {"text", "sufficient"}},
            {{"value", 2}, {"text", "insufficient"}},
            {{"value", 1}, {"text", "very insufficient"}}}}}}}},
      {"label_agreement",
       {{"question", "Do you agree with the predicted label?"},
        {"options", {"agree", "disagree"}}}},
      {"labels",
       {{{"label", "hate speech"},
         {"definition", "Attacks or dehumanizes people because of a protected "
                        "attribute such as religion, ethnicity or gender."},
         {"example", "People of that religion are vermin and should be driven out."}},
        {{"label", "offensive"},
         {"definition", "Insulting, rude or abusive without targeting a "
                        "protected group as such."},
         {"example", "You are a pathetic idiot and nobody wants you here."}},
        {{"label", "normal"},
         {"definition", "Neither hateful nor offensive."},
         {"example", "The match was delayed by rain but the crowd stayed."}},
        {{"label", "entailment"},
         {"definition", "The premise makes the hypothesis true."},
         {"example", "Premise: A dog runs on the beach. Hypothesis: An animal is outside."}},
        {{"label", "contradiction"},
         {"definition", "The premise makes the hypothesis false."},
         {"example", "Premise: A man sleeps on a couch. Hypothesis: The man is running."}},
        {{"label", "neutral"},
         {"definition", "The premise neither supports nor rules out the hypothesis."},
         {"example", "Premise: A woman reads a book. Hypothesis: The book is a novel."}}}}};
}

AnnotationStore::AnnotationStore(std::string path)
    : path_(std::move(path)), snapshot_(std::make_shared<const Snapshot>()) {
  if (!std::filesystem::exists(path_)) return;
  auto snap = std::make_shared<Snapshot>();
  const std::vector<Annotation> log = ReadAnnotationLog(path_);
  for (const auto& a : log) {
    last_timestamp_ = std::max(last_timestamp_, a.timestamp_ms);
  }
  for (auto& a : ResolveLatest(log)) {
    snap->latest[{a.task_id, a.annotator_id}] = std::move(a);
  }
  snap->log_entries = log.size();
  snapshot_ = std::move(snap);
}

Annotation AnnotationStore::Submit(Annotation annotation) {
  // Round-trip through the validator so programmatic callers get the same
  // checks as HTTP clients.
  annotation = AnnotationFromJson(AnnotationToJson(annotation));
  std::lock_guard<std::mutex> lock(writer_mu_);
  annotation.timestamp_ms = std::max(NowMs(), last_timestamp_ + 1);
  {
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    if (!out) throw Error("cannot append to " + path_);
    out << AnnotationToJson(annotation).dump() << "\n";
    out.flush();
    if (!out) throw Error("short write to " + path_);
  }
  last_timestamp_ = annotation.timestamp_ms;

  auto next = std::make_shared<Snapshot>(*std::atomic_load(&snapshot_));
  next->latest[{annotation.task_id, annotation.annotator_id}] = annotation;
  ++next->log_entries;
  std::atomic_store(&snapshot_, std::shared_ptr<const Snapshot>(std::move(next)));
  return annotation;
}

std::shared_ptr<const AnnotationStore::Snapshot> AnnotationStore::snapshot() const {
  return std::atomic_load(&snapshot_);
}

}  // namespace rwb
