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
#include <random>
#include <set>
#include <string>

#include <doctest.h>

#include "rwb/error.h"
#include "test_support.h"

namespace rwb {
namespace {

using nlohmann::json;

Instance Multi(std::vector<std::string> labels, std::vector<std::string> targets = {}) {
  Instance inst;
  inst.id = "x";
  inst.task = Task::kHateSpeechMulti;
  inst.text = "some text";
  inst.annotator_labels = std::move(labels);
  inst.explanation.targets = std::move(targets);
  return inst;
}

TEST_CASE("loads the shipped samples") {
  const auto multi =
      LoadInstances(testing::Fixture("hate_multi_8.jsonl"), Task::kHateSpeechMulti);
  CHECK(multi.size() == 8);
  CHECK(multi[0].id == "hm-01");
  CHECK(LoadInstances(testing::DataFile("samples/hate_speech_binary.jsonl"),
                      Task::kHateSpeechBinary)
            .size() == 4);
  const auto nli = LoadInstances(testing::DataFile("samples/nli.jsonl"), Task::kNli);
  REQUIRE(nli.size() == 3);
  CHECK(nli[0].explanation.relations.size() == 1);
}

TEST_CASE("schema errors carry the line number") {
  testing::TempDir dir;
  const std::string path = dir.Write(
      "bad.jsonl",
      "{\"id\":\"a\",\"task\":\"hate_speech_multi\",\"text\":\"hi\",\"annotator_labels\":[\"normal\"]}\n"
      "{\"id\":\"b\",\"task\":\"hate_speech_multi\",\"annotator_labels\":[\"normal\"]}\n");
  try {
    LoadInstances(path, Task::kHateSpeechMulti);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("text") != std::string::npos);
  }
  const std::string wrong_task = dir.Write(
      "task.jsonl",
      "{\"id\":\"a\",\"task\":\"nli\",\"premise\":\"p\",\"hypothesis\":\"h\",\"annotator_labels\":[\"neutral\"]}\n");
  CHECK_THROWS_AS(LoadInstances(wrong_task, Task::kHateSpeechMulti), SchemaError);
  const std::string bad_label = dir.Write(
      "label.jsonl",
      "{\"id\":\"a\",\"task\":\"hate_speech_multi\",\"text\":\"t\",\"annotator_labels\":[\"rude\"]}\n");
  CHECK_THROWS_AS(LoadInstances(bad_label, Task::kHateSpeechMulti), SchemaError);
}

TEST_CASE("non-test splits are skipped") {
  testing::TempDir dir;
  const std::string path = dir.Write(
      "split.jsonl",
      "{\"id\":\"a\",\"task\":\"hate_speech_multi\",\"text\":\"t\",\"annotator_labels\":[\"normal\"],\"split\":\"train\"}\n"
      "\n"
      "{\"id\":\"b\",\"task\":\"hate_speech_multi\",\"text\":\"t\",\"annotator_labels\":[\"normal\"]}\n");
  const auto out = LoadInstances(path, Task::kHateSpeechMulti);
  REQUIRE(out.size() == 1);
  CHECK(out[0].id == "b");
}

TEST_CASE("instance json round trip") {
  for (const auto& inst :
       LoadInstances(testing::DataFile("samples/nli.jsonl"), Task::kNli)) {
    const Instance back = InstanceFromJson(InstanceToJson(inst));
    CHECK(InstanceToJson(back) == InstanceToJson(inst));
  }
}

TEST_CASE("gold by majority vote") {
  CHECK(DeriveGold(Multi({"hatespeech", "hatespeech", "offensive"})) ==
        GoldLabel::Of("hatespeech"));
  CHECK(DeriveGold(Multi({"normal", "offensive", "hatespeech"})) == GoldLabel::Excluded("tie"));
  CHECK(DeriveGold(Multi({"normal", "normal", "offensive", "offensive"})).excluded());
  CHECK(DeriveGold(Multi({"normal"})) == GoldLabel::Of("normal"));
  CHECK_THROWS_AS(DeriveGold(Multi({})), MissingLabelsError);
}

TEST_CASE("binary gold collapses abuse categories") {
  Instance inst;
  inst.task = Task::kHateSpeechBinary;
  inst.annotator_labels = {"person directed abuse"};
  CHECK(DeriveGold(inst) == GoldLabel::Of("offensive"));
  inst.annotator_labels = {"neutral"};
  CHECK(DeriveGold(inst) == GoldLabel::Of("normal"));
  CHECK(CollapseBinaryLabel("PersonDirectedAbuse") == "offensive");
  CHECK(CollapseBinaryLabel("counter_speech") == "normal");
  CHECK_FALSE(CollapseBinaryLabel("banana").has_value());
}

TEST_CASE("derive gold is permutation invariant") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> pool = {"hatespeech", "offensive", "normal"};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> labels;
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) labels.push_back(pool[rng() % pool.size()]);
    const GoldLabel expected = DeriveGold(Multi(labels));
    for (int k = 0; k < 5; ++k) {
      std::shuffle(labels.begin(), labels.end(), rng);
      REQUIRE(DeriveGold(Multi(labels)) == expected);
    }
  }
}

TEST_CASE("binary collapse is surjective and idempotent") {
  const std::vector<std::string> categories = {
      "identity directed abuse", "affiliation directed abuse", "person directed abuse",
      "neutral", "counter speech", "non hateful slurs"};
  std::set<std::string> image;
  for (const auto& c : categories) {
    const auto once = CollapseBinaryLabel(c);
    REQUIRE(once.has_value());
    image.insert(*once);
    CHECK(CollapseBinaryLabel(*once) == once);
  }
  CHECK(image == std::set<std::string>{"offensive", "normal"});
}

TEST_CASE("reference templates") {
  CHECK(BuildReference(Multi({"hatespeech"}, {"women"}), GoldLabel::Of("hatespeech")) ==
        "The text is labeled as hate speech because of expressions against women.");
  CHECK(BuildReference(Multi({"offensive"}, {"African", "Women"}), GoldLabel::Of("offensive")) ==
        "The text is labeled as offensive because of expressions against African and Women.");
  CHECK(BuildReference(Multi({"normal"}), GoldLabel::Of("normal")) ==
        "The text is labeled as normal because no abusive expression is involved.");

  Instance cad;
  cad.task = Task::kHateSpeechBinary;
  cad.annotator_labels = {"person directed abuse"};
  cad.explanation.category = "person directed abuse";
  CHECK(BuildReference(cad, GoldLabel::Of("offensive")) ==
        "The text is labeled as offensive because the expression involves person directed "
        "abuse.");

  Instance nli;
  nli.task = Task::kNli;
  nli.explanation.relations = {{"a girl", "a man", "contradiction"}};
  CHECK(BuildReference(nli, GoldLabel::Of("contradiction")) ==
        "The relation between hypothesis and premise is contradiction because a girl does not "
        "equal to a man.");
  nli.explanation.relations = {{"slicing onions", "preparing food", ""}};
  CHECK(BuildReference(nli, GoldLabel::Of("entailment")) ==
        "The relation between hypothesis and premise is entailment because slicing onions "
        "equals to preparing food.");
}

TEST_CASE("reference unavailable without annotations") {
  CHECK_THROWS_AS(BuildReference(Multi({"hatespeech"}), GoldLabel::Of("hatespeech")),
                  ReferenceUnavailableError);
  CHECK_THROWS_AS(BuildReference(Multi({"hatespeech"}, {"x"}), GoldLabel::Excluded("tie")),
                  ReferenceUnavailableError);
  Instance nli;
  nli.task = Task::kNli;
  CHECK_THROWS_AS(BuildReference(nli, GoldLabel::Of("neutral")), ReferenceUnavailableError);
  Instance cad;
  cad.task = Task::kHateSpeechBinary;
  cad.annotator_labels = {"neutral"};
  CHECK_THROWS_AS(BuildReference(cad, GoldLabel::Of("offensive")), ReferenceUnavailableError);
}

TEST_CASE("reference contains the gold label") {
  const std::vector<std::pair<Task, std::string>> cases = {
      {Task::kHateSpeechMulti, "hatespeech"}, {Task::kHateSpeechMulti, "offensive"},
      {Task::kHateSpeechMulti, "normal"},     {Task::kHateSpeechBinary, "offensive"},
      {Task::kHateSpeechBinary, "normal"},    {Task::kNli, "entailment"},
      {Task::kNli, "contradiction"},          {Task::kNli, "neutral"}};
  for (const auto& [task, label] : cases) {
    Instance inst;
    inst.task = task;
    inst.annotator_labels = {label};
    inst.explanation.targets = {"group"};
    inst.explanation.category = "identity directed abuse";
    inst.explanation.relations = {{"x", "y", ""}};
    const std::string ref = BuildReference(inst, GoldLabel::Of(label));
    CHECK(ref.find(std::string(DisplayLabel(label))) != std::string::npos);
  }
}

TEST_CASE("display text") {
  Instance nli;
  nli.task = Task::kNli;
  nli.premise = "A  dog\nruns.";
  nli.hypothesis = "An animal moves.";
  CHECK(InstanceDisplayText(nli) == "Premise: A dog runs.\nHypothesis: An animal moves.");
  CHECK(InstanceDisplayText(Multi({"normal"})) == "some text");
}

TEST_CASE("task ids and labels") {
  CHECK(ParseTask("HateXplain") == Task::kHateSpeechMulti);
  CHECK(ParseTask("cad") == Task::kHateSpeechBinary);
  CHECK(ParseTask("spanex") == Task::kNli);
  CHECK_FALSE(ParseTask("sentiment").has_value());
  CHECK(TaskLabels(Task::kNli).size() == 3);
  CHECK(DisplayLabel("hatespeech") == "hate speech");
  CHECK(DisplayLabel("normal") == "normal");
}

TEST_CASE("converters") {
  const json post = {
      {"post_id", "p1"},
      {"post_tokens", {"they", "are", "awful"}},
      {"annotators",
       {{{"label", "hatespeech"}, {"target", {"Women"}}},
        {{"label", "hatespeech"}, {"target", {"Women", "African"}}},
        {{"label", "offensive"}, {"target", {"None"}}}}}};
  const Instance hx = convert::FromHateXplain(post);
  CHECK(hx.text == "they are awful");
  CHECK(hx.explanation.targets == std::vector<std::string>{"Women", "African"});
  CHECK(DeriveGold(hx) == GoldLabel::Of("hatespeech"));

  const Instance cad = convert::FromCad(
      {{"id", "c1"}, {"text", "go away"}, {"label", "PersonDirectedAbuse"}, {"split", "Test"}});
  CHECK(cad.explanation.category == "person directed abuse");
  CHECK(cad.split == "test");
  CHECK_THROWS_AS(convert::FromCad({{"id", "c2"}, {"text", "t"}}), ValidationError);

  const Instance sx = convert::FromSpanEx(
      {{"id", "s1"},
       {"premise", "A girl sings."},
       {"hypothesis", "A man sings."},
       {"label", "contradiction"},
       {"relations", {{{"premise_span", "a girl"}, {"hypothesis_span", "a man"}}}}});
  CHECK(BuildReference(sx, DeriveGold(sx)) ==
        "The relation between hypothesis and premise is contradiction because a girl does not "
        "equal to a man.");
}

}  // namespace
}  // namespace rwb
