// Copyright 2026 The screenkit Authors
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


#include <cstdlib>
#include <array>
#include <filesystem>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "support/replay_pipeline.hpp"

namespace screenkit {
namespace {

namespace fs = std::filesystem;
using testing::run;

const std::string kFixtures = SCREENKIT_FIXTURES;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(::testing::TempDir()) / ("screenkit_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(Cli, ProfileText) {
  const auto r = run({"profile", kFixtures + "/replay/corpus.jsonl"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("50"), std::string::npos);
  EXPECT_NE(r.out.find("17"), std::string::npos);
}

TEST(Cli, ProfileJson) {
  const auto r = run({"profile", kFixtures + "/replay/corpus.jsonl", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["size"], 50);
  EXPECT_EQ(j["included"], 17);
}

TEST(Cli, ReplayPipelineIsByteIdentical) {
  const auto a = testing::replay_pipeline(kFixtures, scratch("a"));
  const auto b = testing::replay_pipeline(kFixtures, scratch("b"));
  ASSERT_TRUE(a.ok) << a.failure;
  ASSERT_TRUE(b.ok) << b.failure;
  EXPECT_EQ(a.report_markdown, b.report_markdown);
  EXPECT_EQ(a.report_json, b.report_json);
  EXPECT_NE(a.report_markdown.find("| run 0 |"), std::string::npos) << a.report_markdown;
}

TEST(Cli, EvaluateDecisionJsonlWithCorpusTruth) {
  const auto dir = scratch("jsonl");
  const auto corpus = load_corpus(kFixtures + "/replay/corpus.jsonl");
  std::string lines;
  for (const auto& r : corpus.records) {
    lines += nlohmann::json{{"key", r.key}, {"decision", "include"}}.dump() + "\n";
  }
  const auto path = (dir / "decisions.jsonl").string();
  cli::detail::write_file(path, lines);
  const auto r = run({"evaluate", path, "--corpus", kFixtures + "/replay/corpus.jsonl", "-o", dir.string(),
                      "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["metrics"][0]["metrics"]["recall"], 1.0);
  EXPECT_EQ(j["metrics"][0]["metrics"]["specificity"], 0.0);
}

TEST(Cli, EffortAndCostFromKnownValues) {
  const auto dir = scratch("cost").string();
  const auto e = run({"effort", "--total", "1089", "--wss", "0.644", "-o", dir, "--format", "json"});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(nlohmann::json::parse(e.out)["effort"][0]["effort"]["saved_papers"], 701);

  const auto c = run({"cost", "--total", "1089", "--wss", "0.644", "--mean-tokens", "343.728", "-o", dir,
                      "--format", "json"});
  ASSERT_EQ(c.code, 0) << c.err;
  const auto cost = nlohmann::json::parse(c.out)["cost"][0]["cost"];
  EXPECT_EQ(cost["papers_costed"], 388);
  EXPECT_EQ(cost["fte_days"], "2.275000000");
}

TEST(Cli, CompareComputesMomentRows) {
  const auto dir = scratch("compare");
  std::vector<std::string> args{"compare"};
  const std::array<std::pair<const char*, std::array<double, 2>>, 3> rows{{
      {"A", {0.8, 0.7}}, {"B", {0.6, 0.9}}, {"C", {0.7, 0.8}}}};
  for (const auto& [name, rs] : rows) {
    const auto path = (dir / (std::string(name) + ".json")).string();
    cli::detail::write_file(path, nlohmann::json{{"recall", rs[0]}, {"specificity", rs[1]}}.dump());
    args.push_back(std::string(name) + "=" + path);
  }
  args.insert(args.end(), {"-o", dir.string(), "--format", "json"});
  const auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["aggregate"]["rows"].size(), 3u);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"profile"}).code, 1);
  EXPECT_EQ(run({"profile", "/nonexistent/file.jsonl"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);

  const auto dir = scratch("codes");
  const auto bad = (dir / "bad.jsonl").string();
  cli::detail::write_file(bad, "{not json\n");
  EXPECT_EQ(run({"profile", bad}).code, 2);

  // Replay that misses a prompt is an endpoint failure.
  const auto miss = run({"screen", kFixtures + "/replay/corpus.jsonl", "--replay",
                         kFixtures + "/replay/cache.jsonl", "--topic", "another topic", "-o", dir.string()});
  EXPECT_EQ(miss.code, 3) << miss.err;

  // Live screening without a key never reaches the network.
  ::unsetenv("SCREENKIT_TEST_NO_KEY");
  const auto live = run({"screen", kFixtures + "/replay/corpus.jsonl", "--topic", "t", "--api-key-env",
                         "SCREENKIT_TEST_NO_KEY", "-o", dir.string()});
  EXPECT_EQ(live.code, 1);
  EXPECT_NE(live.err.find("SCREENKIT_TEST_NO_KEY"), std::string::npos);
}

TEST(Cli, RefusesToOverwriteInputs) {
  const auto dir = scratch("guard");
  const auto corpus = (dir / "corpus.jsonl").string();
  fs::copy_file(kFixtures + "/replay/corpus.jsonl", corpus);
  const auto r = run({"ingest", corpus, "-o", dir.string()});
  EXPECT_NE(r.code, 0);
  EXPECT_EQ(read_file(corpus), read_file(kFixtures + "/replay/corpus.jsonl"));
}

TEST(Cli, BaselineTrainingRunsEndToEnd) {
  const auto dir = scratch("train");
  const auto r = run({"train", kFixtures + "/replay/corpus.jsonl", "--kind", "cnb", "--runs", "2", "--n-iter", "2",
                      "--folds", "3", "--repeats", "1", "--dimension", "16", "--epochs", "3", "--min-count", "1",
                      "-o", dir.string(), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "series.json"));
  const auto c = run({"consistency", (dir / "series.json").string(), "--dispersion-only", "-o", dir.string()});
  EXPECT_EQ(c.code, 0) << c.err;
}

TEST(Cli, ExperimentPlan) {
  const auto dir = scratch("plan");
  const auto plan = (dir / "plan.toml").string();
  cli::detail::write_file(plan, "name = \"replayed\"\ncorpus = \"" + kFixtures + "/replay/corpus.jsonl\"\n" +
                               "classifier = \"llm\"\nruns = 2\nreplay = \"" + kFixtures +
                               "/replay/cache.jsonl\"\ntopic = \"" + std::string(testing::kReplayTopic) + "\"\n");
  const auto r = run({"experiment", plan, "--run-stamp", "fixed", "-o", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "replayed-fixed" / "report.md"));
  EXPECT_NE(r.out.find("Fleiss"), std::string::npos) << r.out;
}

}  // namespace
}  // namespace screenkit
