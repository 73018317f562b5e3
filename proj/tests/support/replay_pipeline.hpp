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


#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "screenkit/cli.hpp"
#include "screenkit/corpus.hpp"

namespace screenkit::testing {

inline constexpr std::string_view kReplayTopic = "reinforcement learning for software engineering";

struct CommandResult {
  int code = 0;
  std::string out;
  std::string err;
};

inline CommandResult run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run_command(args, out, err);
  return {code, out.str(), err.str()};
}

struct PipelineResult {
  bool ok = false;
  std::string failure;
  std::string report_markdown;
  std::string report_json;
};

// screen (replay) -> evaluate -> report, all in a fresh directory.
inline PipelineResult replay_pipeline(const std::string& fixtures, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string out = dir.string();
  PipelineResult p;
  auto step = [&](const std::vector<std::string>& args) {
    const auto r = run(args);
    if (r.code != 0) p.failure = args.front() + " exited " + std::to_string(r.code) + ": " + r.err;
    return r.code == 0;
  };
  if (!step({"screen", fixtures + "/replay/corpus.jsonl", "--replay", fixtures + "/replay/cache.jsonl", "--topic",
             std::string(kReplayTopic), "-o", out})) {
    return p;
  }
  if (!step({"evaluate", out + "/series.json", "-o", out})) return p;
  if (!step({"report", out + "/evaluation.json", "--format", "markdown", "-o", out})) return p;
  if (!step({"report", out + "/evaluation.json", "--format", "json", "-o", out})) return p;
  p.report_markdown = read_file(out + "/report.md");
  p.report_json = read_file(out + "/report.json");
  p.ok = true;
  return p;
}

}  // namespace screenkit::testing
