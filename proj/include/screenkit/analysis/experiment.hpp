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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "screenkit/corpus.hpp"
#include "screenkit/error.hpp"
#include "screenkit/prompt.hpp"
#include "screenkit/analysis/money.hpp"
#include "screenkit/analysis/series.hpp"
#include "screenkit/baselines/classifiers.hpp"
#include "screenkit/baselines/grid_search.hpp"
#include "screenkit/baselines/serialize.hpp"
#include "screenkit/baselines/word2vec.hpp"
#include "screenkit/llm/client.hpp"
#include "screenkit/llm/config.hpp"
#include "screenkit/llm/replay_cache.hpp"
#include "screenkit/llm/screen.hpp"

namespace screenkit::analysis {

struct LlmSpec {
  llm::LlmConfig config;
  PromptTemplate prompt;
  // At most one of these is set: replay never reaches the endpoint, record
  // appends every exchange to the file.
  std::string replay_path;
  std::string record_path;
};

struct BaselineSpec {
  baselines::ClassifierKind kind = baselines::ClassifierKind::LogisticRegression;
  baselines::ParamGrid grid;
  baselines::SearchOptions search;
  baselines::Word2VecConfig embedding;
  double train_fraction = 0.8;
};

struct ExperimentPlan {
  std::string name = "experiment";
  std::string corpus_path;
  std::variant<LlmSpec, BaselineSpec> classifier;
  std::size_t runs = 1;
  // One per run for baselines; each seeds the split, the embedding and the
  // search of its run.
  std::vector<std::uint64_t> seeds;
  Money usd_per_1k_tokens = Money::parse("0.002");
  double minutes_per_paper = 1.0;
  // Raw decisions of every run land here when non-empty.
  std::string output_dir;

  bool is_llm() const noexcept { return std::holds_alternative<LlmSpec>(classifier); }

  void validate() const {
    if (runs < 1) throw UsageError("an experiment needs at least 1 run");
    if (corpus_path.empty()) throw UsageError("experiment plan has no corpus");
    if (!(minutes_per_paper > 0.0)) throw UsageError("minutes per paper must be positive");
    if (const auto* b = std::get_if<BaselineSpec>(&classifier)) {
      if (seeds.size() != runs) {
        throw UsageError("baseline plans need one seed per run: " + std::to_string(runs) + " runs, " +
                         std::to_string(seeds.size()) + " seeds");
      }
      if (!(b->train_fraction > 0.0 && b->train_fraction < 1.0)) {
        throw UsageError("train fraction must lie strictly between 0 and 1");
      }
      if (b->grid.size() == 0) throw UsageError("parameter grid is empty");
    } else {
      const auto& l = std::get<LlmSpec>(classifier);
      l.config.validate();
      l.prompt.validate();
      if (!l.replay_path.empty() && !l.record_path.empty()) {
        throw UsageError("replay and record are mutually exclusive");
      }
    }
  }
};

// A run failed. The runs that completed before it are kept.
class SeriesError : public Error {
 public:
  SeriesError(RunSeries completed, std::size_t failed_run, std::exception_ptr cause, const std::string& what)
      : Error("run " + std::to_string(failed_run) + " failed after " + std::to_string(completed.size()) +
              " completed: " + what),
        completed_(std::move(completed)),
        failed_run_(failed_run),
        cause_(std::move(cause)) {}

  const RunSeries& completed() const noexcept { return completed_; }
  std::size_t failed_run() const noexcept { return failed_run_; }
  std::exception_ptr cause() const noexcept { return cause_; }

 private:
  RunSeries completed_;
  std::size_t failed_run_;
  std::exception_ptr cause_;
};

struct ExperimentContext {
  // Used for live LLM runs; replay runs need none.
  llm::ChatClient* client = nullptr;
  std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  };
};

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << content;
}

inline std::string run_file_name(std::size_t run) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "run-%03zu", run);
  return buf;
}

inline RunResult llm_run(const ExperimentPlan& plan, const LlmSpec& spec, const Corpus& corpus,
                         const std::vector<RenderedPrompt>& prompts, llm::ReplayCache& cache,
                         const ExperimentContext& ctx, std::size_t run) {
  llm::ScreenOptions options;
  options.run_index = run;
  options.include_word = spec.prompt.include_word;
  options.exclude_word = spec.prompt.exclude_word;
  options.sleep = ctx.sleep;
  const auto outcomes = llm::screen_batch(ctx.client, spec.config, prompts, cache, options);

  std::vector<std::string> keys;
  std::vector<Decision> truth;
  std::string raw;
  std::uint64_t tokens = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    const auto& rec = corpus.records[i];
    keys.push_back(rec.key);
    truth.push_back(rec.label());
    tokens += o.prompt_tokens + o.completion_tokens;
    nlohmann::ordered_json line = {{"key", rec.key},
                                   {"truth", std::string(to_string(rec.label()))},
                                   {"decision", std::string(to_string(o.decision))},
                                   {"raw_response", o.raw_response},
                                   {"parse_failure", o.parse_failure()},
                                   {"attempts", o.attempt_count},
                                   {"prompt_tokens", o.prompt_tokens},
                                   {"completion_tokens", o.completion_tokens}};
    raw += line.dump() + "\n";
  }
  if (!plan.output_dir.empty()) {
    write_text(std::filesystem::path(plan.output_dir) / "runs" / (run_file_name(run) + ".jsonl"), raw);
  }
  auto result = make_run("run " + std::to_string(run), plan.seeds.size() > run ? plan.seeds[run] : run, std::move(keys),
                         std::move(truth), llm::decisions_of(outcomes));
  result.tokens = tokens;
  return result;
}

inline RunResult baseline_run(const ExperimentPlan& plan, const BaselineSpec& spec, const Corpus& corpus,
                              std::size_t run) {
  const std::uint64_t seed = plan.seeds[run];
  const auto [train, test] = split_train_test(corpus, spec.train_fraction, seed);
  auto w2v = spec.embedding;
  w2v.seed = seed;
  const auto model = baselines::train_word2vec(train, w2v);
  const auto train_x = baselines::featurize(train, model).vectors;
  const auto test_x = baselines::featurize(test, model).vectors;
  const auto train_y = labels_of(train);
  auto search = spec.search;
  search.seed = seed;
  const auto cv = baselines::grid_search_cv(spec.kind, spec.grid, train_x, train_y, search);
  const auto clf = baselines::fit(spec.kind, cv.best_hyperparameters, train_x, train_y, seed);
  const auto predicted = clf.predict(test_x);

  std::vector<std::string> keys;
  std::string raw;
  for (std::size_t i = 0; i < test.size(); ++i) {
    keys.push_back(test.records[i].key);
    nlohmann::ordered_json line = {{"key", test.records[i].key},
                                   {"truth", std::string(to_string(test.records[i].label()))},
                                   {"decision", std::string(to_string(predicted[i]))}};
    raw += line.dump() + "\n";
  }
  if (!plan.output_dir.empty()) {
    const auto dir = std::filesystem::path(plan.output_dir) / "runs";
    write_text(dir / (run_file_name(run) + ".jsonl"), raw);
    nlohmann::ordered_json meta = {{"seed", seed},
                                   {"kind", std::string(baselines::to_string(spec.kind))},
                                   {"best_hyperparameters", nlohmann::ordered_json::parse(cv.best_hyperparameters.dump())},
                                   {"cv_mean_f2", cv.mean_score},
                                   {"cv_fold_f2", cv.fold_scores}};
    write_text(dir / (run_file_name(run) + ".meta.json"), meta.dump(2) + "\n");
    baselines::write_binary_file((dir / (run_file_name(run) + ".model")).string(), baselines::serialize(clf));
    baselines::write_binary_file((dir / (run_file_name(run) + ".w2v")).string(), baselines::serialize(model));
  }
  return make_run("run " + std::to_string(run), seed, std::move(keys), labels_of(test), predicted);
}

}  // namespace detail

// Executes the plan's runs in order. LLM runs share one cache and differ by
// run index; baseline runs re-split, re-embed and re-tune per seed.
inline RunSeries run_experiment(const ExperimentPlan& plan, const ExperimentContext& ctx = {}) {
  plan.validate();
  const auto [corpus, log] = filter_records(load_corpus(plan.corpus_path));
  if (corpus.empty()) throw DataError("corpus '" + plan.corpus_path + "' has no usable records");

  RunSeries series;
  series.name = plan.name;
  if (const auto* spec = std::get_if<LlmSpec>(&plan.classifier)) {
    std::vector<RenderedPrompt> prompts;
    prompts.reserve(corpus.size());
    for (const auto& r : corpus.records) prompts.push_back(render_prompt(spec->prompt, r));
    llm::ReplayCache cache = !spec->replay_path.empty()   ? llm::ReplayCache::replay_file(spec->replay_path)
                             : !spec->record_path.empty() ? llm::ReplayCache::record_file(spec->record_path)
                                                          : llm::ReplayCache(llm::ReplayCache::Mode::Off);
    for (std::size_t run = 0; run < plan.runs; ++run) {
      try {
        series.runs.push_back(detail::llm_run(plan, *spec, corpus, prompts, cache, ctx, run));
      } catch (const std::exception& e) {
        throw SeriesError(std::move(series), run, std::current_exception(), e.what());
      }
    }
  } else {
    const auto& b = std::get<BaselineSpec>(plan.classifier);
    for (std::size_t run = 0; run < plan.runs; ++run) {
      try {
        series.runs.push_back(detail::baseline_run(plan, b, corpus, run));
      } catch (const std::exception& e) {
        throw SeriesError(std::move(series), run, std::current_exception(), e.what());
      }
    }
  }
  if (!plan.output_dir.empty()) {
    detail::write_text(std::filesystem::path(plan.output_dir) / "series.json", to_json(series).dump(2) + "\n");
  }
  return series;
}

}  // namespace screenkit::analysis
