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
#include <cstdint>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"

#include "screenkit/corpus.hpp"
#include "screenkit/error.hpp"
#include "screenkit/metrics.hpp"
#include "screenkit/prompt.hpp"
#include "screenkit/analysis/consistency.hpp"
#include "screenkit/analysis/effort.hpp"
#include "screenkit/analysis/experiment.hpp"
#include "screenkit/analysis/money.hpp"
#include "screenkit/analysis/render.hpp"
#include "screenkit/analysis/series.hpp"
#include "screenkit/baselines/classifiers.hpp"
#include "screenkit/baselines/grid_search.hpp"
#include "screenkit/llm/config.hpp"
#include "screenkit/llm/http_client.hpp"

namespace screenkit::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitEndpoint = 3 };

namespace fs = std::filesystem;

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string output_dir = "screenkit-out";
  std::string format = "text";
  bool verbose = false;
};

struct LlmFlags {
  llm::LlmConfig config;
  std::int64_t timeout_ms = 30'000;
  std::int64_t backoff_ms = 1'000;
  std::string fallback = "include";
  std::string topic;
  std::string prompt_template;
  std::vector<std::string> inputs{"title", "abstract"};
  std::string include_word = "Include";
  std::string exclude_word = "Exclude";

  void add_to(CLI::App* app) {
    app->add_option("--endpoint", config.endpoint, "Chat-completions URL")->capture_default_str();
    app->add_option("--model", config.model_name, "Model name")->capture_default_str();
    app->add_option("--temperature", config.temperature, "Sampling temperature")->capture_default_str();
    app->add_option("--max-tokens", config.max_tokens, "Completion token limit")->capture_default_str();
    app->add_option("--api-key-env", config.api_key_env, "Environment variable holding the API key")
        ->capture_default_str();
    app->add_option("--timeout-ms", timeout_ms, "Per-request timeout")->capture_default_str();
    app->add_option("--max-retries", config.max_retries, "Attempts per prompt")->capture_default_str();
    app->add_option("--backoff-ms", backoff_ms, "Initial retry backoff")->capture_default_str();
    app->add_option("--parallelism", config.parallelism, "Requests in flight")->capture_default_str();
    app->add_option("--parse-failure-fallback", fallback, "Decision when no answer parses")
        ->capture_default_str()
        ->check(CLI::IsMember({"include", "exclude"}, CLI::ignore_case));
    app->add_option("--topic", topic, "Review topic inserted into the prompt");
    app->add_option("--prompt-template", prompt_template, "Prompt body file");
    app->add_option("--inputs", inputs, "Record fields shown to the model")->capture_default_str();
    app->add_option("--include-word", include_word)->capture_default_str();
    app->add_option("--exclude-word", exclude_word)->capture_default_str();
  }

  analysis::LlmSpec spec() const {
    analysis::LlmSpec s;
    s.config = config;
    s.config.request_timeout = std::chrono::milliseconds(timeout_ms);
    s.config.backoff_initial = std::chrono::milliseconds(backoff_ms);
    s.config.parse_failure_fallback = decision_from_string(fallback).value_or(Decision::Include);
    if (!prompt_template.empty()) {
      s.prompt = load_prompt_template(prompt_template, topic);
    } else {
      s.prompt.topic = topic;
    }
    s.prompt.inputs = inputs;
    s.prompt.include_word = include_word;
    s.prompt.exclude_word = exclude_word;
    s.prompt.validate();
    s.config.validate();
    return s;
  }
};

struct BaselineFlags {
  std::string kind = "lr";
  std::string grid_config;
  baselines::SearchOptions search;
  baselines::Word2VecConfig embedding;
  double train_fraction = 0.8;

  void add_to(CLI::App* app, bool with_kind = true) {
    if (with_kind) {
      app->add_option("--kind", kind, "Classifier: random, lr, cnb, svc or rf")->capture_default_str();
    }
    app->add_option("--grid-config", grid_config, "JSON file of parameter grids per classifier kind");
    app->add_option("--n-iter", search.n_iter, "Grid candidates sampled")->capture_default_str();
    app->add_option("--folds", search.folds, "Cross-validation folds")->capture_default_str();
    app->add_option("--repeats", search.repeats, "Cross-validation repeats")->capture_default_str();
    app->add_option("--train-fraction", train_fraction, "Training share of each split")->capture_default_str();
    app->add_option("--dimension", embedding.dimension, "Embedding dimension")->capture_default_str();
    app->add_option("--window", embedding.window, "Skip-gram window")->capture_default_str();
    app->add_option("--negative", embedding.negative, "Negative samples")->capture_default_str();
    app->add_option("--epochs", embedding.epochs, "Embedding epochs")->capture_default_str();
    app->add_option("--min-count", embedding.min_count, "Minimum token count")->capture_default_str();
  }

  analysis::BaselineSpec spec() const {
    analysis::BaselineSpec s;
    s.kind = baselines::classifier_kind_from_string(kind);
    const auto grids = grid_config.empty() ? baselines::default_grid_config() : baselines::load_grid_config(grid_config);
    s.grid = grids.at(s.kind);
    s.search = search;
    s.embedding = embedding;
    s.train_fraction = train_fraction;
    return s;
  }
};

namespace detail {

inline void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << content;
}

// Outputs never overwrite an input file.
inline void guard_inputs(const fs::path& output, const std::vector<std::string>& inputs) {
  std::error_code ec;
  for (const auto& in : inputs) {
    if (in.empty()) continue;
    if (fs::exists(output, ec) && fs::exists(in, ec) && fs::equivalent(output, in, ec)) {
      throw UsageError("refusing to overwrite input file '" + in + "'");
    }
  }
}

inline bool json_output(const GlobalOptions& g) { return g.format == "json"; }

inline analysis::ReportFormat report_format(const GlobalOptions& g) {
  return g.format == "text" ? analysis::ReportFormat::Markdown : analysis::report_format_from_string(g.format);
}

inline std::string percent(double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * ratio);
  return buf;
}

inline nlohmann::ordered_json profile_json(const DatasetProfile& p) {
  return {{"size", p.size},
          {"included", p.included},
          {"excluded", p.excluded},
          {"inclusion_ratio", p.inclusion_ratio},
          {"conflicts", p.conflicts},
          {"conflict_ratio", p.conflict_ratio}};
}

inline std::string profile_text(const DatasetProfile& p) {
  std::string s;
  s += "size: " + std::to_string(p.size) + "\n";
  s += "included: " + std::to_string(p.included) + "\n";
  s += "excluded: " + std::to_string(p.excluded) + "\n";
  s += "inclusion: " + percent(p.inclusion_ratio) + "\n";
  s += "conflicts: " + std::to_string(p.conflicts) + " (" + percent(p.conflict_ratio) + ")\n";
  return s;
}

// A series file, or a JSONL decision file with one {key, decision[, truth]}
// object per line. Missing truths are looked up in `corpus_path`.
inline analysis::RunSeries load_series(const std::string& path, const std::string& corpus_path) {
  const std::string content = read_file(path);
  const auto first = content.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw DataError("'" + path + "' is empty");
  if (text::to_lower(fs::path(path).extension().string()) == ".json") {
    try {
      const auto j = nlohmann::ordered_json::parse(content);
      if (j.contains("series") && j.at("series").is_object()) return analysis::series_from_json(j.at("series"));
      return analysis::series_from_json(j);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("'" + path + "' is not a run series: " + e.what());
    }
  }
  std::unordered_map<std::string, Decision> truth_by_key;
  if (!corpus_path.empty()) {
    const auto [corpus, log] = filter_records(load_corpus(corpus_path));
    for (const auto& r : corpus.records) truth_by_key.emplace(r.key, r.label());
  }
  std::vector<std::string> keys;
  std::vector<Decision> truth;
  std::vector<Decision> predicted;
  std::istringstream in(content);
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (text::is_blank(line)) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto key = j.at("key").get<std::string>();
      auto decision_field = [&](const char* name) {
        const auto d = decision_from_string(j.at(name).get<std::string>());
        if (!d) throw ParseError(row, std::string("field '") + name + "' must be include or exclude");
        return *d;
      };
      predicted.push_back(decision_field("decision"));
      if (j.contains("truth")) {
        truth.push_back(decision_field("truth"));
      } else {
        const auto it = truth_by_key.find(key);
        if (it == truth_by_key.end()) throw ParseError(row, "no ground truth for record '" + key + "'");
        truth.push_back(it->second);
      }
      keys.push_back(key);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(row, e.what());
    }
  }
  analysis::RunSeries s;
  s.name = fs::path(path).stem().string();
  s.runs.push_back(analysis::make_run("run 0", 0, std::move(keys), std::move(truth), std::move(predicted)));
  return s;
}

inline std::vector<analysis::DatasetRow> run_rows(const analysis::RunSeries& s) {
  std::vector<analysis::DatasetRow> rows;
  for (const auto& r : s.runs) rows.push_back({r.label, r.metrics});
  return rows;
}

// Metrics of a dataset from a series (confusion pooled over runs) or from a
// JSON object holding the metric columns directly.
inline MetricsReport dataset_metrics(const std::string& path) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("'" + path + "' is not JSON: " + e.what());
  }
  try {
    if (j.contains("runs") || j.contains("series")) {
      const auto s = analysis::series_from_json(j.contains("series") ? j.at("series") : j);
      ConfusionMatrix pooled;
      for (const auto& r : s.runs) pooled += r.confusion;
      return metrics_report(pooled);
    }
    return analysis::metrics_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("'" + path + "' holds neither a series nor metrics: " + e.what());
  }
}

inline std::string utc_stamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

class Context {
 public:
  Context(const GlobalOptions& g, std::ostream& out, std::ostream& err) : g_(g), out_(out), err_(err) {}

  const GlobalOptions& global() const { return g_; }
  std::ostream& out() { return out_; }
  fs::path output_path(const std::string& name) const { return fs::path(g_.output_dir) / name; }

  void log(const std::string& msg) {
    if (g_.verbose) err_ << msg << '\n';
  }

  // Renders the artifacts to stdout and stores their JSON under `name`.
  void emit(const analysis::ReportArtifacts& a, const std::string& name, const std::vector<std::string>& inputs) {
    const auto path = output_path(name + ".json");
    guard_inputs(path, inputs);
    write_file(path, analysis::render_report(a, analysis::ReportFormat::Json));
    out_ << analysis::render_report(a, report_format(g_));
    log("wrote " + path.string());
  }

 private:
  const GlobalOptions& g_;
  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Plan files: TOML-style key = value documents read with the same option
// grammar as the command line.

inline analysis::ExperimentPlan load_plan(const std::string& path) {
  CLI::App app{"experiment plan"};
  app.allow_config_extras(CLI::config_extras_mode::error);
  std::string name = "experiment";
  std::string corpus;
  std::string classifier = "llm";
  std::size_t runs = 1;
  std::vector<std::uint64_t> seeds;
  std::string price = "0.002";
  double minutes = 1.0;
  std::string replay;
  std::string record;
  LlmFlags llm_flags;
  BaselineFlags baseline_flags;
  app.set_config("--plan", path, "", true);
  app.add_option("--name", name);
  app.add_option("--corpus", corpus);
  app.add_option("--classifier", classifier);
  app.add_option("--runs", runs);
  app.add_option("--seeds", seeds);
  app.add_option("--price", price);
  app.add_option("--minutes-per-paper", minutes);
  app.add_option("--replay", replay);
  app.add_option("--record", record);
  llm_flags.add_to(&app);
  baseline_flags.add_to(&app, false);
  try {
    app.parse(std::vector<std::string>{});
  } catch (const CLI::ParseError& e) {
    throw UsageError("plan '" + path + "': " + e.what());
  }

  analysis::ExperimentPlan plan;
  plan.name = name;
  plan.corpus_path = corpus;
  if (!corpus.empty() && fs::path(corpus).is_relative()) {
    plan.corpus_path = (fs::path(path).parent_path() / corpus).string();
  }
  plan.runs = runs;
  plan.seeds = seeds;
  plan.usd_per_1k_tokens = analysis::Money::parse(price);
  plan.minutes_per_paper = minutes;
  auto resolve = [&](const std::string& p) {
    return p.empty() || fs::path(p).is_absolute() ? p : (fs::path(path).parent_path() / p).string();
  };
  if (text::to_lower(classifier) == "llm") {
    llm_flags.prompt_template = resolve(llm_flags.prompt_template);
    auto spec = llm_flags.spec();
    spec.replay_path = resolve(replay);
    spec.record_path = resolve(record);
    plan.classifier = std::move(spec);
  } else {
    baseline_flags.kind = classifier;
    baseline_flags.grid_config = resolve(baseline_flags.grid_config);
    plan.classifier = baseline_flags.spec();
  }
  plan.validate();
  return plan;
}

// ---------------------------------------------------------------------------

inline int exit_code_for(const std::exception& e) {
  if (const auto* s = dynamic_cast<const analysis::SeriesError*>(&e)) {
    try {
      std::rethrow_exception(s->cause());
    } catch (const std::exception& inner) {
      return exit_code_for(inner);
    } catch (...) {
      return kExitData;
    }
  }
  if (dynamic_cast<const UsageError*>(&e)) return kExitUsage;
  if (dynamic_cast<const EndpointError*>(&e)) return kExitEndpoint;
  return kExitData;
}

inline int run_command(const std::vector<std::string>& args, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  CLI::App app{"Systematic-review screening toolkit: LLM screening, baseline classifiers and evaluation",
               "screenkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML-style configuration file");
  GlobalOptions g;
  app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("-o,--output-dir", g.output_dir, "Directory receiving all outputs")->capture_default_str();
  app.add_option("--format", g.format, "Output format")
      ->capture_default_str()
      ->check(CLI::IsMember({"text", "markdown", "csv", "json"}, CLI::ignore_case))
      ->transform(CLI::IsMember({"text", "markdown", "csv", "json"}, CLI::ignore_case));
  app.add_flag("-v,--verbose", g.verbose, "Progress messages on stderr");

  // ingest / profile
  std::string corpus_path;
  auto* ingest = app.add_subcommand("ingest", "Parse, filter and profile a corpus; writes the retained records");
  ingest->add_option("corpus", corpus_path, "Corpus file (.jsonl or .csv)")->required()->check(CLI::ExistingFile);
  auto* prof = app.add_subcommand("profile", "Size and inclusion statistics of the retained records");
  prof->add_option("corpus", corpus_path, "Corpus file")->required()->check(CLI::ExistingFile);

  // sample / split
  std::size_t sample_size = 0;
  std::optional<double> sample_ratio;
  auto* sample = app.add_subcommand("sample", "Stratified sample with a target inclusion ratio");
  sample->add_option("corpus", corpus_path, "Corpus file")->required()->check(CLI::ExistingFile);
  sample->add_option("--size", sample_size, "Records to draw")->required();
  sample->add_option("--ratio", sample_ratio, "Inclusion ratio of the sample (default: the corpus ratio)");
  double split_fraction = 0.8;
  auto* split = app.add_subcommand("split", "Stratified train/test split");
  split->add_option("corpus", corpus_path, "Corpus file")->required()->check(CLI::ExistingFile);
  split->add_option("--train-fraction", split_fraction, "Training share")->capture_default_str();

  // screen
  LlmFlags llm_flags;
  std::string replay_path;
  std::string record_path;
  std::size_t screen_runs = 1;
  auto* screen = app.add_subcommand("screen", "Screen a corpus with the language model");
  screen->add_option("corpus", corpus_path, "Corpus file")->required()->check(CLI::ExistingFile);
  auto* replay_opt = screen->add_option("--replay", replay_path, "Serve responses from a recorded cache only")
                         ->check(CLI::ExistingFile);
  screen->add_option("--record", record_path, "Append every exchange to this cache")->excludes(replay_opt);
  screen->add_option("--runs", screen_runs, "Repeated runs over the corpus")->capture_default_str();
  llm_flags.add_to(screen);

  // train
  BaselineFlags baseline_flags;
  std::size_t train_runs = 1;
  auto* train = app.add_subcommand("train", "Tune and fit a baseline classifier on repeated splits");
  train->add_option("corpus", corpus_path, "Corpus file")->required()->check(CLI::ExistingFile);
  train->add_option("--runs", train_runs, "Runs; run i uses seed + i")->capture_default_str();
  baseline_flags.add_to(train);

  // evaluate / consistency
  std::string decisions_path;
  std::string truth_corpus;
  auto* evaluate = app.add_subcommand("evaluate", "Metrics of recorded decisions");
  evaluate->add_option("decisions", decisions_path, "Series JSON or decision JSONL")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--corpus", truth_corpus, "Corpus supplying ground truth for decision files without it");
  bool dispersion_only = false;
  auto* consistency = app.add_subcommand("consistency", "Dispersion, Fleiss' kappa and disagreement across runs");
  consistency->add_option("series", decisions_path, "Series JSON")->required()->check(CLI::ExistingFile);
  consistency->add_flag("--dispersion-only", dispersion_only,
                        "Only metric dispersion; allowed when runs cover different records");

  // effort / cost
  std::string series_path;
  std::optional<std::int64_t> total_papers;
  std::optional<double> wss_value;
  double minutes = 1.0;
  std::string label = "classifier";
  auto* effort = app.add_subcommand("effort", "Work saved over sampling in papers and hours");
  effort->add_option("--series", series_path, "Series JSON; one row per run")->check(CLI::ExistingFile);
  effort->add_option("--total", total_papers, "Screened papers (with --wss)");
  effort->add_option("--wss", wss_value, "Known WSS value (with --total)");
  effort->add_option("--minutes-per-paper", minutes, "Screening minutes per paper")->capture_default_str();
  effort->add_option("--label", label, "Row label")->capture_default_str();
  std::string mean_tokens;
  std::string price = "0.002";
  std::string cost_mode = "paper-compat";
  auto* cost = app.add_subcommand("cost", "Token spend and full-time-equivalent days");
  cost->add_option("--series", series_path, "Series JSON; tokens and WSS from the first run")
      ->check(CLI::ExistingFile);
  cost->add_option("--total", total_papers, "Screened papers (with --wss)");
  cost->add_option("--wss", wss_value, "Known WSS value (with --total)");
  cost->add_option("--mean-tokens", mean_tokens, "Mean tokens per paper, decimal");
  cost->add_option("--price", price, "USD per 1000 tokens, decimal")->capture_default_str();
  cost->add_option("--mode", cost_mode, "paper-compat, full-corpus or both")
      ->capture_default_str()
      ->check(CLI::IsMember({"paper-compat", "full-corpus", "both"}));
  cost->add_option("--minutes-per-paper", minutes, "Screening minutes per paper")->capture_default_str();
  cost->add_option("--label", label, "Row label")->capture_default_str();

  // compare / report / experiment
  std::vector<std::string> datasets;
  auto* compare = app.add_subcommand("compare", "Cross-dataset table with moment rows");
  compare->add_option("datasets", datasets, "NAME=FILE pairs (series or metrics JSON)")->required();
  std::string artifacts_path;
  auto* report = app.add_subcommand("report", "Render stored report artifacts");
  report->add_option("artifacts", artifacts_path, "Artifacts JSON written by another command")
      ->required()
      ->check(CLI::ExistingFile);
  std::string plan_path;
  std::string run_stamp;
  auto* experiment = app.add_subcommand("experiment", "Run a declarative experiment plan");
  experiment->add_option("plan", plan_path, "Plan file")->required()->check(CLI::ExistingFile);
  experiment->add_option("--run-stamp", run_stamp, "Name of the output subdirectory (default: UTC time)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    if (e.get_exit_code() != 0) err << app.help();
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  detail::Context ctx(g, out, err);
  try {
    if (*ingest || *prof) {
      const auto [corpus, log] = filter_records(load_corpus(corpus_path));
      const auto p = profile(corpus);
      if (*ingest) {
        const auto path = ctx.output_path(fs::path(corpus_path).stem().string() + ".jsonl");
        detail::guard_inputs(path, {corpus_path});
        detail::write_file(path, serialize_jsonl(corpus));
        nlohmann::ordered_json dropped = nlohmann::ordered_json::array();
        for (const auto& d : log.dropped) {
          dropped.push_back({{"index", d.index}, {"project", d.project}, {"key", d.key}, {"reason", d.reason}});
        }
        detail::write_file(ctx.output_path("filter_log.json"), dropped.dump(2) + "\n");
        if (detail::json_output(g)) {
          out << nlohmann::ordered_json{{"corpus", corpus_path},
                                        {"retained", corpus.size()},
                                        {"dropped", log.dropped.size()},
                                        {"output", path.string()},
                                        {"profile", detail::profile_json(p)}}
                     .dump(2)
              << '\n';
        } else {
          out << "retained: " << corpus.size() << "\ndropped: " << log.dropped.size() << '\n'
              << detail::profile_text(p);
        }
      } else if (detail::json_output(g)) {
        auto j = detail::profile_json(p);
        out << j.dump(2) << '\n';
      } else {
        out << detail::profile_text(p);
      }
      return kExitOk;
    }
    if (*sample) {
      const auto [corpus, log] = filter_records(load_corpus(corpus_path));
      const double ratio = sample_ratio ? *sample_ratio : profile(corpus).inclusion_ratio;
      const auto s = sample_stratified(corpus, sample_size, ratio, g.seed);
      const auto path = ctx.output_path("sample.jsonl");
      detail::guard_inputs(path, {corpus_path});
      detail::write_file(path, serialize_jsonl(s));
      const auto p = profile(s);
      if (detail::json_output(g)) {
        out << nlohmann::ordered_json{{"output", path.string()}, {"profile", detail::profile_json(p)}}.dump(2)
            << '\n';
      } else {
        out << "wrote " << path.string() << '\n' << detail::profile_text(p);
      }
      return kExitOk;
    }
    if (*split) {
      const auto [corpus, log] = filter_records(load_corpus(corpus_path));
      const auto [tr, te] = split_train_test(corpus, split_fraction, g.seed);
      const auto train_path = ctx.output_path("train.jsonl");
      const auto test_path = ctx.output_path("test.jsonl");
      detail::guard_inputs(train_path, {corpus_path});
      detail::guard_inputs(test_path, {corpus_path});
      detail::write_file(train_path, serialize_jsonl(tr));
      detail::write_file(test_path, serialize_jsonl(te));
      if (detail::json_output(g)) {
        out << nlohmann::ordered_json{{"train", {{"path", train_path.string()}, {"size", tr.size()}}},
                                      {"test", {{"path", test_path.string()}, {"size", te.size()}}}}
                   .dump(2)
            << '\n';
      } else {
        out << "train: " << tr.size() << " -> " << train_path.string() << '\n'
            << "test: " << te.size() << " -> " << test_path.string() << '\n';
      }
      return kExitOk;
    }
    if (*screen || *train) {
      analysis::ExperimentPlan plan;
      plan.corpus_path = corpus_path;
      plan.output_dir = g.output_dir;
      std::unique_ptr<llm::HttpChatClient> client;
      analysis::ExperimentContext ectx;
      if (*screen) {
        plan.name = "screen";
        plan.runs = screen_runs;
        auto spec = llm_flags.spec();
        spec.replay_path = replay_path;
        spec.record_path = record_path;
        if (replay_path.empty()) {
          if (!std::getenv(spec.config.api_key_env.c_str())) {
            throw UsageError("environment variable " + spec.config.api_key_env + " holds no API key");
          }
          client = std::make_unique<llm::HttpChatClient>(llm::HttpChatClient::from_config(spec.config));
          ectx.client = client.get();
        }
        plan.classifier = std::move(spec);
      } else {
        plan.name = "train";
        plan.runs = train_runs;
        for (std::size_t i = 0; i < train_runs; ++i) plan.seeds.push_back(g.seed + i);
        plan.classifier = baseline_flags.spec();
      }
      detail::guard_inputs(ctx.output_path("series.json"), {corpus_path, replay_path});
      const auto series = analysis::run_experiment(plan, ectx);
      analysis::ReportArtifacts a;
      a.title = plan.name + ": " + fs::path(corpus_path).filename().string();
      a.series = series;
      ctx.emit(a, plan.name + "-report", {corpus_path});
      return kExitOk;
    }
    if (*evaluate) {
      const auto series = detail::load_series(decisions_path, truth_corpus);
      analysis::ReportArtifacts a;
      a.title = "Evaluation: " + series.name;
      a.metrics = detail::run_rows(series);
      a.series = series;
      ctx.emit(a, "evaluation", {decisions_path});
      return kExitOk;
    }
    if (*consistency) {
      const auto series = detail::load_series(decisions_path, "");
      analysis::ReportArtifacts a;
      a.title = "Consistency: " + series.name;
      if (dispersion_only) {
        if (series.size() < 2) throw DataError("dispersion needs at least 2 runs");
        analysis::ConsistencyReport c;
        c.runs = series.size();
        c.dispersion = analysis::metric_dispersion(series);
        a.consistency = c;
      } else {
        a.consistency = analysis::consistency_report(series);
      }
      ctx.emit(a, "consistency", {decisions_path});
      return kExitOk;
    }
    if (*effort || *cost) {
      std::vector<analysis::Labeled<analysis::EffortReport>> efforts;
      std::vector<analysis::Decimal> tokens;
      if (!series_path.empty()) {
        const auto series = detail::load_series(series_path, "");
        for (const auto& r : series.runs) {
          efforts.push_back({r.label, analysis::effort_report(r.confusion, minutes)});
          tokens.push_back(analysis::Decimal::from_double(r.mean_tokens_per_paper()));
        }
      } else if (total_papers && wss_value) {
        efforts.push_back({label, analysis::effort_from_wss(*total_papers, *wss_value, minutes)});
      } else {
        throw UsageError("give --series, or both --total and --wss");
      }
      analysis::ReportArtifacts a;
      if (*effort) {
        a.title = "Effort";
        a.effort = efforts;
        ctx.emit(a, "effort", {series_path});
        return kExitOk;
      }
      if (!mean_tokens.empty()) {
        tokens.assign(efforts.size(), analysis::Decimal::parse(mean_tokens));
      } else if (tokens.empty()) {
        throw UsageError("--mean-tokens is required without --series");
      }
      const auto usd = analysis::Money::parse(price);
      a.title = "Cost";
      for (std::size_t i = 0; i < efforts.size(); ++i) {
        const auto& [lab, e] = efforts[i];
        if (cost_mode != "full-corpus") {
          a.cost.push_back({lab, analysis::cost_report(e, tokens[i], usd, analysis::CostMode::PaperCompat)});
        }
        if (cost_mode != "paper-compat") {
          a.cost.push_back({lab, analysis::cost_report(e, tokens[i], usd, analysis::CostMode::FullCorpus)});
        }
      }
      ctx.emit(a, "cost", {series_path});
      return kExitOk;
    }
    if (*compare) {
      std::vector<analysis::DatasetRow> rows;
      std::vector<std::string> inputs;
      for (const auto& d : datasets) {
        const auto eq = d.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == d.size()) {
          throw UsageError("expected NAME=FILE, got '" + d + "'");
        }
        inputs.push_back(d.substr(eq + 1));
        rows.push_back({d.substr(0, eq), detail::dataset_metrics(inputs.back())});
      }
      analysis::ReportArtifacts a;
      a.title = "Across datasets";
      a.aggregate = analysis::aggregate_generalizability(std::move(rows));
      ctx.emit(a, "compare", inputs);
      return kExitOk;
    }
    if (*report) {
      nlohmann::ordered_json j;
      try {
        j = nlohmann::ordered_json::parse(read_file(artifacts_path));
      } catch (const nlohmann::json::exception& e) {
        throw DataError("'" + artifacts_path + "' is not JSON: " + e.what());
      }
      const auto a = analysis::artifacts_from_json(j);
      const auto fmt = detail::report_format(g);
      const char* ext = fmt == analysis::ReportFormat::Markdown ? "md" : fmt == analysis::ReportFormat::Csv ? "csv" : "json";
      const auto rendered = analysis::render_report(a, fmt);
      const auto path = ctx.output_path(std::string("report.") + ext);
      detail::guard_inputs(path, {artifacts_path});
      detail::write_file(path, rendered);
      out << rendered;
      return kExitOk;
    }
    if (*experiment) {
      auto plan = load_plan(plan_path);
      const auto stamp = run_stamp.empty() ? detail::utc_stamp() : run_stamp;
      plan.output_dir = (fs::path(g.output_dir) / (plan.name + "-" + stamp)).string();
      std::unique_ptr<llm::HttpChatClient> client;
      analysis::ExperimentContext ectx;
      if (const auto* spec = std::get_if<analysis::LlmSpec>(&plan.classifier); spec && spec->replay_path.empty()) {
        if (!std::getenv(spec->config.api_key_env.c_str())) {
          throw UsageError("environment variable " + spec->config.api_key_env + " holds no API key");
        }
        client = std::make_unique<llm::HttpChatClient>(llm::HttpChatClient::from_config(spec->config));
        ectx.client = client.get();
      }
      const auto series = analysis::run_experiment(plan, ectx);
      analysis::ReportArtifacts a;
      a.title = plan.name;
      a.series = series;
      if (series.size() >= 2) {
        if (series.same_records()) {
          a.consistency = analysis::consistency_report(series);
        } else {
          analysis::ConsistencyReport c;
          c.runs = series.size();
          c.dispersion = analysis::metric_dispersion(series);
          a.consistency = c;
        }
      }
      for (const auto& r : series.runs) {
        const auto e = analysis::effort_report(r.confusion, plan.minutes_per_paper);
        a.effort.push_back({r.label, e});
        if (plan.is_llm()) {
          a.cost.push_back({r.label, analysis::cost_report(e, analysis::Decimal::from_double(r.mean_tokens_per_paper()),
                                                            plan.usd_per_1k_tokens)});
        }
      }
      const fs::path dir(plan.output_dir);
      detail::write_file(dir / "report.md", analysis::render_report(a, analysis::ReportFormat::Markdown));
      detail::write_file(dir / "report.csv", analysis::render_report(a, analysis::ReportFormat::Csv));
      detail::write_file(dir / "report.json", analysis::render_report(a, analysis::ReportFormat::Json));
      out << analysis::render_report(a, detail::report_format(g));
      ctx.log("wrote " + dir.string());
      return kExitOk;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  err << app.help();
  return kExitUsage;
}

inline int run_command(int argc, const char* const* argv, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_command(args, out, err);
}

}  // namespace screenkit::cli
