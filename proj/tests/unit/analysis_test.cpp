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


#include <cmath>

#include <gtest/gtest.h>

#include "screenkit/analysis/consistency.hpp"
#include "screenkit/analysis/effort.hpp"
#include "screenkit/analysis/money.hpp"
#include "screenkit/analysis/render.hpp"
#include "screenkit/analysis/series.hpp"
#include "screenkit/rng.hpp"
#include "support/reference_values.hpp"

namespace screenkit::analysis {
namespace {

constexpr auto I = Decision::Include;
constexpr auto E = Decision::Exclude;

TEST(Decimal, ParseFormatAndArithmetic) {
  const auto d = Decimal::parse("343.728");
  EXPECT_EQ(d.units(), 343'728'000'000);
  EXPECT_EQ(d.to_string(3), "343.728");
  EXPECT_EQ(d.to_string(1), "343.7");
  EXPECT_EQ(d.to_string(0), "344");
  EXPECT_EQ(d.times(388).to_string(3), "133366.464");
  EXPECT_EQ(d.times(388).round_to_integer(), 133366);
  EXPECT_EQ(Decimal::parse("0.0005").to_string(3), "0.001");  // half up
  EXPECT_EQ(Decimal::from_integer(7).divided_by(8).to_string(), "0.875000000");
  EXPECT_EQ(Decimal::parse("1").divided_by(3).to_string(), "0.333333333");
  EXPECT_EQ(Decimal::parse("2").divided_by(3).to_string(), "0.666666667");
  EXPECT_EQ(token_cost(133366, Decimal::parse("0.002")).to_string(), "0.266732000");
  EXPECT_THROW(Decimal::parse("-1"), UsageError);
  EXPECT_THROW(Decimal::parse("1.0000000001"), UsageError);
  EXPECT_THROW(Decimal::parse("abc"), UsageError);
  EXPECT_LT(Decimal::parse("0.1"), Decimal::parse("0.2"));
}

TEST(Effort, FloorRuleReproducesPublishedRows) {
  for (const auto& row : testing::kEffortRows) {
    const auto e = effort_from_wss(row.total_papers, row.wss);
    const bool printed_from_unrounded_wss =
        (row.dataset == "RL4SE" && row.model == "Random") || (row.dataset == "DSMLCompo" && row.model == "GPT-3.5");
    if (row.saved_papers < 0) {
      EXPECT_TRUE(e.negative_wss);
      EXPECT_EQ(e.saved_papers, 0);
      continue;
    }
    if (printed_from_unrounded_wss) {
      // Printed counts inconsistent with the printed WSS: 0.010 x 1089 =
      // 10.9 (printed 12); 0.636 x 2683 = 1706.4 (printed 1451).
      EXPECT_NE(e.saved_papers, row.saved_papers) << row.dataset << " / " << row.model;
      continue;
    }
    EXPECT_EQ(e.saved_papers, row.saved_papers) << row.dataset << " / " << row.model;
    EXPECT_NEAR(e.saved_hours, row.saved_hours, 0.05 + 1e-9) << row.dataset << " / " << row.model;
  }
}

TEST(Effort, HeadlineRowsExactly) {
  const auto rl = effort_from_wss(1089, 0.644);
  EXPECT_EQ(rl.saved_papers, 701);
  EXPECT_EQ(std::round(rl.saved_hours * 10) / 10, 11.7);
  EXPECT_EQ(std::round(rl.total_screening_hours * 10) / 10, 18.2);
  const auto mob = effort_from_wss(292, 0.880);
  EXPECT_EQ(mob.saved_papers, 256);  // 256.96 floors
  EXPECT_EQ(std::round(mob.saved_hours * 10) / 10, 4.3);
  const auto dsml = effort_from_wss(2683, 0.646);
  EXPECT_EQ(dsml.saved_papers, 1733);
  EXPECT_EQ(std::round(dsml.saved_hours * 10) / 10, 28.9);
}

TEST(Effort, FromConfusionAndEdgeCases) {
  const ConfusionMatrix cm{8, 80, 10, 2};  // WSS = 0.82 - 1 + 0.8 = 0.62
  const auto e = effort_report(cm, 2.0);
  EXPECT_EQ(e.total_papers, 100);
  EXPECT_EQ(e.saved_papers, 62);
  EXPECT_DOUBLE_EQ(e.saved_hours, 62 * 2.0 / 60.0);
  EXPECT_TRUE(effort_from_wss(875, -0.019).negative_wss);
  EXPECT_THROW(effort_from_wss(10, 0.5, 0.0), UsageError);
  EXPECT_THROW(effort_from_wss(10, 1.5), DataError);
}

TEST(Cost, PaperCompatRows) {
  for (const auto& row : testing::kCostRows) {
    EffortReport e = effort_from_wss(row.total_papers, 0.0);
    e.saved_papers = row.saved_papers;
    const auto c = cost_report(e, Decimal::parse(row.mean_tokens), Decimal::parse(testing::kUsdPer1kTokens));
    EXPECT_EQ(c.papers_costed, row.papers_not_saved) << row.dataset;
    // Independent oracle: thousandths of a token, integer arithmetic.
    const std::int64_t milli = std::llround(std::stod(std::string(row.mean_tokens)) * 1000);
    const std::int64_t expect_tokens = (milli * row.papers_not_saved + 500) / 1000;
    EXPECT_EQ(c.sum_tokens, expect_tokens) << row.dataset;
    if (row.dataset != "RL4SE") {
      EXPECT_EQ(c.sum_tokens, row.sum_tokens) << row.dataset;
    }
    EXPECT_EQ(c.usd.to_string(3), row.usd) << row.dataset;
    EXPECT_EQ(c.hours, row.hours) << row.dataset;
    EXPECT_EQ(c.fte_days.to_string(3), row.fte_days) << row.dataset;
  }
}

TEST(Cost, RoundingOfThePublishedSumIsOffByOne) {
  // 343.728 x 388 = 133366.464; the table prints 133,367, which no
  // rounding rule consistent with the other rows produces.
  EffortReport e = effort_from_wss(1089, 0.644);
  const auto c = cost_report(e, Decimal::parse("343.728"), Decimal::parse("0.002"));
  EXPECT_EQ(c.papers_costed, 388);
  EXPECT_EQ(c.sum_tokens, 133366);
  EXPECT_EQ(c.usd.to_string(3), "0.267");
}

TEST(Cost, FullCorpusMode) {
  const EffortReport e = effort_from_wss(1089, 0.644);
  const auto c = cost_report(e, Decimal::parse("343.728"), Decimal::parse("0.002"), CostMode::FullCorpus);
  EXPECT_EQ(c.papers_costed, 1089);
  EXPECT_EQ(c.sum_tokens, 374320);  // 374319.792
  EXPECT_EQ(c.usd.to_string(6), "0.748640");
  EXPECT_DOUBLE_EQ(c.hours, 1089.0 / 60.0);
  EXPECT_EQ(c.fte_days.to_string(3), "2.269");
  EXPECT_EQ(cost_mode_from_string("full-corpus"), CostMode::FullCorpus);
  EXPECT_THROW(cost_mode_from_string("cheap"), UsageError);
}

TEST(Cost, JsonRoundTrip) {
  const auto c = cost_report(effort_from_wss(292, 0.880), Decimal::parse("348.329"), Decimal::parse("0.002"));
  const auto back = cost_from_json(to_json(c));
  EXPECT_EQ(to_json(back).dump(), to_json(c).dump());
}

// RL4SE-sized series: 1089 records, 10 runs, 195 records with at least one
// deviating run, all but four of them on truly excluded records.
RunSeries census_series() {
  const std::size_t n = 1089;
  std::vector<std::string> keys;
  std::vector<Decision> truth;
  for (std::size_t i = 0; i < n; ++i) {
    keys.push_back("r" + std::to_string(i));
    truth.push_back(i % 10 == 0 ? I : E);
  }
  // Each deviating record is flipped in exactly one run.
  std::vector<std::size_t> flip_run(n, SIZE_MAX);
  std::size_t fp = 0;
  std::size_t fn = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (truth[i] == I && fn < 4) {
      flip_run[i] = fn++ % 10;
    } else if (truth[i] == E && fp < 191) {
      flip_run[i] = fp++ % 10;
    }
  }
  RunSeries s;
  s.name = "llm";
  for (std::size_t run = 0; run < 10; ++run) {
    std::vector<Decision> pred = truth;
    for (std::size_t i = 0; i < n; ++i) {
      if (flip_run[i] == run) pred[i] = flip(pred[i]);
    }
    s.runs.push_back(make_run("run-" + std::to_string(run), run, keys, truth, pred));
  }
  return s;
}

TEST(Consistency, CensusAndKappa) {
  const auto s = census_series();
  const auto rep = consistency_report(s);
  EXPECT_EQ(rep.runs, 10u);
  EXPECT_EQ(rep.census.records, 1089u);
  EXPECT_EQ(rep.census.fn_direction, 4u);
  EXPECT_EQ(rep.census.deviating, rep.census.fp_direction + rep.census.fn_direction);
  EXPECT_EQ(rep.census.deviating, 195u);
  EXPECT_EQ(std::lround(rep.census.fraction() * 100), 18);

  std::vector<std::vector<Decision>> votes(1089);
  for (const auto& r : s.runs) {
    for (std::size_t i = 0; i < r.keys.size(); ++i) votes[i].push_back(r.predicted[i]);
  }
  EXPECT_DOUBLE_EQ(rep.agreement.kappa, fleiss_kappa(votes).kappa);
  EXPECT_EQ(rep.agreement.band, AgreementBand::AlmostPerfect);
  ASSERT_EQ(rep.dispersion.size(), 7u);
  EXPECT_EQ(rep.dispersion[0].defined_runs, 10u);
}

TEST(Consistency, RunOrderWithinRecordsDoesNotMatter) {
  auto s = census_series();
  auto& r = s.runs[5];
  std::reverse(r.keys.begin(), r.keys.end());
  std::reverse(r.truth.begin(), r.truth.end());
  std::reverse(r.predicted.begin(), r.predicted.end());
  EXPECT_DOUBLE_EQ(consistency_report(s).agreement.kappa, consistency_report(census_series()).agreement.kappa);
}

TEST(Consistency, RejectsMismatchedSeries) {
  RunSeries one;
  one.runs.push_back(make_run("a", 0, {"x", "y"}, {I, E}, {I, E}));
  EXPECT_THROW(consistency_report(one), DataError);
  auto two = one;
  two.runs.push_back(make_run("b", 0, {"x", "z"}, {I, E}, {I, E}));
  EXPECT_THROW(consistency_report(two), DataError);
  auto truth = one;
  truth.runs.push_back(make_run("b", 0, {"x", "y"}, {E, E}, {I, E}));
  EXPECT_THROW(consistency_report(truth), DataError);
  EXPECT_THROW(make_run("c", 0, {"x"}, {I, E}, {I}), DataError);
}

std::vector<DatasetRow> published_rows() {
  std::vector<DatasetRow> rows;
  for (const auto& p : testing::kAcrossDatasetRows) {
    MetricsReport m;
    m.recall = p.rec;
    m.precision = p.prec;
    m.specificity = p.spec;
    m.npv = p.npv;
    m.balanced_accuracy = p.bacc;
    m.f2 = p.f2;
    m.mcc_normalized = p.mcc;
    rows.push_back({std::string(p.dataset), m});
  }
  return rows;
}

TEST(Aggregate, AcrossDatasetSummary) {
  const auto t = aggregate_generalizability(published_rows());
  ASSERT_EQ(t.summary.size(), 7u);
  const auto& bacc = t.summary[4];
  EXPECT_EQ(bacc.metric, MetricId::BalancedAccuracy);
  EXPECT_EQ(bacc.defined_runs, 5u);
  EXPECT_NEAR(*bacc.stats.mean, 0.703, 0.0005);
  EXPECT_NEAR(*bacc.stats.std_dev, 0.059, 0.0005);
  EXPECT_NEAR(*bacc.stats.median, 0.701, 1e-12);
  EXPECT_THROW(aggregate_generalizability({published_rows().front()}), DataError);
  const auto back = aggregate_from_json(to_json(t));
  EXPECT_EQ(to_json(back).dump(), to_json(t).dump());
}

ReportArtifacts sample_artifacts() {
  ReportArtifacts a;
  a.title = "Sample";
  a.metrics.push_back({"llm", metrics_report({8, 80, 10, 2})});
  a.metrics.push_back({"empty", metrics_report({0, 0, 0, 0})});
  auto s = census_series();
  s.runs.resize(3);
  a.consistency = consistency_report(s);
  a.series = std::move(s);
  a.effort.push_back({"llm", effort_from_wss(1089, 0.644)});
  a.effort.push_back({"random", effort_from_wss(875, -0.019)});
  a.cost.push_back({"llm", cost_report(a.effort.front().value, Decimal::parse("343.728"), Decimal::parse("0.002"))});
  a.aggregate = aggregate_generalizability(published_rows());
  return a;
}

TEST(Render, JsonRoundTripAndDeterminism) {
  const auto a = sample_artifacts();
  const std::string json = render_report(a, ReportFormat::Json);
  const auto back = artifacts_from_json(nlohmann::ordered_json::parse(json));
  EXPECT_EQ(render_report(back, ReportFormat::Json), json);
  for (auto f : {ReportFormat::Markdown, ReportFormat::Csv, ReportFormat::Json}) {
    EXPECT_EQ(render_report(back, f), render_report(a, f));
    EXPECT_EQ(render_report(sample_artifacts(), f), render_report(a, f));
  }
}

TEST(Render, MarkdownContent) {
  const std::string md = render_report(sample_artifacts(), "markdown");
  EXPECT_NE(md.find("# Sample"), std::string::npos);
  EXPECT_NE(md.find("| llm | 0.800 | 0.444 | 0.889 | 0.976 | 0.844 | 0.690 |"), std::string::npos) << md;
  EXPECT_NE(md.find("\xE2\x80\x94"), std::string::npos);  // undefined cells
  EXPECT_NE(md.find("| Kurtosis |"), std::string::npos);
  EXPECT_NE(md.find("N/A"), std::string::npos);  // negative WSS
  EXPECT_NE(md.find("133366"), std::string::npos);
  EXPECT_NE(md.find("2.275"), std::string::npos);
}

TEST(Render, CsvSections) {
  const std::string csv = render_report(sample_artifacts(), "csv");
  EXPECT_EQ(csv.rfind("section,", 0), 0u);
  EXPECT_NE(csv.find("\n\nsection,"), std::string::npos);
  EXPECT_NE(csv.find("0.80000000000000004"), std::string::npos);
  EXPECT_THROW(render_report(sample_artifacts(), "xml"), UsageError);
}

TEST(Series, JsonRoundTrip) {
  auto s = census_series();
  s.runs.resize(2);
  s.runs[0].tokens = 12345;
  const auto back = series_from_json(to_json(s));
  EXPECT_EQ(to_json(back).dump(), to_json(s).dump());
  EXPECT_EQ(back.runs[0].confusion, s.runs[0].confusion);
  EXPECT_DOUBLE_EQ(back.runs[0].mean_tokens_per_paper(), 12345.0 / 1089.0);
}

}  // namespace
}  // namespace screenkit::analysis
