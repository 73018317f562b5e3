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


#include <map>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "screenkit/corpus.hpp"

namespace screenkit {
namespace {

constexpr std::string_view kCanonicalCsv =
    "project,key,title,abstract,doi,decision,exclusion_criteria,reviewers,conflict,venue\n"
    "RL4SE,a1,Plain title,Plain abstract,10.1/x,include,,2,false,ICSE\n"
    "RL4SE,a2,\"Title, with comma\",\"Line one\nline two\",,exclude,EC1;EC3,3,true,\n"
    "RL4SE,a3,\"Quoted \"\"word\"\"\",Caf\xc3\xa9 \\& co,,,,0,false,FSE\n";

TEST(CorpusCsv, RoundTripIsByteIdentical) {
  const Corpus c = parse_corpus(kCanonicalCsv, CorpusFormat::Csv);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(serialize_csv(c), kCanonicalCsv);

  const auto& r = c.records[1];
  EXPECT_EQ(r.title, "Title, with comma");
  EXPECT_EQ(r.abstract, "Line one\nline two");
  EXPECT_EQ(r.decision, Decision::Exclude);
  EXPECT_EQ(r.exclusion_criteria, (std::vector<std::string>{"EC1", "EC3"}));
  EXPECT_EQ(r.reviewers, 3);
  EXPECT_TRUE(r.conflict);
  EXPECT_FALSE(r.doi);
  EXPECT_EQ(c.records[0].extras["venue"], "ICSE");
  // Pending decisions stay empty and are written back as an empty cell.
  EXPECT_FALSE(c.records[2].decision);
}

TEST(CorpusCsv, JsonlRoundTripPreservesRecords) {
  const Corpus c = parse_corpus(kCanonicalCsv, CorpusFormat::Csv);
  const std::string jsonl = serialize_jsonl(c);
  const Corpus back = parse_corpus(jsonl, CorpusFormat::Jsonl);
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(back.records[i], c.records[i]);
  EXPECT_EQ(serialize_jsonl(back), jsonl);
}

TEST(CorpusCsv, MissingRequiredColumnIsSchemaError) {
  try {
    parse_corpus("project,key,title,decision\nA,k,t,include\n", CorpusFormat::Csv);
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.field(), "abstract");
  }
}

TEST(CorpusCsv, ErrorsCarryRowNumbers) {
  const std::string bad = "project,key,title,abstract,decision\nA,k1,t,a,include\nA,k2,t,a,maybe\n";
  try {
    parse_corpus(bad, CorpusFormat::Csv);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3u);
  }
  EXPECT_THROW(parse_corpus("project,key,title,abstract,decision\nA,k,t\n", CorpusFormat::Csv), ParseError);
  EXPECT_THROW(parse_corpus("project,key,title,abstract,decision\nA,k,\"t,a,include\n", CorpusFormat::Csv),
               ParseError);
  EXPECT_THROW(parse_corpus("\xff\xfe", CorpusFormat::Csv), DataError);
}

TEST(CorpusJsonl, AcceptsNumericAndNullDecisions) {
  const std::string src =
      "{\"project\":\"P\",\"key\":\"a\",\"title\":\"t\",\"abstract\":\"x\",\"decision\":1}\n"
      "{\"project\":\"P\",\"key\":\"b\",\"title\":\"t\",\"abstract\":\"x\",\"decision\":\"0\"}\n"
      "\n"
      "{\"project\":\"P\",\"key\":\"c\",\"title\":\"t\",\"abstract\":\"x\",\"decision\":null}\n";
  const Corpus c = parse_corpus(src, CorpusFormat::Jsonl);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c.records[0].decision, Decision::Include);
  EXPECT_EQ(c.records[1].decision, Decision::Exclude);
  EXPECT_FALSE(c.records[2].decision);
  try {
    parse_corpus("{\"project\":\"P\"}\n{bad\n", CorpusFormat::Jsonl);
    FAIL();
  } catch (const DataError&) {
  }
}

ScreeningRecord make(std::string key, std::string title, std::string abstract,
                     std::optional<Decision> d) {
  ScreeningRecord r;
  r.project = "P";
  r.key = std::move(key);
  r.title = std::move(title);
  r.abstract = std::move(abstract);
  r.decision = d;
  return r;
}

TEST(CorpusFilter, DropsIncompleteAndDuplicateRecordsAndIsIdempotent) {
  Corpus c;
  c.records = {
      make("a", "t", "abs", Decision::Include),
      make("b", "t", "  ", Decision::Exclude),
      make("c", "", "abs", Decision::Exclude),
      make("d", "t", "abs", std::nullopt),
      make("a", "t2", "abs2", Decision::Exclude),
      make("e", "t", "abs", Decision::Exclude),
  };
  const auto [kept, log] = filter_records(c);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept.records[0].title, "t");  // first occurrence wins
  EXPECT_EQ(kept.records[1].key, "e");
  ASSERT_EQ(log.dropped.size(), 4u);
  EXPECT_EQ(log.dropped[0].reason, "missing abstract");
  EXPECT_EQ(log.dropped[1].reason, "missing title");
  EXPECT_EQ(log.dropped[2].reason, "missing decision");
  EXPECT_EQ(log.dropped[3].reason, "duplicate key");
  EXPECT_EQ(log.dropped[3].index, 4u);

  const auto [again, log2] = filter_records(kept);
  EXPECT_TRUE(log2.empty());
  EXPECT_EQ(serialize_jsonl(again), serialize_jsonl(kept));
}

Corpus synthetic(std::size_t n, std::size_t included) {
  Corpus c;
  for (std::size_t i = 0; i < n; ++i) {
    c.records.push_back(make("k" + std::to_string(i), "t", "a",
                             i < included ? Decision::Include : Decision::Exclude));
  }
  return c;
}

TEST(CorpusProfile, CountsAndRatios) {
  Corpus c = synthetic(10, 3);
  c.records[0].conflict = true;
  const auto p = profile(c);
  EXPECT_EQ(p.size, 10u);
  EXPECT_EQ(p.included, 3u);
  EXPECT_EQ(p.excluded, 7u);
  EXPECT_DOUBLE_EQ(p.inclusion_ratio, 0.3);
  EXPECT_EQ(p.conflicts, 1u);
  EXPECT_THROW(profile(Corpus{}), DataError);
}

TEST(CorpusSplit, SizesPartitionAndClampForSmallCorpora) {
  for (std::size_t n = 2; n <= 10; ++n) {
    for (double f : {0.01, 0.2, 0.5, 0.8, 0.99}) {
      const Corpus c = synthetic(n, n / 2);
      const auto [train, test] = split_train_test(c, f, 42);
      ASSERT_GE(train.size(), 1u);
      ASSERT_GE(test.size(), 1u);
      EXPECT_EQ(train.size() + test.size(), n);
      const std::size_t expect = std::clamp<std::size_t>(
          static_cast<std::size_t>(std::floor(f * static_cast<double>(n) + 0.5 + 1e-9)), 1, n - 1);
      EXPECT_EQ(train.size(), expect) << "n=" << n << " f=" << f;
      std::set<std::string> keys;
      for (const auto& r : train.records) keys.insert(r.key);
      for (const auto& r : test.records) EXPECT_TRUE(keys.insert(r.key).second);
      EXPECT_EQ(keys.size(), n);
    }
  }
  EXPECT_THROW(split_train_test(synthetic(1, 1), 0.5, 1), DataError);
  EXPECT_THROW(split_train_test(synthetic(5, 1), 1.0, 1), UsageError);
}

TEST(CorpusSplit, SameSeedSameSplit) {
  const Corpus c = synthetic(50, 10);
  const auto a = split_train_test(c, 0.8, 9);
  const auto b = split_train_test(c, 0.8, 9);
  const auto d = split_train_test(c, 0.8, 10);
  EXPECT_EQ(serialize_jsonl(a.first), serialize_jsonl(b.first));
  EXPECT_NE(serialize_jsonl(a.first), serialize_jsonl(d.first));
}

TEST(CorpusSample, ExactStratumCountsKeepOrder) {
  const Corpus c = synthetic(100, 20);
  const Corpus s = sample_stratified(c, 30, 0.15, 3);
  const auto p = profile(s);
  EXPECT_EQ(p.size, 30u);
  EXPECT_EQ(p.included, 5u);  // round(4.5) half up
  for (std::size_t i = 1; i < s.size(); ++i) {
    EXPECT_LT(std::stoi(s.records[i - 1].key.substr(1)), std::stoi(s.records[i].key.substr(1)));
  }
  EXPECT_EQ(serialize_jsonl(sample_stratified(c, 30, 0.15, 3)), serialize_jsonl(s));
}

TEST(CorpusSample, ShortStratumNamesShortfall) {
  const Corpus c = synthetic(20, 2);
  try {
    sample_stratified(c, 10, 0.5, 1);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("short by 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(sample_stratified(c, 10, 1.5, 1), UsageError);
}

TEST(CorpusSample, DrawsAreRoughlyUniform) {
  const Corpus c = synthetic(10, 0);
  std::map<std::string, int> hits;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    for (const auto& r : sample_stratified(c, 3, 0.0, seed).records) ++hits[r.key];
  }
  ASSERT_EQ(hits.size(), 10u);
  for (const auto& [key, n] : hits) EXPECT_NEAR(n, 600, 90) << key;
}

}  // namespace
}  // namespace screenkit
