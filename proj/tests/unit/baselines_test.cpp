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
#include <set>

#include <gtest/gtest.h>

#include "screenkit/baselines/classifiers.hpp"
#include "screenkit/baselines/grid_search.hpp"
#include "screenkit/baselines/serialize.hpp"
#include "screenkit/baselines/word2vec.hpp"
#include "screenkit/metrics.hpp"
#include "support/synthetic_corpus.hpp"

namespace screenkit::baselines {
namespace {

constexpr auto I = Decision::Include;
constexpr auto E = Decision::Exclude;

std::vector<std::vector<std::string>> topic_documents(std::size_t n, std::uint64_t seed) {
  std::vector<std::vector<std::string>> docs;
  for (const auto& r : testing::separable_corpus(n, 0.5, seed).records) docs.push_back(document_tokens(r));
  return docs;
}

Word2VecConfig small_config(std::uint64_t seed) {
  Word2VecConfig c;
  c.dimension = 24;
  c.epochs = 10;
  c.seed = seed;
  return c;
}

TEST(Word2Vec, SameSeedSameVectors) {
  const auto docs = topic_documents(120, 1);
  const auto a = train_word2vec(docs, small_config(3));
  const auto b = train_word2vec(docs, small_config(3));
  const auto c = train_word2vec(docs, small_config(4));
  EXPECT_EQ(a.words, b.words);
  EXPECT_EQ(a.vectors, b.vectors);
  EXPECT_NE(a.vectors, c.vectors);
  EXPECT_EQ(a.vectors.size(), a.size() * 24);
}

TEST(Word2Vec, VocabularyOrderAndMinCount) {
  const std::vector<std::vector<std::string>> docs{{"b", "a", "a", "c", "b", "a", "rare"}, {"c", "b", "a"}};
  auto cfg = small_config(1);
  cfg.subsample = 0.0;
  const auto m = train_word2vec(docs, cfg);
  // Count descending, ties lexicographic; "rare" is below min_count.
  EXPECT_EQ(m.words, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(m.find("rare"), nullptr);
  EXPECT_THROW(train_word2vec(std::vector<std::vector<std::string>>{}, cfg), DataError);
  EXPECT_THROW(train_word2vec(std::vector<std::vector<std::string>>{{"only", "once"}}, cfg), DataError);
}

TEST(Word2Vec, CooccurringWordsAreCloserAcrossSeeds) {
  const auto docs = topic_documents(300, 2);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto m = train_word2vec(docs, small_config(seed));
    auto vec = [&](const char* w) {
      const double* p = m.find(w);
      EXPECT_NE(p, nullptr) << w;
      return std::span<const double>(p, m.dimension());
    };
    const double same = cosine(vec("reward"), vec("policy"));
    const double cross = cosine(vec("reward"), vec("database"));
    EXPECT_GT(same, cross) << "seed " << seed;
  }
}

TEST(Word2Vec, MeanPoolingOfTwoTokensIsTheMidpoint) {
  const auto m = train_word2vec(topic_documents(100, 3), small_config(1));
  const double* a = m.find("reward");
  const double* b = m.find("database");
  ASSERT_TRUE(a && b);
  bool oov = true;
  const auto v = embed_tokens({"reward", "unknownword", "database"}, m, &oov);
  EXPECT_FALSE(oov);
  for (std::size_t d = 0; d < m.dimension(); ++d) EXPECT_DOUBLE_EQ(v[d], (a[d] + b[d]) / 2.0);
}

TEST(Word2Vec, AllOutOfVocabularyDocumentIsZeroAndFlagged) {
  const auto m = train_word2vec(topic_documents(100, 3), small_config(1));
  Corpus c;
  ScreeningRecord r;
  r.key = "x";
  r.title = "zzz";
  r.abstract = "qqq www";
  c.records.push_back(r);
  const auto fs = featurize(c, m);
  ASSERT_EQ(fs.vectors.size(), 1u);
  EXPECT_TRUE(fs.all_oov[0]);
  for (double x : fs.vectors[0]) EXPECT_EQ(x, 0.0);
  EXPECT_THROW(featurize(c, m, m.dimension() + 1), DataError);
}

TEST(Cosine, Basics) {
  const std::vector<double> a{1, 0};
  const std::vector<double> b{0, 2};
  const std::vector<double> z{0, 0};
  EXPECT_DOUBLE_EQ(cosine(a, a), 1.0);
  EXPECT_DOUBLE_EQ(cosine(a, b), 0.0);
  EXPECT_EQ(cosine(a, z), 0.0);
}

TEST(ComplementNaiveBayes, FourDocumentHandOracle) {
  // Include counts per feature: [3, 1]; exclude counts: [0, 4]; alpha 1.
  // Include scores against the exclude complement [1, 5] / 6, exclude
  // against [4, 2] / 6. For x = [1, 0]: jll1 - jll0 = log 6 - log 1.5 =
  // log 4, so the score is 4 / 5. For x = [0, 1]: log(6/5) - log 3 =
  // log 0.4, score 2 / 7.
  const FeatureMatrix x{{2, 0}, {1, 1}, {0, 3}, {0, 1}};
  const std::vector<Decision> y{I, I, E, E};
  const auto clf = fit(ClassifierKind::ComplementNaiveBayes, {{"alpha", 1.0}}, x, y);
  const auto s = clf.scores({{1, 0}, {0, 1}});
  EXPECT_NEAR(s[0], 0.8, 1e-12);
  EXPECT_NEAR(s[1], 2.0 / 7.0, 1e-12);
  EXPECT_EQ(clf.predict({{1, 0}, {0, 1}}), (std::vector<Decision>{I, E}));
}

TEST(ComplementNaiveBayes, NegativeFeaturesAreShifted) {
  const FeatureMatrix x{{-1, 0.5}, {-0.5, 0.2}, {0.4, -0.3}, {0.6, -0.1}};
  const std::vector<Decision> y{I, I, E, E};
  const auto clf = fit(ClassifierKind::ComplementNaiveBayes, {}, x, y);
  const auto& st = std::get<CnbState>(clf.parameters);
  EXPECT_DOUBLE_EQ(st.offset[0], 1.0);
  EXPECT_DOUBLE_EQ(st.offset[1], 0.3);
  EXPECT_EQ(clf.predict(x), y);
}

TEST(LogisticRegression, SeparatesSeparableData) {
  FeatureMatrix x;
  std::vector<Decision> y;
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(-1, 1);
    const double b = rng.uniform(-1, 1);
    if (std::abs(a + b) < 0.1) continue;
    x.push_back({a, b});
    y.push_back(a + b > 0 ? I : E);
  }
  for (const char* penalty : {"l2", "none"}) {
    const auto clf = fit(ClassifierKind::LogisticRegression, {{"penalty", penalty}, {"C", 100.0}}, x, y);
    EXPECT_EQ(clf.predict(x), y) << penalty;
    const auto& w = std::get<LinearState>(clf.parameters).weights;
    EXPECT_NEAR(w[0] / w[1], 1.0, 0.2);
  }
  EXPECT_THROW(fit(ClassifierKind::LogisticRegression, {{"penalty", "l1"}}, x, y), UsageError);
}

TEST(LinearSvc, SeparatesAndRejectsOtherKernels) {
  const FeatureMatrix x{{0, 0}, {0, 1}, {3, 3}, {3, 4}, {0.5, 0}, {4, 3}};
  const std::vector<Decision> y{E, E, I, I, E, I};
  const auto clf = fit(ClassifierKind::LinearSVC, {{"C", 1.0}}, x, y, 7);
  EXPECT_EQ(clf.predict(x), y);
  EXPECT_EQ(fit(ClassifierKind::LinearSVC, {{"loss", "hinge"}}, x, y, 7).predict(x), y);
  EXPECT_THROW(fit(ClassifierKind::LinearSVC, {{"kernel", "rbf"}}, x, y), UsageError);
}

TEST(RandomForest, FitsAxisAlignedSplitAndIsSeeded) {
  FeatureMatrix x;
  std::vector<Decision> y;
  for (int i = 0; i < 40; ++i) {
    x.push_back({static_cast<double>(i), static_cast<double>(i % 7)});
    y.push_back(i >= 20 ? I : E);
  }
  const Hyperparameters h{{"n_estimators", 15}, {"max_features", nullptr}};
  const auto a = fit(ClassifierKind::RandomForest, h, x, y, 5);
  EXPECT_EQ(a.predict(x), y);
  EXPECT_EQ(a.scores(x), fit(ClassifierKind::RandomForest, h, x, y, 5).scores(x));
  EXPECT_EQ(detail::forest_params({{"max_features", "log2"}}, 100).max_features, 6u);
  EXPECT_EQ(detail::forest_params({}, 100).max_features, 10u);
  EXPECT_EQ(detail::forest_params({{"max_features", 0.25}}, 100).max_features, 25u);
  EXPECT_THROW(detail::forest_params({{"min_samples_split", 1}}, 4), UsageError);
}

TEST(RandomClassifier, NormalizedMccCentersOnHalf) {
  const FeatureMatrix train{{0}, {1}};
  const std::vector<Decision> train_y{I, E};
  Rng rng(1);
  FeatureMatrix test(200, FeatureVector{0.0});
  std::vector<Decision> truth;
  for (std::size_t i = 0; i < test.size(); ++i) truth.push_back(rng.bernoulli(0.3) ? I : E);
  double sum = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto pred = train_and_predict(ClassifierKind::Random, {}, train, train_y, test, seed);
    sum += mcc_normalized(confusion_from_pairs(truth, pred)).value_or(0.5);
  }
  EXPECT_NEAR(sum / 100.0, 0.5, 0.02);
}

TEST(Classifiers, InputValidation) {
  EXPECT_THROW(fit(ClassifierKind::LogisticRegression, {}, {{1}, {2}}, std::vector<Decision>{I, I}), DataError);
  EXPECT_THROW(fit(ClassifierKind::LogisticRegression, {}, {{1}, {2, 3}}, std::vector<Decision>{I, E}),
               DataError);
  EXPECT_THROW(fit(ClassifierKind::LogisticRegression, {}, {{1}}, std::vector<Decision>{I, E}), DataError);
  const auto clf = fit(ClassifierKind::LogisticRegression, {}, {{1}, {2}}, std::vector<Decision>{I, E});
  EXPECT_THROW(clf.predict({{1, 2}}), DataError);
  EXPECT_EQ(classifier_kind_from_string("cnb"), ClassifierKind::ComplementNaiveBayes);
  EXPECT_THROW(classifier_kind_from_string("knn"), UsageError);
}

TEST(GridSearch, StratifiedFoldsHoldBothClasses) {
  std::vector<Decision> y;
  for (int i = 0; i < 53; ++i) y.push_back(i % 5 == 0 ? I : E);
  Rng rng(3);
  const auto folds = stratified_folds(y, 5, rng);
  std::vector<std::array<int, 2>> counts(5, {0, 0});
  for (std::size_t i = 0; i < y.size(); ++i) ++counts[folds[i]][to_int(y[i])];
  for (const auto& c : counts) {
    EXPECT_GE(c[0], 8);
    EXPECT_GE(c[1], 2);
    EXPECT_LE(c[1], 3);
  }
  std::vector<Decision> few{I, I, E, E, E, E, E};
  try {
    stratified_folds(few, 5, rng);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("at least 5 examples of each class"), std::string::npos);
  }
}

struct Split {
  FeatureMatrix x;
  std::vector<Decision> y;
};

Split features(std::size_t n, std::uint64_t seed) {
  const Corpus c = testing::separable_corpus(n, 0.3, seed);
  const auto m = train_word2vec(c, small_config(seed));
  return {featurize(c, m).vectors, labels_of(c)};
}

TEST(GridSearch, SingletonGridReturnsItsOnlyCandidate) {
  const auto data = features(120, 1);
  const ParamGrid grid{{{"C", {0.5}}, {"penalty", {"l2"}}}};
  const auto r = grid_search_cv(ClassifierKind::LogisticRegression, grid, data.x, data.y);
  EXPECT_EQ(r.best_hyperparameters, (Hyperparameters{{"C", 0.5}, {"penalty", "l2"}}));
  EXPECT_EQ(r.candidates.size(), 1u);
  EXPECT_EQ(r.fold_scores.size(), 10u);  // 5 folds x 2 repeats
}

TEST(GridSearch, FullGridMatchesExhaustiveEvaluation) {
  const auto data = features(150, 2);
  const ParamGrid grid{{{"alpha", detail::json_values(logspace(-3, 3, 7))}}};
  SearchOptions opt;
  opt.n_iter = 50;
  opt.seed = 11;
  const auto r = grid_search_cv(ClassifierKind::ComplementNaiveBayes, grid, data.x, data.y, opt);
  ASSERT_EQ(r.candidates.size(), 7u);

  Rng rng(opt.seed);
  std::vector<std::vector<std::size_t>> fold_sets;
  for (std::size_t k = 0; k < opt.repeats; ++k) fold_sets.push_back(stratified_folds(data.y, opt.folds, rng));
  double best = -1;
  Hyperparameters best_h;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto cs = evaluate_candidate(ClassifierKind::ComplementNaiveBayes, grid.candidate(i), data.x, data.y,
                                       fold_sets, opt.folds, opt.seed);
    if (cs.mean_score > best) {
      best = cs.mean_score;
      best_h = cs.hyperparameters;
    }
  }
  EXPECT_EQ(r.mean_score, best);
  EXPECT_EQ(r.best_hyperparameters, best_h);
}

TEST(GridSearch, RandomizedSubsetIsDistinctAndSeeded) {
  Rng a(5);
  Rng b(5);
  const auto pa = sample_candidates(100, 10, a);
  EXPECT_EQ(pa, sample_candidates(100, 10, b));
  EXPECT_EQ(std::set<std::size_t>(pa.begin(), pa.end()).size(), 10u);
  Rng c(1);
  EXPECT_EQ(sample_candidates(3, 10, c), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(GridSearch, DefaultGrids) {
  const auto lr = default_grid(ClassifierKind::LogisticRegression);
  EXPECT_EQ(lr.size(), 2u * 7u * 6u);
  const auto rf = default_grid(ClassifierKind::RandomForest);
  EXPECT_EQ(rf.size(), 4u * 2u * 3u * 3u * 4u);
  const auto cnb = default_grid(ClassifierKind::ComplementNaiveBayes);
  ASSERT_EQ(cnb.size(), 7u);
  EXPECT_DOUBLE_EQ(cnb.candidate(0)["alpha"].get<double>(), 1e-3);
  EXPECT_DOUBLE_EQ(cnb.candidate(6)["alpha"].get<double>(), 1e3);
  // Last axis varies fastest.
  EXPECT_EQ(lr.candidate(1)["solver"], "liblinear");
  EXPECT_TRUE(lr.candidate(0)["penalty"].is_null());

  const auto g = grid_from_json(nlohmann::ordered_json::parse(R"j({"alpha": "logspace(-1, 1, 3)"})j"));
  ASSERT_EQ(g.size(), 3u);
  EXPECT_DOUBLE_EQ(g.candidate(2)["alpha"].get<double>(), 10.0);
  EXPECT_THROW(grid_from_json(nlohmann::ordered_json::parse(R"({"alpha": []})")), UsageError);
  const auto cfg = grid_config_from_json(nlohmann::ordered_json::parse(R"({"svc": {"C": [1]}})"));
  EXPECT_EQ(cfg.at(ClassifierKind::LinearSVC).size(), 1u);
  EXPECT_EQ(cfg.at(ClassifierKind::RandomForest).size(), rf.size());
}

TEST(Serialize, EmbeddingRoundTrip) {
  const auto m = train_word2vec(topic_documents(60, 1), small_config(2));
  const std::string bytes = serialize(m);
  EXPECT_EQ(bytes.substr(0, 8), std::string("SKMODEL\0", 8));
  const auto back = deserialize_embedding(bytes);
  EXPECT_EQ(back.words, m.words);
  EXPECT_EQ(back.vectors, m.vectors);
  EXPECT_EQ(back.config.seed, m.config.seed);
  EXPECT_NE(back.find("reward"), nullptr);
  EXPECT_EQ(serialize(back), bytes);
}

TEST(Serialize, EveryClassifierRoundTripsToIdenticalScores) {
  const auto data = features(100, 3);
  for (auto kind : kClassifierKinds) {
    Hyperparameters h = Hyperparameters::object();
    if (kind == ClassifierKind::RandomForest) h = {{"n_estimators", 5}};
    const auto clf = fit(kind, h, data.x, data.y, 9);
    const auto back = deserialize_classifier(serialize(clf));
    EXPECT_EQ(back.kind, kind);
    EXPECT_EQ(back.hyperparameters, clf.hyperparameters);
    EXPECT_EQ(back.scores(data.x), clf.scores(data.x)) << to_string(kind);
  }
}

TEST(Serialize, RejectsForeignAndTruncatedData) {
  const auto data = features(60, 4);
  const std::string bytes = serialize(fit(ClassifierKind::LogisticRegression, {}, data.x, data.y));
  EXPECT_THROW(deserialize_classifier("garbage"), DataError);
  EXPECT_THROW(deserialize_classifier(bytes.substr(0, bytes.size() - 5)), DataError);
  EXPECT_THROW(deserialize_embedding(bytes), DataError);
}

}  // namespace
}  // namespace screenkit::baselines
