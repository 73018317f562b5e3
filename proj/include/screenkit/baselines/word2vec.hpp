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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "screenkit/corpus.hpp"
#include "screenkit/error.hpp"
#include "screenkit/rng.hpp"
#include "screenkit/text.hpp"

namespace screenkit::baselines {

using FeatureVector = std::vector<double>;

struct Word2VecConfig {
  std::size_t dimension = 100;
  std::size_t window = 5;
  std::size_t negative = 5;
  std::size_t epochs = 15;
  std::size_t min_count = 2;
  // Training refuses corpora whose vocabulary (after min_count) is smaller.
  std::size_t min_vocab = 2;
  double learning_rate = 0.025;
  double min_learning_rate = 0.0001;
  // Frequent-word downsampling threshold; 0 disables it.
  double subsample = 1e-3;
  std::uint64_t seed = 1;

  nlohmann::json to_json() const {
    return {{"dimension", dimension}, {"window", window},       {"negative", negative},
            {"epochs", epochs},       {"min_count", min_count}, {"min_vocab", min_vocab},
            {"learning_rate", learning_rate}, {"min_learning_rate", min_learning_rate},
            {"subsample", subsample}, {"seed", seed}};
  }

  static Word2VecConfig from_json(const nlohmann::json& j) {
    Word2VecConfig c;
    c.dimension = j.value("dimension", c.dimension);
    c.window = j.value("window", c.window);
    c.negative = j.value("negative", c.negative);
    c.epochs = j.value("epochs", c.epochs);
    c.min_count = j.value("min_count", c.min_count);
    c.min_vocab = j.value("min_vocab", c.min_vocab);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.min_learning_rate = j.value("min_learning_rate", c.min_learning_rate);
    c.subsample = j.value("subsample", c.subsample);
    c.seed = j.value("seed", c.seed);
    return c;
  }
};

struct EmbeddingModel {
  Word2VecConfig config;
  std::vector<std::string> words;  // index -> token
  std::unordered_map<std::string, std::size_t> vocabulary;
  std::vector<double> vectors;  // words.size() x config.dimension, row-major

  std::size_t dimension() const noexcept { return config.dimension; }
  std::size_t size() const noexcept { return words.size(); }

  std::span<const double> vector(std::size_t index) const {
    return {vectors.data() + index * config.dimension, config.dimension};
  }

  const double* find(const std::string& token) const {
    const auto it = vocabulary.find(token);
    return it == vocabulary.end() ? nullptr : vectors.data() + it->second * config.dimension;
  }

  void check() const {
    if (config.dimension < 1) throw DataError("embedding dimension must be at least 1");
    if (vectors.size() != words.size() * config.dimension || vocabulary.size() != words.size()) {
      throw DataError("embedding model is inconsistent: " + std::to_string(words.size()) + " words, " +
                      std::to_string(vectors.size()) + " vector entries");
    }
  }

  void rebuild_index() {
    vocabulary.clear();
    for (std::size_t i = 0; i < words.size(); ++i) vocabulary.emplace(words[i], i);
  }
};

inline double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Tokens of the text a document contributes: title followed by abstract.
inline std::vector<std::string> document_tokens(const ScreeningRecord& r) {
  auto tokens = text::tokenize(r.title);
  auto rest = text::tokenize(r.abstract);
  tokens.insert(tokens.end(), std::make_move_iterator(rest.begin()), std::make_move_iterator(rest.end()));
  return tokens;
}

// Skip-gram with negative sampling, single-threaded so that a fixed seed
// reproduces the vectors exactly.
inline EmbeddingModel train_word2vec(const std::vector<std::vector<std::string>>& documents,
                                     const Word2VecConfig& config) {
  if (config.dimension < 1) throw UsageError("embedding dimension must be at least 1");
  if (config.window < 1) throw UsageError("window must be at least 1");

  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& doc : documents) {
    for (const auto& t : doc) ++counts[t];
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [w, c] : counts) {
    if (c >= config.min_count) kept.emplace_back(w, c);
  }
  if (kept.size() < std::max<std::size_t>(config.min_vocab, 1)) {
    throw DataError("vocabulary too small: " + std::to_string(kept.size()) + " tokens with count >= " +
                    std::to_string(config.min_count) + ", need " + std::to_string(config.min_vocab));
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  EmbeddingModel model;
  model.config = config;
  std::vector<std::uint64_t> freq;
  for (auto& [w, c] : kept) {
    model.words.push_back(w);
    freq.push_back(c);
  }
  model.rebuild_index();
  const std::size_t vocab = model.words.size();
  const std::size_t dim = config.dimension;

  // Documents as index sequences, out-of-vocabulary tokens removed.
  std::vector<std::vector<std::uint32_t>> docs;
  std::uint64_t total_words = 0;
  for (const auto& doc : documents) {
    std::vector<std::uint32_t> ids;
    for (const auto& t : doc) {
      if (auto it = model.vocabulary.find(t); it != model.vocabulary.end()) {
        ids.push_back(static_cast<std::uint32_t>(it->second));
      }
    }
    total_words += ids.size();
    docs.push_back(std::move(ids));
  }

  // Negative-sampling distribution: unigram counts raised to 0.75.
  std::vector<double> cumulative(vocab);
  double acc = 0.0;
  for (std::size_t i = 0; i < vocab; ++i) {
    acc += std::pow(static_cast<double>(freq[i]), 0.75);
    cumulative[i] = acc;
  }
  for (auto& c : cumulative) c /= acc;

  std::vector<double> keep_prob(vocab, 1.0);
  if (config.subsample > 0.0) {
    const double threshold = config.subsample * static_cast<double>(total_words);
    for (std::size_t i = 0; i < vocab; ++i) {
      const double f = static_cast<double>(freq[i]);
      keep_prob[i] = std::min(1.0, (std::sqrt(f / threshold) + 1.0) * threshold / f);
    }
  }

  Rng rng(config.seed);
  model.vectors.resize(vocab * dim);
  for (auto& v : model.vectors) v = (rng.uniform() - 0.5) / static_cast<double>(dim);
  std::vector<double> context_out(vocab * dim, 0.0);
  std::vector<double> grad(dim);

  auto sample_negative = [&] {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                                             static_cast<std::ptrdiff_t>(vocab - 1)));
  };
  auto sigmoid = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };

  const double total_steps = static_cast<double>(std::max<std::uint64_t>(total_words, 1)) *
                             static_cast<double>(config.epochs);
  double processed = 0.0;
  std::vector<std::uint32_t> sentence;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& doc : docs) {
      sentence.clear();
      for (auto id : doc) {
        if (keep_prob[id] >= 1.0 || rng.uniform() < keep_prob[id]) sentence.push_back(id);
      }
      for (std::size_t pos = 0; pos < sentence.size(); ++pos) {
        const double lr = std::max(config.min_learning_rate,
                                   config.learning_rate * (1.0 - processed / total_steps));
        processed += 1.0;
        const std::size_t center = sentence[pos];
        const std::size_t reduced = static_cast<std::size_t>(rng.below(config.window));
        const std::size_t span = config.window - reduced;
        const std::size_t lo = pos >= span ? pos - span : 0;
        const std::size_t hi = std::min(sentence.size() - 1, pos + span);
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c == pos) continue;
          double* in = model.vectors.data() + sentence[c] * dim;
          std::fill(grad.begin(), grad.end(), 0.0);
          for (std::size_t k = 0; k <= config.negative; ++k) {
            std::size_t target;
            double label;
            if (k == 0) {
              target = center;
              label = 1.0;
            } else {
              target = sample_negative();
              if (target == center) continue;
              label = 0.0;
            }
            double* out = context_out.data() + target * dim;
            double dot = 0.0;
            for (std::size_t d = 0; d < dim; ++d) dot += in[d] * out[d];
            const double g = (label - sigmoid(dot)) * lr;
            for (std::size_t d = 0; d < dim; ++d) {
              grad[d] += g * out[d];
              out[d] += g * in[d];
            }
          }
          for (std::size_t d = 0; d < dim; ++d) in[d] += grad[d];
        }
      }
    }
  }
  return model;
}

inline EmbeddingModel train_word2vec(const Corpus& corpus, const Word2VecConfig& config) {
  if (corpus.empty()) throw DataError("cannot train embeddings on an empty corpus");
  std::vector<std::vector<std::string>> docs;
  docs.reserve(corpus.size());
  for (const auto& r : corpus.records) docs.push_back(document_tokens(r));
  return train_word2vec(docs, config);
}

struct FeatureSet {
  std::vector<FeatureVector> vectors;
  // True where no token of the document was in the vocabulary; the vector
  // is then all zeros.
  std::vector<bool> all_oov;
  std::size_t dimension = 0;
};

// Mean of the in-vocabulary token vectors of one token sequence.
inline FeatureVector embed_tokens(const std::vector<std::string>& tokens, const EmbeddingModel& model,
                                  bool* all_oov = nullptr) {
  FeatureVector v(model.dimension(), 0.0);
  std::size_t hits = 0;
  for (const auto& t : tokens) {
    if (const double* w = model.find(t)) {
      for (std::size_t d = 0; d < v.size(); ++d) v[d] += w[d];
      ++hits;
    }
  }
  if (hits > 0) {
    for (auto& x : v) x /= static_cast<double>(hits);
  }
  if (all_oov) *all_oov = hits == 0;
  return v;
}

// `expected_dimension`, when non-zero, is the dimension the downstream
// classifier was trained on.
inline FeatureSet featurize(const Corpus& corpus, const EmbeddingModel& model,
                            std::size_t expected_dimension = 0) {
  model.check();
  if (expected_dimension != 0 && expected_dimension != model.dimension()) {
    throw DataError("feature dimension mismatch: model has " + std::to_string(model.dimension()) +
                    ", expected " + std::to_string(expected_dimension));
  }
  FeatureSet fs;
  fs.dimension = model.dimension();
  fs.vectors.reserve(corpus.size());
  for (const auto& r : corpus.records) {
    bool oov = false;
    fs.vectors.push_back(embed_tokens(document_tokens(r), model, &oov));
    fs.all_oov.push_back(oov);
  }
  return fs;
}

}  // namespace screenkit::baselines
