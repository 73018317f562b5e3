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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "screenkit/corpus.hpp"
#include "screenkit/error.hpp"
#include "screenkit/baselines/classifiers.hpp"
#include "screenkit/baselines/word2vec.hpp"

// Versioned binary model container:
//   "SKMODEL\0" | u32 version | u32 payload kind | u64 n | n bytes of JSON
//   | u64 block count | blocks of (u64 name length, name, u64 count, f64[count])
// Integers and doubles are little-endian.
namespace screenkit::baselines {

static_assert(std::endian::native == std::endian::little, "model container assumes a little-endian host");

inline constexpr std::string_view kModelMagic{"SKMODEL\0", 8};
inline constexpr std::uint32_t kModelFormatVersion = 1;

enum class PayloadKind : std::uint32_t { Embedding = 1, Classifier = 2 };

namespace detail {

struct Container {
  PayloadKind kind = PayloadKind::Embedding;
  nlohmann::json config;
  std::map<std::string, std::vector<double>> blocks;
};

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

inline std::string encode(const Container& c) {
  std::string out(kModelMagic);
  put<std::uint32_t>(out, kModelFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(c.kind));
  const std::string cfg = c.config.dump();
  put<std::uint64_t>(out, cfg.size());
  out += cfg;
  put<std::uint64_t>(out, c.blocks.size());
  for (const auto& [name, values] : c.blocks) {
    put<std::uint64_t>(out, name.size());
    out += name;
    put<std::uint64_t>(out, values.size());
    for (double v : values) put<double>(out, v);
  }
  return out;
}

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string_view bytes(std::uint64_t n) {
    need(n);
    const auto s = data_.substr(pos_, static_cast<std::size_t>(n));
    pos_ += static_cast<std::size_t>(n);
    return s;
  }

  bool at_end() const noexcept { return pos_ == data_.size(); }

 private:
  void need(std::uint64_t n) const {
    if (n > data_.size() - pos_) throw DataError("model container is truncated");
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

inline Container decode(std::string_view data) {
  Reader r(data);
  if (data.size() < kModelMagic.size() || r.bytes(kModelMagic.size()) != kModelMagic) {
    throw DataError("not a screenkit model file");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kModelFormatVersion) {
    throw DataError("unsupported model format version " + std::to_string(version));
  }
  Container c;
  c.kind = static_cast<PayloadKind>(r.get<std::uint32_t>());
  const auto cfg_len = r.get<std::uint64_t>();
  try {
    c.config = nlohmann::json::parse(r.bytes(cfg_len));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("model config is not valid JSON: ") + e.what());
  }
  const auto nblocks = r.get<std::uint64_t>();
  for (std::uint64_t b = 0; b < nblocks; ++b) {
    std::string name(r.bytes(r.get<std::uint64_t>()));
    const auto count = r.get<std::uint64_t>();
    if (count > data.size() / sizeof(double)) throw DataError("model container is truncated");
    std::vector<double> values(static_cast<std::size_t>(count));
    for (auto& v : values) v = r.get<double>();
    c.blocks.emplace(std::move(name), std::move(values));
  }
  if (!r.at_end()) throw DataError("trailing bytes after model container");
  return c;
}

inline const std::vector<double>& block(const Container& c, const std::string& name) {
  const auto it = c.blocks.find(name);
  if (it == c.blocks.end()) throw DataError("model container lacks block '" + name + "'");
  return it->second;
}

inline void expect_kind(const Container& c, PayloadKind k) {
  if (c.kind != k) throw DataError("model container holds a different payload kind");
}

}  // namespace detail

inline std::string serialize(const EmbeddingModel& m) {
  m.check();
  detail::Container c;
  c.kind = PayloadKind::Embedding;
  c.config = {{"word2vec", m.config.to_json()}, {"words", m.words}};
  c.blocks["vectors"] = m.vectors;
  return detail::encode(c);
}

inline EmbeddingModel deserialize_embedding(std::string_view data) {
  const auto c = detail::decode(data);
  detail::expect_kind(c, PayloadKind::Embedding);
  EmbeddingModel m;
  try {
    m.config = Word2VecConfig::from_json(c.config.at("word2vec"));
    m.words = c.config.at("words").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed embedding config: ") + e.what());
  }
  m.vectors = detail::block(c, "vectors");
  m.rebuild_index();
  m.check();
  return m;
}

inline std::string serialize(const Classifier& clf) {
  detail::Container c;
  c.kind = PayloadKind::Classifier;
  c.config = {{"kind", std::string(to_string(clf.kind))},
              {"hyperparameters", clf.hyperparameters},
              {"dimension", clf.dimension}};
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, RandomState>) {
          c.config["p_include"] = s.p_include;
          c.config["seed"] = s.seed;
        } else if constexpr (std::is_same_v<S, LinearState>) {
          c.blocks["weights"] = s.weights;
          c.blocks["bias"] = {s.bias};
        } else if constexpr (std::is_same_v<S, CnbState>) {
          c.blocks["offset"] = s.offset;
          c.blocks["log_prob_exclude"] = s.feature_log_prob[0];
          c.blocks["log_prob_include"] = s.feature_log_prob[1];
        } else {
          std::vector<std::size_t> sizes;
          auto& feature = c.blocks["feature"];
          auto& threshold = c.blocks["threshold"];
          auto& left = c.blocks["left"];
          auto& right = c.blocks["right"];
          auto& value = c.blocks["value"];
          for (const auto& tree : s.trees) {
            sizes.push_back(tree.size());
            for (const auto& n : tree) {
              feature.push_back(n.feature);
              threshold.push_back(n.threshold);
              left.push_back(n.left);
              right.push_back(n.right);
              value.push_back(n.value);
            }
          }
          c.config["tree_sizes"] = sizes;
        }
      },
      clf.parameters);
  return detail::encode(c);
}

inline Classifier deserialize_classifier(std::string_view data) {
  const auto c = detail::decode(data);
  detail::expect_kind(c, PayloadKind::Classifier);
  Classifier clf;
  try {
    clf.kind = classifier_kind_from_string(c.config.at("kind").get<std::string>());
    clf.hyperparameters = c.config.at("hyperparameters");
    clf.dimension = c.config.at("dimension").get<std::size_t>();
    switch (clf.kind) {
      case ClassifierKind::Random:
        clf.parameters = RandomState{c.config.at("p_include").get<double>(), c.config.at("seed").get<std::uint64_t>()};
        break;
      case ClassifierKind::LogisticRegression:
      case ClassifierKind::LinearSVC: {
        LinearState s{detail::block(c, "weights"), 0.0};
        const auto& bias = detail::block(c, "bias");
        if (bias.size() != 1 || s.weights.size() != clf.dimension) throw DataError("malformed linear model");
        s.bias = bias[0];
        clf.parameters = std::move(s);
        break;
      }
      case ClassifierKind::ComplementNaiveBayes: {
        CnbState s;
        s.offset = detail::block(c, "offset");
        s.feature_log_prob[0] = detail::block(c, "log_prob_exclude");
        s.feature_log_prob[1] = detail::block(c, "log_prob_include");
        if (s.offset.size() != clf.dimension || s.feature_log_prob[0].size() != clf.dimension ||
            s.feature_log_prob[1].size() != clf.dimension) {
          throw DataError("malformed naive Bayes model");
        }
        clf.parameters = std::move(s);
        break;
      }
      case ClassifierKind::RandomForest: {
        ForestState s;
        const auto sizes = c.config.at("tree_sizes").get<std::vector<std::size_t>>();
        const auto& feature = detail::block(c, "feature");
        const auto& threshold = detail::block(c, "threshold");
        const auto& left = detail::block(c, "left");
        const auto& right = detail::block(c, "right");
        const auto& value = detail::block(c, "value");
        std::size_t total = 0;
        for (auto n : sizes) total += n;
        if (feature.size() != total || threshold.size() != total || left.size() != total ||
            right.size() != total || value.size() != total) {
          throw DataError("malformed forest model");
        }
        std::size_t k = 0;
        for (auto n : sizes) {
          std::vector<TreeNode> tree(n);
          for (std::size_t i = 0; i < n; ++i, ++k) {
            tree[i] = {static_cast<std::int32_t>(feature[k]), threshold[k], static_cast<std::int32_t>(left[k]),
                       static_cast<std::int32_t>(right[k]), value[k]};
            const auto& t = tree[i];
            if (t.feature >= static_cast<std::int32_t>(clf.dimension) ||
                (t.feature >= 0 && (t.left <= static_cast<std::int32_t>(i) || t.right <= static_cast<std::int32_t>(i) ||
                                    t.left >= static_cast<std::int32_t>(n) || t.right >= static_cast<std::int32_t>(n)))) {
              throw DataError("malformed forest model");
            }
          }
          s.trees.push_back(std::move(tree));
        }
        clf.parameters = std::move(s);
        break;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed classifier config: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("malformed classifier config: ") + e.what());
  }
  return clf;
}

inline void write_binary_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing '" + path + "'");
}

}  // namespace screenkit::baselines
