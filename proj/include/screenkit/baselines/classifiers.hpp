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
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "screenkit/decision.hpp"
#include "screenkit/error.hpp"
#include "screenkit/rng.hpp"
#include "screenkit/text.hpp"
#include "screenkit/baselines/word2vec.hpp"

namespace screenkit::baselines {

using FeatureMatrix = std::vector<FeatureVector>;

// Hyperparameters are a JSON object; `null` stands for an unset value such
// as penalty=None.
using Hyperparameters = nlohmann::json;

enum class ClassifierKind : std::uint8_t {
  Random = 0,
  LogisticRegression = 1,
  ComplementNaiveBayes = 2,
  LinearSVC = 3,
  RandomForest = 4,
};

inline constexpr std::array<ClassifierKind, 5> kClassifierKinds{
    ClassifierKind::Random, ClassifierKind::LogisticRegression, ClassifierKind::ComplementNaiveBayes,
    ClassifierKind::LinearSVC, ClassifierKind::RandomForest};

inline std::string_view to_string(ClassifierKind k) noexcept {
  switch (k) {
    case ClassifierKind::Random: return "random";
    case ClassifierKind::LogisticRegression: return "lr";
    case ClassifierKind::ComplementNaiveBayes: return "cnb";
    case ClassifierKind::LinearSVC: return "svc";
    case ClassifierKind::RandomForest: return "rf";
  }
  return "unknown";
}

inline std::string_view display_name(ClassifierKind k) noexcept {
  switch (k) {
    case ClassifierKind::Random: return "Random";
    case ClassifierKind::LogisticRegression: return "LR";
    case ClassifierKind::ComplementNaiveBayes: return "CNB";
    case ClassifierKind::LinearSVC: return "SVC";
    case ClassifierKind::RandomForest: return "RF";
  }
  return "unknown";
}

inline ClassifierKind classifier_kind_from_string(std::string_view s) {
  const std::string v = text::to_lower(text::trim(s));
  if (v == "random") return ClassifierKind::Random;
  if (v == "lr" || v == "logisticregression" || v == "logistic_regression") {
    return ClassifierKind::LogisticRegression;
  }
  if (v == "cnb" || v == "complementnb" || v == "complementnaivebayes" || v == "complement_naive_bayes") {
    return ClassifierKind::ComplementNaiveBayes;
  }
  if (v == "svc" || v == "linearsvc" || v == "linear_svc") return ClassifierKind::LinearSVC;
  if (v == "rf" || v == "randomforest" || v == "random_forest") return ClassifierKind::RandomForest;
  throw UsageError("unknown classifier kind '" + std::string(s) + "'");
}

namespace detail {

inline const nlohmann::json* param(const Hyperparameters& h, const char* name) {
  if (!h.is_object()) return nullptr;
  const auto it = h.find(name);
  return it == h.end() ? nullptr : &*it;
}

inline double param_double(const Hyperparameters& h, const char* name, double fallback) {
  const auto* v = param(h, name);
  if (!v || v->is_null()) return fallback;
  if (!v->is_number()) throw UsageError(std::string("hyperparameter '") + name + "' must be a number");
  return v->get<double>();
}

inline std::optional<std::int64_t> param_int(const Hyperparameters& h, const char* name,
                                             std::optional<std::int64_t> fallback) {
  const auto* v = param(h, name);
  if (!v) return fallback;
  if (v->is_null()) return std::nullopt;
  if (!v->is_number()) throw UsageError(std::string("hyperparameter '") + name + "' must be an integer");
  return v->get<std::int64_t>();
}

inline std::optional<std::string> param_string(const Hyperparameters& h, const char* name,
                                               std::optional<std::string> fallback) {
  const auto* v = param(h, name);
  if (!v) return fallback;
  if (v->is_null()) return std::nullopt;
  if (!v->is_string()) throw UsageError(std::string("hyperparameter '") + name + "' must be a string");
  return text::to_lower(v->get<std::string>());
}

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double sigmoid(double z) noexcept {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(-m)) without overflow.
inline double log1p_exp_neg(double m) noexcept {
  return m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

// Solves A x = b in place for a symmetric positive definite A (row-major,
// n x n). Adds jitter to the diagonal when the factorization breaks down.
inline std::vector<double> solve_spd(std::vector<double> a, std::vector<double> b, std::size_t n) {
  for (double jitter = 0.0;; jitter = jitter == 0.0 ? 1e-10 : jitter * 100.0) {
    std::vector<double> l = a;
    for (std::size_t i = 0; i < n; ++i) l[i * n + i] += jitter;
    bool ok = true;
    for (std::size_t j = 0; j < n && ok; ++j) {
      double d = l[j * n + j];
      for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
      if (!(d > 0.0) || !std::isfinite(d)) {
        ok = false;
        break;
      }
      d = std::sqrt(d);
      l[j * n + j] = d;
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = l[i * n + j];
        for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
        l[i * n + j] = s / d;
      }
    }
    if (!ok) {
      if (jitter > 1e6) throw DataError("linear system is singular");
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      double s = b[i];
      for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * b[k];
      b[i] = s / l[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = b[i];
      for (std::size_t k = i + 1; k < n; ++k) s -= l[k * n + i] * b[k];
      b[i] = s / l[i * n + i];
    }
    return b;
  }
}

}  // namespace detail

struct RandomState {
  double p_include = 0.5;
  std::uint64_t seed = 0;
};

// Shared by logistic regression and the linear SVM.
struct LinearState {
  std::vector<double> weights;
  double bias = 0.0;
};

struct CnbState {
  // Per-feature shift applied before scoring so that inputs are non-negative.
  std::vector<double> offset;
  // Index 0 is Exclude, 1 is Include.
  std::array<std::vector<double>, 2> feature_log_prob;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;  // fraction of Include among training samples in the node
};

struct ForestState {
  std::vector<std::vector<TreeNode>> trees;
};

using ClassifierState = std::variant<RandomState, LinearState, CnbState, ForestState>;

struct Classifier {
  ClassifierKind kind = ClassifierKind::Random;
  Hyperparameters hyperparameters = Hyperparameters::object();
  std::size_t dimension = 0;
  ClassifierState parameters;

  // Include scores in [0, 1]; prediction is Include at >= 0.5.
  std::vector<double> scores(const FeatureMatrix& x) const;
  std::vector<Decision> predict(const FeatureMatrix& x) const;
};

inline constexpr double kDecisionThreshold = 0.5;

namespace detail {

inline void check_training_set(const FeatureMatrix& x, std::span<const Decision> y) {
  if (x.size() != y.size()) {
    throw DataError("feature/label count mismatch: " + std::to_string(x.size()) + " vs " +
                    std::to_string(y.size()));
  }
  if (x.empty()) throw DataError("empty training set");
  const std::size_t d = x.front().size();
  for (const auto& v : x) {
    if (v.size() != d) throw DataError("inconsistent feature dimension in training set");
    for (double e : v) {
      if (!std::isfinite(e)) throw DataError("non-finite feature value");
    }
  }
  const auto pos = std::count(y.begin(), y.end(), Decision::Include);
  if (pos == 0 || static_cast<std::size_t>(pos) == y.size()) {
    throw DataError("training labels contain a single class");
  }
}

inline RandomState fit_random(const Hyperparameters& h, std::uint64_t seed) {
  const double p = param_double(h, "p_include", 0.5);
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("p_include must lie in [0, 1]");
  return {p, seed};
}

inline LinearState fit_logistic(const Hyperparameters& h, const FeatureMatrix& x, std::span<const Decision> y) {
  const auto penalty = param_string(h, "penalty", std::string("l2"));
  const double c = param_double(h, "C", 1.0);
  const auto max_iter = param_int(h, "max_iter", 100).value_or(100);
  if (!(c > 0.0)) throw UsageError("C must be positive");
  if (penalty && *penalty != "l2" && *penalty != "none") {
    throw UsageError("unsupported penalty '" + *penalty + "'");
  }
  const bool regularized = penalty && *penalty == "l2";
  // Without a penalty the loss is left unscaled; a tiny ridge keeps the
  // Newton system solvable on separable data.
  const double loss_scale = regularized ? c : 1.0;
  const double ridge = regularized ? 1.0 : 1e-8;

  const std::size_t n = x.size();
  const std::size_t d = x.front().size();
  const std::size_t p = d + 1;
  std::vector<double> theta(p, 0.0);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = y[i] == Decision::Include ? 1.0 : 0.0;

  auto margin = [&](const std::vector<double>& th, std::size_t i) {
    return dot(x[i], std::span<const double>(th.data(), d)) + th[d];
  };
  auto objective = [&](const std::vector<double>& th) {
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = margin(th, i);
      loss += log1p_exp_neg(t[i] > 0.5 ? z : -z);
    }
    double reg = 0.0;
    for (std::size_t j = 0; j < d; ++j) reg += th[j] * th[j];
    return loss_scale * loss + 0.5 * ridge * reg;
  };

  double f = objective(theta);
  std::vector<double> grad(p);
  std::vector<double> hess(p * p);
  for (std::int64_t iter = 0; iter < max_iter; ++iter) {
    std::fill(grad.begin(), grad.end(), 0.0);
    std::fill(hess.begin(), hess.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = sigmoid(margin(theta, i));
      const double r = loss_scale * (s - t[i]);
      const double w = loss_scale * s * (1.0 - s);
      for (std::size_t a = 0; a < p; ++a) {
        const double xa = a < d ? x[i][a] : 1.0;
        grad[a] += r * xa;
        if (w == 0.0) continue;
        for (std::size_t b = 0; b <= a; ++b) {
          const double xb = b < d ? x[i][b] : 1.0;
          hess[a * p + b] += w * xa * xb;
        }
      }
    }
    for (std::size_t j = 0; j < d; ++j) {
      grad[j] += ridge * theta[j];
      hess[j * p + j] += ridge;
    }
    hess[d * p + d] += 1e-12;
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = 0; b < a; ++b) hess[b * p + a] = hess[a * p + b];
    }
    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
    if (gmax < 1e-8) break;

    const auto step = solve_spd(hess, grad, p);
    double alpha = 1.0;
    std::vector<double> next(p);
    double f_next = f;
    bool improved = false;
    for (int ls = 0; ls < 50; ++ls) {
      for (std::size_t a = 0; a < p; ++a) next[a] = theta[a] - alpha * step[a];
      f_next = objective(next);
      if (f_next <= f) {
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) break;
    theta.swap(next);
    const double decrease = f - f_next;
    f = f_next;
    if (decrease <= 1e-12 * std::max(1.0, std::abs(f))) break;
  }
  LinearState s;
  s.weights.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(d));
  s.bias = theta[d];
  return s;
}

inline CnbState fit_cnb(const Hyperparameters& h, const FeatureMatrix& x, std::span<const Decision> y) {
  const double alpha = param_double(h, "alpha", 1.0);
  if (!(alpha >= 0.0)) throw UsageError("alpha must be non-negative");
  const std::size_t d = x.front().size();
  CnbState s;
  s.offset.assign(d, 0.0);
  for (const auto& v : x) {
    for (std::size_t j = 0; j < d; ++j) s.offset[j] = std::max(s.offset[j], -v[j]);
  }
  std::array<std::vector<double>, 2> count{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto& row = count[to_int(y[i])];
    for (std::size_t j = 0; j < d; ++j) row[j] += x[i][j] + s.offset[j];
  }
  for (int c = 0; c < 2; ++c) {
    // Complement counts: feature mass of every class other than c.
    std::vector<double> comp(d);
    double total = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      comp[j] = count[1 - c][j] + alpha;
      total += comp[j];
    }
    if (!(total > 0.0)) throw DataError("complement naive Bayes needs positive feature mass");
    s.feature_log_prob[c].resize(d);
    for (std::size_t j = 0; j < d; ++j) s.feature_log_prob[c][j] = -std::log(comp[j] / total);
  }
  return s;
}

inline LinearState fit_linear_svc(const Hyperparameters& h, const FeatureMatrix& x, std::span<const Decision> y,
                                  std::uint64_t seed) {
  const auto kernel = param_string(h, "kernel", std::string("linear"));
  if (kernel && *kernel != "linear") {
    throw UsageError("kernel '" + *kernel + "' is not supported; only 'linear' is implemented");
  }
  const double c = param_double(h, "C", 1.0);
  if (!(c > 0.0)) throw UsageError("C must be positive");
  const auto loss = param_string(h, "loss", std::string("squared_hinge")).value_or("squared_hinge");
  if (loss != "hinge" && loss != "squared_hinge") throw UsageError("unsupported loss '" + loss + "'");
  const auto max_iter = param_int(h, "max_iter", 1000).value_or(1000);
  const double tol = param_double(h, "tol", 1e-4);

  // Dual coordinate descent with the bias folded in as a constant feature.
  const std::size_t n = x.size();
  const std::size_t d = x.front().size();
  const bool squared = loss == "squared_hinge";
  const double diag = squared ? 0.5 / c : 0.0;
  const double upper = squared ? std::numeric_limits<double>::infinity() : c;
  std::vector<double> w(d + 1, 0.0);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> qii(n);
  std::vector<double> sign(n);
  for (std::size_t i = 0; i < n; ++i) {
    qii[i] = dot(x[i], x[i]) + 1.0 + diag;
    sign[i] = y[i] == Decision::Include ? 1.0 : -1.0;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::int64_t iter = 0; iter < max_iter; ++iter) {
    rng.shuffle(std::span<std::size_t>(order));
    double pg_max = -std::numeric_limits<double>::infinity();
    double pg_min = std::numeric_limits<double>::infinity();
    for (std::size_t i : order) {
      const double g = sign[i] * (dot(x[i], std::span<const double>(w.data(), d)) + w[d]) - 1.0 + diag * alpha[i];
      double pg = g;
      if (alpha[i] == 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha[i] == upper) {
        pg = std::max(g, 0.0);
      }
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (std::abs(pg) > 1e-12) {
        const double old = alpha[i];
        alpha[i] = std::min(std::max(old - g / qii[i], 0.0), upper);
        const double delta = (alpha[i] - old) * sign[i];
        for (std::size_t j = 0; j < d; ++j) w[j] += delta * x[i][j];
        w[d] += delta;
      }
    }
    if (pg_max - pg_min < tol) break;
  }
  LinearState s;
  s.weights.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(d));
  s.bias = w[d];
  return s;
}

struct ForestParams {
  std::size_t n_estimators = 100;
  std::optional<std::size_t> max_depth;
  std::size_t max_features = 1;
  std::size_t min_samples_leaf = 1;
  std::size_t min_samples_split = 2;
  bool bootstrap = true;
};

inline ForestParams forest_params(const Hyperparameters& h, std::size_t d) {
  ForestParams p;
  auto positive = [](std::optional<std::int64_t> v, const char* name) -> std::optional<std::size_t> {
    if (!v) return std::nullopt;
    if (*v < 1) throw UsageError(std::string("hyperparameter '") + name + "' must be at least 1");
    return static_cast<std::size_t>(*v);
  };
  p.n_estimators = positive(param_int(h, "n_estimators", 100), "n_estimators").value_or(100);
  p.max_depth = positive(param_int(h, "max_depth", std::nullopt), "max_depth");
  p.min_samples_leaf = positive(param_int(h, "min_samples_leaf", 1), "min_samples_leaf").value_or(1);
  p.min_samples_split = positive(param_int(h, "min_samples_split", 2), "min_samples_split").value_or(2);
  if (p.min_samples_split < 2) throw UsageError("min_samples_split must be at least 2");
  const auto* mf = param(h, "max_features");
  if (!mf) {
    p.max_features = static_cast<std::size_t>(std::max(1.0, std::floor(std::sqrt(static_cast<double>(d)))));
  } else if (mf->is_null()) {
    p.max_features = d;
  } else if (mf->is_string()) {
    const auto s = text::to_lower(mf->get<std::string>());
    if (s == "sqrt") {
      p.max_features = static_cast<std::size_t>(std::max(1.0, std::floor(std::sqrt(static_cast<double>(d)))));
    } else if (s == "log2") {
      p.max_features = static_cast<std::size_t>(std::max(1.0, std::floor(std::log2(static_cast<double>(d)))));
    } else {
      throw UsageError("unsupported max_features '" + s + "'");
    }
  } else if (mf->is_number_integer()) {
    p.max_features = *positive(mf->get<std::int64_t>(), "max_features");
  } else if (mf->is_number()) {
    const double frac = mf->get<double>();
    if (!(frac > 0.0 && frac <= 1.0)) throw UsageError("fractional max_features must lie in (0, 1]");
    p.max_features = static_cast<std::size_t>(std::max(1.0, std::floor(frac * static_cast<double>(d))));
  } else {
    throw UsageError("hyperparameter 'max_features' has an unsupported type");
  }
  p.max_features = std::min(p.max_features, d);
  if (const auto* b = param(h, "bootstrap"); b && b->is_boolean()) p.bootstrap = b->get<bool>();
  return p;
}

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, std::span<const Decision> y, const ForestParams& p, Rng& rng)
      : x_(x), y_(y), p_(p), rng_(rng), features_(x.front().size()) {
    std::iota(features_.begin(), features_.end(), 0);
  }

  std::vector<TreeNode> build(std::vector<std::size_t> samples) {
    nodes_.clear();
    grow(samples, 0);
    return std::move(nodes_);
  }

 private:
  std::int32_t grow(std::vector<std::size_t>& samples, std::size_t depth) {
    const std::size_t n = samples.size();
    std::size_t pos = 0;
    for (auto i : samples) pos += y_[i] == Decision::Include ? 1 : 0;
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(TreeNode{-1, 0.0, -1, -1, static_cast<double>(pos) / static_cast<double>(n)});
    const bool pure = pos == 0 || pos == n;
    if (pure || n < p_.min_samples_split || n < 2 * p_.min_samples_leaf ||
        (p_.max_depth && depth >= *p_.max_depth)) {
      return id;
    }

    // Partial Fisher-Yates draws max_features distinct candidates.
    for (std::size_t k = 0; k < p_.max_features; ++k) {
      const auto j = k + static_cast<std::size_t>(rng_.below(features_.size() - k));
      std::swap(features_[k], features_[j]);
    }
    const double parent = gini(pos, n);
    double best_gain = 1e-12;
    std::int32_t best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::pair<double, bool>> column(n);
    for (std::size_t k = 0; k < p_.max_features; ++k) {
      const std::size_t f = features_[k];
      for (std::size_t s = 0; s < n; ++s) {
        column[s] = {x_[samples[s]][f], y_[samples[s]] == Decision::Include};
      }
      std::sort(column.begin(), column.end());
      std::size_t left_pos = 0;
      for (std::size_t s = 1; s < n; ++s) {
        left_pos += column[s - 1].second ? 1 : 0;
        if (column[s].first <= column[s - 1].first) continue;
        if (s < p_.min_samples_leaf || n - s < p_.min_samples_leaf) continue;
        const double wl = static_cast<double>(s) / static_cast<double>(n);
        const double child = wl * gini(left_pos, s) + (1.0 - wl) * gini(pos - left_pos, n - s);
        const double gain = parent - child;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<std::int32_t>(f);
          best_threshold = 0.5 * (column[s - 1].first + column[s].first);
          if (best_threshold == column[s].first) best_threshold = column[s - 1].first;
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (auto i : samples) {
      (x_[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? left : right).push_back(i);
    }
    samples.clear();
    samples.shrink_to_fit();
    const auto l = grow(left, depth + 1);
    const auto r = grow(right, depth + 1);
    nodes_[static_cast<std::size_t>(id)].feature = best_feature;
    nodes_[static_cast<std::size_t>(id)].threshold = best_threshold;
    nodes_[static_cast<std::size_t>(id)].left = l;
    nodes_[static_cast<std::size_t>(id)].right = r;
    return id;
  }

  static double gini(std::size_t pos, std::size_t n) noexcept {
    const double q = static_cast<double>(pos) / static_cast<double>(n);
    return 2.0 * q * (1.0 - q);
  }

  const FeatureMatrix& x_;
  std::span<const Decision> y_;
  const ForestParams& p_;
  Rng& rng_;
  std::vector<std::size_t> features_;
  std::vector<TreeNode> nodes_;
};

inline ForestState fit_forest(const Hyperparameters& h, const FeatureMatrix& x, std::span<const Decision> y,
                              std::uint64_t seed) {
  const auto params = forest_params(h, x.front().size());
  Rng rng(seed);
  TreeBuilder builder(x, y, params, rng);
  ForestState s;
  s.trees.reserve(params.n_estimators);
  const std::size_t n = x.size();
  for (std::size_t t = 0; t < params.n_estimators; ++t) {
    std::vector<std::size_t> samples(n);
    if (params.bootstrap) {
      for (auto& i : samples) i = static_cast<std::size_t>(rng.below(n));
    } else {
      std::iota(samples.begin(), samples.end(), 0);
    }
    s.trees.push_back(builder.build(std::move(samples)));
  }
  return s;
}

inline double tree_score(const std::vector<TreeNode>& tree, std::span<const double> v) {
  std::size_t node = 0;
  while (tree[node].feature >= 0) {
    const auto& t = tree[node];
    node = static_cast<std::size_t>(v[static_cast<std::size_t>(t.feature)] <= t.threshold ? t.left : t.right);
  }
  return tree[node].value;
}

}  // namespace detail

inline Classifier fit(ClassifierKind kind, const Hyperparameters& hyperparameters, const FeatureMatrix& x,
                      std::span<const Decision> y, std::uint64_t seed = 0) {
  detail::check_training_set(x, y);
  if (!hyperparameters.is_null() && !hyperparameters.is_object()) {
    throw UsageError("hyperparameters must be a JSON object");
  }
  const Hyperparameters h = hyperparameters.is_null() ? Hyperparameters::object() : hyperparameters;
  Classifier c;
  c.kind = kind;
  c.hyperparameters = h;
  c.dimension = x.front().size();
  switch (kind) {
    case ClassifierKind::Random: c.parameters = detail::fit_random(h, seed); break;
    case ClassifierKind::LogisticRegression: c.parameters = detail::fit_logistic(h, x, y); break;
    case ClassifierKind::ComplementNaiveBayes: c.parameters = detail::fit_cnb(h, x, y); break;
    case ClassifierKind::LinearSVC: c.parameters = detail::fit_linear_svc(h, x, y, seed); break;
    case ClassifierKind::RandomForest: c.parameters = detail::fit_forest(h, x, y, seed); break;
  }
  return c;
}

inline std::vector<double> Classifier::scores(const FeatureMatrix& x) const {
  for (const auto& v : x) {
    if (v.size() != dimension) {
      throw DataError("feature dimension mismatch: classifier expects " + std::to_string(dimension) + ", got " +
                      std::to_string(v.size()));
    }
  }
  std::vector<double> out;
  out.reserve(x.size());
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, RandomState>) {
          Rng rng(s.seed);
          // One Bernoulli(p_include) draw per item, in input order.
          for (std::size_t i = 0; i < x.size(); ++i) {
            out.push_back(rng.uniform() < s.p_include ? 1.0 : 0.0);
          }
        } else if constexpr (std::is_same_v<S, LinearState>) {
          for (const auto& v : x) out.push_back(detail::sigmoid(detail::dot(s.weights, v) + s.bias));
        } else if constexpr (std::is_same_v<S, CnbState>) {
          for (const auto& v : x) {
            double jll[2] = {0.0, 0.0};
            for (int c = 0; c < 2; ++c) {
              for (std::size_t j = 0; j < v.size(); ++j) {
                jll[c] += std::max(0.0, v[j] + s.offset[j]) * s.feature_log_prob[c][j];
              }
            }
            out.push_back(detail::sigmoid(jll[1] - jll[0]));
          }
        } else {
          for (const auto& v : x) {
            double sum = 0.0;
            for (const auto& tree : s.trees) sum += detail::tree_score(tree, v);
            out.push_back(s.trees.empty() ? 0.0 : sum / static_cast<double>(s.trees.size()));
          }
        }
      },
      parameters);
  return out;
}

inline std::vector<Decision> Classifier::predict(const FeatureMatrix& x) const {
  const auto s = scores(x);
  std::vector<Decision> out;
  out.reserve(s.size());
  for (double v : s) out.push_back(v >= kDecisionThreshold ? Decision::Include : Decision::Exclude);
  return out;
}

inline std::vector<Decision> train_and_predict(ClassifierKind kind, const Hyperparameters& hyperparameters,
                                               const FeatureMatrix& train_x, std::span<const Decision> train_y,
                                               const FeatureMatrix& test_x, std::uint64_t seed = 0) {
  return fit(kind, hyperparameters, train_x, train_y, seed).predict(test_x);
}

}  // namespace screenkit::baselines
