// Copyright 2026 The sensitrack Authors
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
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sensitrack/csv.hpp"
#include "sensitrack/error.hpp"
#include "sensitrack/features.hpp"
#include "sensitrack/random.hpp"

namespace sensitrack {

enum class Weighting { bow, tfidf };

inline std::string_view to_string(Weighting w) { return w == Weighting::bow ? "bow" : "tfidf"; }

inline std::optional<Weighting> parse_weighting(std::string_view s) {
  if (s == "bow") return Weighting::bow;
  if (s == "tfidf") return Weighting::tfidf;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Dataset preparation

namespace detail {

template <typename T, typename LabelFn>
std::map<std::string, std::vector<std::size_t>> group_by_label(const std::vector<T>& items,
                                                               LabelFn label_of) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < items.size(); ++i) groups[std::string(label_of(items[i]))].push_back(i);
  return groups;
}

}  // namespace detail

// Downsamples every class, uniformly and without replacement, to the size of
// the smallest class. Kept items stay in input order.
template <typename T, typename LabelFn>
std::vector<T> balance_classes(const std::vector<T>& items, LabelFn label_of, std::uint64_t seed) {
  const auto groups = detail::group_by_label(items, label_of);
  if (groups.empty()) throw std::invalid_argument("balance_classes: no labeled items");
  std::size_t smallest = std::numeric_limits<std::size_t>::max();
  for (const auto& [label, idx] : groups) smallest = std::min(smallest, idx.size());

  std::vector<std::size_t> keep;
  std::uint64_t stream = 0;
  for (const auto& [label, idx] : groups) {
    auto picked = idx;
    Rng rng(derive_seed(seed, stream++));
    rng.shuffle(picked);
    picked.resize(smallest);
    keep.insert(keep.end(), picked.begin(), picked.end());
  }
  std::sort(keep.begin(), keep.end());
  std::vector<T> out;
  out.reserve(keep.size());
  for (auto i : keep) out.push_back(items[i]);
  return out;
}

// Stratified split: floor(ratio * n) items of each class go to train after a
// seeded shuffle within the class. Output preserves input order.
template <typename T, typename LabelFn>
std::pair<std::vector<T>, std::vector<T>> split_train_validation(const std::vector<T>& items,
                                                                 LabelFn label_of, double ratio,
                                                                 std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split ratio must be in (0, 1)");
  const auto groups = detail::group_by_label(items, label_of);
  std::vector<char> to_train(items.size(), 0);
  std::uint64_t stream = 1000;
  for (const auto& [label, idx] : groups) {
    auto order = idx;
    Rng rng(derive_seed(seed, stream++));
    rng.shuffle(order);
    const auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(order.size()) + 1e-9));
    for (std::size_t i = 0; i < n_train; ++i) to_train[order[i]] = 1;
  }
  std::pair<std::vector<T>, std::vector<T>> out;
  for (std::size_t i = 0; i < items.size(); ++i) (to_train[i] ? out.first : out.second).push_back(items[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Multinomial Naive Bayes

struct NBModel {
  std::vector<std::string> classes;  // alphabetical
  std::vector<double> log_prior;
  std::vector<std::vector<double>> log_likelihood;  // [class][feature]
  double alpha = 1.0;
  std::string vocab_hash;
  SourceMode mode = SourceMode::M_plus_C;
  Weighting weighting = Weighting::tfidf;

  std::size_t n_features() const { return log_likelihood.empty() ? 0 : log_likelihood.front().size(); }

  std::optional<std::size_t> class_index(std::string_view name) const {
    for (std::size_t i = 0; i < classes.size(); ++i) {
      if (classes[i] == name) return i;
    }
    return std::nullopt;
  }
};

// Weights are treated as (possibly fractional) counts, so the same routine
// fits BoW and TF-IDF inputs.
inline NBModel train(const std::vector<SparseVector>& matrix, const std::vector<std::string>& labels,
                     std::size_t n_features, double alpha = 1.0) {
  if (matrix.empty()) throw std::invalid_argument("train: empty training set");
  if (matrix.size() != labels.size()) throw std::invalid_argument("train: matrix/labels size mismatch");
  if (!(alpha > 0.0)) throw std::invalid_argument("train: alpha must be > 0");
  if (n_features == 0) throw std::invalid_argument("train: empty vocabulary");

  NBModel m;
  m.alpha = alpha;
  m.classes = labels;
  std::sort(m.classes.begin(), m.classes.end());
  m.classes.erase(std::unique(m.classes.begin(), m.classes.end()), m.classes.end());
  const std::size_t c = m.classes.size();

  std::vector<double> docs_per_class(c, 0);
  std::vector<std::vector<double>> weight(c, std::vector<double>(n_features, 0.0));
  for (std::size_t d = 0; d < matrix.size(); ++d) {
    const auto ci = *m.class_index(labels[d]);
    docs_per_class[ci] += 1;
    for (const auto& e : matrix[d].entries) {
      if (e.id >= n_features) throw std::invalid_argument("train: feature id outside vocabulary");
      weight[ci][e.id] += e.weight;
    }
  }

  const double n = static_cast<double>(matrix.size());
  m.log_prior.resize(c);
  m.log_likelihood.assign(c, std::vector<double>(n_features));
  for (std::size_t ci = 0; ci < c; ++ci) {
    m.log_prior[ci] = std::log(docs_per_class[ci] / n);
    double total = 0;
    for (double w : weight[ci]) total += w;
    const double denom = std::log(static_cast<double>(n_features) * alpha + total);
    for (std::size_t f = 0; f < n_features; ++f) {
      m.log_likelihood[ci][f] = std::log(alpha + weight[ci][f]) - denom;
    }
  }
  return m;
}

struct Prediction {
  std::vector<double> probabilities;  // aligned with NBModel::classes
  std::size_t predicted_index = 0;
  std::string predicted_class;
  double p_max = 0;
};

// Posterior over classes, computed in log space with max-subtraction.
inline Prediction predict_proba(const NBModel& model, const SparseVector& v) {
  const std::size_t c = model.classes.size();
  std::vector<double> joint(model.log_prior);
  for (const auto& e : v.entries) {
    if (e.id >= model.n_features()) throw std::invalid_argument("predict_proba: dimension mismatch");
    for (std::size_t ci = 0; ci < c; ++ci) joint[ci] += e.weight * model.log_likelihood[ci][e.id];
  }
  const double top = *std::max_element(joint.begin(), joint.end());
  double z = 0;
  for (double& j : joint) {
    j = std::exp(j - top);
    z += j;
  }
  Prediction p;
  p.probabilities.resize(c);
  for (std::size_t ci = 0; ci < c; ++ci) {
    p.probabilities[ci] = joint[ci] / z;
    if (p.probabilities[ci] > p.probabilities[p.predicted_index]) p.predicted_index = ci;
  }
  p.predicted_class = model.classes[p.predicted_index];
  p.p_max = p.probabilities[p.predicted_index];
  return p;
}

inline std::optional<std::string> classify_unlabeled(const Prediction& p, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw std::invalid_argument("threshold must be in [0, 1]");
  if (p.p_max >= threshold) return p.predicted_class;
  return std::nullopt;
}

inline std::optional<std::string> classify_unlabeled(const NBModel& model, const SparseVector& v,
                                                     double threshold) {
  return classify_unlabeled(predict_proba(model, v), threshold);
}

// ---------------------------------------------------------------------------
// Evaluation

struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<std::size_t>> counts;  // [actual][predicted]
  std::vector<std::vector<double>> row_percent;
  std::vector<bool> empty_row;
};

struct Evaluation {
  double accuracy = 0;  // percent
  ConfusionMatrix confusion;
  std::vector<double> per_class_accuracy;  // percent, diagonal of row_percent
  std::size_t n = 0;
};

inline ConfusionMatrix confusion_matrix(const std::vector<std::string>& classes,
                                        const std::vector<std::size_t>& actual,
                                        const std::vector<std::size_t>& predicted) {
  ConfusionMatrix cm;
  cm.classes = classes;
  const std::size_t c = classes.size();
  cm.counts.assign(c, std::vector<std::size_t>(c, 0));
  for (std::size_t i = 0; i < actual.size(); ++i) ++cm.counts[actual[i]][predicted[i]];
  cm.row_percent.assign(c, std::vector<double>(c, 0.0));
  cm.empty_row.assign(c, false);
  for (std::size_t r = 0; r < c; ++r) {
    std::size_t total = 0;
    for (auto v : cm.counts[r]) total += v;
    cm.empty_row[r] = total == 0;
    if (total == 0) continue;
    for (std::size_t col = 0; col < c; ++col) {
      cm.row_percent[r][col] = 100.0 * static_cast<double>(cm.counts[r][col]) / static_cast<double>(total);
    }
  }
  return cm;
}

inline Evaluation evaluate(const NBModel& model, const std::vector<SparseVector>& vectors,
                           const std::vector<std::string>& labels) {
  if (vectors.empty()) throw std::invalid_argument("evaluate: empty validation set");
  if (vectors.size() != labels.size()) throw std::invalid_argument("evaluate: size mismatch");
  std::vector<std::size_t> actual, predicted;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto truth = model.class_index(labels[i]);
    if (!truth) throw std::invalid_argument("evaluate: label '" + labels[i] + "' unknown to the model");
    const auto p = predict_proba(model, vectors[i]);
    actual.push_back(*truth);
    predicted.push_back(p.predicted_index);
    correct += p.predicted_index == *truth ? 1 : 0;
  }
  Evaluation ev;
  ev.n = vectors.size();
  ev.accuracy = 100.0 * static_cast<double>(correct) / static_cast<double>(ev.n);
  ev.confusion = confusion_matrix(model.classes, actual, predicted);
  for (std::size_t r = 0; r < model.classes.size(); ++r) ev.per_class_accuracy.push_back(ev.confusion.row_percent[r][r]);
  return ev;
}

struct SweepPoint {
  double threshold = 0;
  std::size_t accepted = 0;
  std::size_t true_accepted = 0;
  double true_positive_rate = 0;  // fraction of accepted that are true
  double retained = 0;            // fraction of all true items still accepted
};

// Thresholds i/steps for i = 0..steps (default 0.00, 0.01, ..., 1.00).
inline std::vector<double> threshold_grid(int steps = 100) {
  std::vector<double> g;
  for (int i = 0; i <= steps; ++i) g.push_back(static_cast<double>(i) / steps);
  return g;
}

inline std::vector<SweepPoint> threshold_sweep(const std::vector<std::pair<Prediction, bool>>& predictions,
                                               const std::vector<double>& grid = threshold_grid()) {
  if (predictions.empty()) throw std::invalid_argument("threshold_sweep: no predictions");
  std::size_t total_true = 0;
  for (const auto& [p, truth] : predictions) total_true += truth ? 1 : 0;
  std::vector<SweepPoint> out;
  for (double t : grid) {
    SweepPoint s;
    s.threshold = t;
    for (const auto& [p, truth] : predictions) {
      if (p.p_max < t) continue;
      ++s.accepted;
      s.true_accepted += truth ? 1 : 0;
    }
    s.true_positive_rate = static_cast<double>(s.true_accepted) / static_cast<double>(std::max<std::size_t>(1, s.accepted));
    s.retained = static_cast<double>(s.true_accepted) / static_cast<double>(std::max<std::size_t>(1, total_true));
    out.push_back(s);
  }
  return out;
}

struct RankedTerm {
  std::string term;
  double score = 0;
};

// Per class, terms ranked by the margin between the class's log-likelihood
// and the best other class's, descending; ties by term.
inline std::vector<std::vector<RankedTerm>> top_features(const NBModel& model, const Vocabulary& vocab,
                                                         std::size_t n = 10) {
  const std::size_t k = model.n_features();
  if (vocab.terms.size() != k) throw std::invalid_argument("top_features: vocabulary does not match model");
  if (n > k) throw std::invalid_argument("top_features: n exceeds the number of features");
  std::vector<std::vector<RankedTerm>> out;
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    std::vector<RankedTerm> ranked;
    ranked.reserve(k);
    for (std::size_t f = 0; f < k; ++f) {
      double best_other = -std::numeric_limits<double>::infinity();
      for (std::size_t o = 0; o < model.classes.size(); ++o) {
        if (o != c) best_other = std::max(best_other, model.log_likelihood[o][f]);
      }
      const double score = model.classes.size() == 1 ? model.log_likelihood[c][f]
                                                     : model.log_likelihood[c][f] - best_other;
      ranked.push_back({vocab.terms[f], score});
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedTerm& a, const RankedTerm& b) {
      return a.score != b.score ? a.score > b.score : a.term < b.term;
    });
    ranked.resize(n);
    out.push_back(std::move(ranked));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization ("nbmodel/1")

inline constexpr std::string_view kModelVersion = "nbmodel/1";

inline nlohmann::ordered_json to_json(const NBModel& m) {
  nlohmann::ordered_json j;
  j["version"] = std::string(kModelVersion);
  j["classes"] = m.classes;
  std::vector<double> prior;
  for (double v : m.log_prior) prior.push_back(round12(v));
  j["log_prior"] = prior;
  j["n_features"] = m.n_features();
  std::vector<double> flat;
  flat.reserve(m.classes.size() * m.n_features());
  for (const auto& row : m.log_likelihood) {
    for (double v : row) flat.push_back(round12(v));
  }
  j["log_likelihood"] = flat;
  j["alpha"] = m.alpha;
  j["vocab_hash"] = m.vocab_hash;
  j["mode"] = std::string(to_string(m.mode));
  j["weighting"] = std::string(to_string(m.weighting));
  return j;
}

inline NBModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("model must be a JSON object");
  if (detail::require_string(j, "version") != kModelVersion) throw DataError("unsupported model version");
  NBModel m;
  try {
    m.classes = j.at("classes").get<std::vector<std::string>>();
    m.log_prior = j.at("log_prior").get<std::vector<double>>();
    const auto k = j.at("n_features").get<std::size_t>();
    const auto flat = j.at("log_likelihood").get<std::vector<double>>();
    if (m.log_prior.size() != m.classes.size() || flat.size() != m.classes.size() * k) {
      throw DataError("model arrays have inconsistent sizes");
    }
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
      m.log_likelihood.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(c * k),
                                    flat.begin() + static_cast<std::ptrdiff_t>((c + 1) * k));
    }
    m.alpha = j.at("alpha").get<double>();
    m.vocab_hash = j.at("vocab_hash").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model: ") + e.what());
  }
  const auto mode = parse_source_mode(detail::require_string(j, "mode"));
  const auto weighting = parse_weighting(detail::require_string(j, "weighting"));
  if (!mode || !weighting) throw DataError("model names an unknown mode or weighting");
  m.mode = *mode;
  m.weighting = *weighting;
  return m;
}

}  // namespace sensitrack
