// Copyright 2026 The tvsum Authors.
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

// Reference face classifiers and accuracy reporting.

#ifndef TVSUM_FACE_BASELINES_HPP_
#define TVSUM_FACE_BASELINES_HPP_

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "tvsum/partial_label.hpp"

namespace tvsum {

template <class C>
concept Classifier = requires(const C &c, std::span<const double> x) {
  { c.predict_label(x) } -> std::convertible_to<std::size_t>;
  { c.label_space() } -> std::convertible_to<const LabelSpace &>;
};

// Independent per-label logistic regressions; every weak label is treated as
// a positive.
class OneVsRestModel {
 public:
  OneVsRestModel() = default;
  OneVsRestModel(LabelSpace labels, std::size_t dim)
      : labels_(std::move(labels)),
        dim_(dim),
        weights_(labels_.size() * dim, 0.0),
        biases_(labels_.size(), 0.0) {}

  const LabelSpace &label_space() const { return labels_; }
  std::size_t dim() const { return dim_; }
  std::vector<double> &weights() { return weights_; }
  std::vector<double> &biases() { return biases_; }

  // Per-label sigmoid scores (not a distribution).
  Vector predict_scores(std::span<const double> x) const {
    if (x.size() != dim_) throw ValidationError("input dimension mismatch");
    Vector s(labels_.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
      double z =
          dot(std::span(weights_).subspan(k * dim_, dim_), x) + biases_[k];
      s[k] = 1.0 / (1.0 + std::exp(-z));
    }
    return s;
  }

  std::size_t predict_label(std::span<const double> x) const {
    Vector s = predict_scores(x);
    return static_cast<std::size_t>(std::max_element(s.begin(), s.end()) -
                                    s.begin());
  }

 private:
  LabelSpace labels_;
  std::size_t dim_ = 0;
  std::vector<double> weights_;
  std::vector<double> biases_;
};

// Binary cross-entropy summed over labels; dz receives dL/dz per label.
inline double one_vs_rest_loss(const OneVsRestModel &model,
                               const PartialExample &ex, Vector &dz) {
  Vector s = model.predict_scores(ex.x);
  dz.assign(s.size(), 0.0);
  double loss = 0.0;
  constexpr double kEps = 1e-300;
  for (std::size_t k = 0; k < s.size(); ++k) {
    bool pos = std::binary_search(ex.labels.begin(), ex.labels.end(), k);
    loss -= pos ? std::log(std::max(s[k], kEps))
                : std::log(std::max(1.0 - s[k], kEps));
    dz[k] = s[k] - (pos ? 1.0 : 0.0);
  }
  return loss;
}

// Trains the one-vs-rest baseline on all examples at once for
// epochs_per_stage epochs with the same SGD settings as the softmax model.
inline OneVsRestModel naive_multilabel_baseline(
    const std::vector<PartialExample> &examples, const LabelSpace &labels,
    const TrainConfig &cfg) {
  cfg.validate();
  detail::validate_examples(examples, labels);
  OneVsRestModel model(labels, examples.front().x.size());
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  detail::sgd_epochs(
      model.weights(), model.biases(), model.dim(), examples, order,
      cfg.epochs_per_stage, cfg.batch_size, cfg.learning_rate, rng,
      [&](const PartialExample &ex, Vector &dz) {
        return one_vs_rest_loss(model, ex, dz);
      },
      "one-vs-rest");
  return model;
}

// ---------------------------------------------------------------------------
// k-means

struct KMeansResult {
  std::vector<Vector> centers;
  std::vector<std::size_t> assignment;
  int iterations = 0;
};

inline double squared_distance(std::span<const double> a,
                               std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline std::size_t nearest_center(std::span<const double> x,
                                  const std::vector<Vector> &centers) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    double d = squared_distance(x, centers[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

// k-means++ seeding.
inline std::vector<Vector> kmeans_plus_plus(const std::vector<Vector> &points,
                                            std::size_t k,
                                            std::mt19937_64 &rng) {
  if (k == 0 || points.size() < k) {
    throw ValidationError("k-means needs 1 <= k <= number of points");
  }
  std::vector<Vector> centers;
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
  centers.push_back(points[pick(rng)]);
  std::vector<double> d2(points.size());
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      d2[i] = squared_distance(points[i], centers[nearest_center(points[i], centers)]);
      total += d2[i];
    }
    std::size_t next;
    if (total == 0.0) {
      next = pick(rng);
    } else {
      std::discrete_distribution<std::size_t> dist(d2.begin(), d2.end());
      next = dist(rng);
    }
    centers.push_back(points[next]);
  }
  return centers;
}

// Lloyd iterations from the given centers. Stops when no center moves more
// than tol (Euclidean) or after max_iter rounds. An empty cluster is re-seeded
// with the point farthest from its current center.
inline KMeansResult lloyd(const std::vector<Vector> &points,
                          std::vector<Vector> centers, int max_iter = 300,
                          double tol = 1e-6) {
  KMeansResult r;
  const std::size_t k = centers.size(), d = centers.front().size();
  r.assignment.assign(points.size(), 0);
  for (int it = 0; it < max_iter; ++it) {
    r.iterations = it + 1;
    for (std::size_t i = 0; i < points.size(); ++i) {
      r.assignment[i] = nearest_center(points[i], centers);
    }
    std::vector<Vector> next(k, Vector(d, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      for (std::size_t j = 0; j < d; ++j) next[r.assignment[i]][j] += points[i][j];
      ++counts[r.assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
          double dd = squared_distance(points[i], centers[r.assignment[i]]);
          if (dd > far_d) {
            far_d = dd;
            far = i;
          }
        }
        next[c] = points[far];
        r.assignment[far] = c;
        continue;
      }
      for (double &v : next[c]) v /= static_cast<double>(counts[c]);
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      shift = std::max(shift, std::sqrt(squared_distance(next[c], centers[c])));
    }
    centers = std::move(next);
    if (shift <= tol) break;
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    r.assignment[i] = nearest_center(points[i], centers);
  }
  r.centers = std::move(centers);
  return r;
}

struct KMeansBaselineResult {
  double accuracy = 0.0;
  std::vector<std::size_t> cluster_labels;
  KMeansResult clustering;
};

// Clusters train and test faces jointly, names each cluster by the weighted
// majority of its training members' candidate labels (each candidate counts
// 1/|Y|), and scores test faces by their cluster's name. A cluster without
// training members takes the global majority.
inline KMeansBaselineResult kmeans_baseline(
    const std::vector<PartialExample> &train_examples,
    const std::vector<LabeledFace> &test, const LabelSpace &labels,
    std::size_t k, std::uint64_t seed = 0) {
  detail::validate_examples(train_examples, labels);
  std::vector<Vector> points;
  for (const auto &ex : train_examples) points.push_back(ex.x);
  for (const auto &f : test) points.push_back(f.x);
  std::mt19937_64 rng(seed);
  KMeansBaselineResult result;
  result.clustering = lloyd(points, kmeans_plus_plus(points, k, rng));

  std::vector<std::vector<double>> votes(k, std::vector<double>(labels.size()));
  std::vector<double> global(labels.size(), 0.0);
  for (std::size_t i = 0; i < train_examples.size(); ++i) {
    const LabelSet &ys = train_examples[i].original_labels;
    for (std::size_t y : ys) {
      double w = 1.0 / static_cast<double>(ys.size());
      votes[result.clustering.assignment[i]][y] += w;
      global[y] += w;
    }
  }
  auto argmax = [](const std::vector<double> &v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) -
                                    v.begin());
  };
  std::size_t fallback = argmax(global);
  for (std::size_t c = 0; c < k; ++c) {
    bool any = std::any_of(votes[c].begin(), votes[c].end(),
                           [](double v) { return v > 0.0; });
    result.cluster_labels.push_back(any ? argmax(votes[c]) : fallback);
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    std::size_t c = result.clustering.assignment[train_examples.size() + i];
    if (result.cluster_labels[c] == test[i].label) ++correct;
  }
  result.accuracy = test.empty() ? 0.0
                                 : static_cast<double>(correct) /
                                       static_cast<double>(test.size());
  return result;
}

// ---------------------------------------------------------------------------
// Evaluation

// Pearson's r; nullopt when fewer than two pairs or either side is constant.
inline std::optional<double> pearson(std::span<const double> xs,
                                     std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) return std::nullopt;
  double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

struct LabelAccuracy {
  std::size_t count = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
};

struct AccuracyReport {
  double micro = 0.0;
  std::map<std::string, LabelAccuracy> per_label;
  // Correlation between per-label face frequency and per-label accuracy,
  // over labels present in the test set.
  std::optional<double> frequency_accuracy_r;
};

// Micro accuracy on singly-labeled faces. Label frequency defaults to the
// number of test faces per label; pass `frequency` (e.g. training counts) to
// correlate against something else.
template <Classifier C>
AccuracyReport evaluate_accuracy(
    const C &model, const std::vector<LabeledFace> &test,
    const std::map<std::size_t, double> *frequency = nullptr) {
  const LabelSpace &labels = model.label_space();
  AccuracyReport report;
  std::map<std::size_t, LabelAccuracy> by_index;
  std::size_t correct = 0;
  for (const LabeledFace &f : test) {
    if (f.label >= labels.size()) throw ValidationError("test label out of range");
    LabelAccuracy &acc = by_index[f.label];
    ++acc.count;
    if (model.predict_label(f.x) == f.label) {
      ++acc.correct;
      ++correct;
    }
  }
  report.micro = test.empty() ? 0.0
                              : static_cast<double>(correct) /
                                    static_cast<double>(test.size());
  std::vector<double> freq, acc;
  for (auto &[y, a] : by_index) {
    a.accuracy = static_cast<double>(a.correct) / static_cast<double>(a.count);
    report.per_label[labels.name(y)] = a;
    double f = static_cast<double>(a.count);
    if (frequency) {
      auto it = frequency->find(y);
      f = it == frequency->end() ? 0.0 : it->second;
    }
    freq.push_back(f);
    acc.push_back(a.accuracy);
  }
  report.frequency_accuracy_r = pearson(freq, acc);
  return report;
}

}  // namespace tvsum

#endif  // TVSUM_FACE_BASELINES_HPP_
