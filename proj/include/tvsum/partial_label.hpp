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

// Linear softmax face classifier trained from partial (candidate-set) labels.
//
// Each training face x carries a candidate set Y of which exactly one label is
// correct. Two objectives are supported:
//
//   average cross-entropy   L = -(1/|Y|) sum_{y in Y} log P(y|x)
//   hard EM                 L = -log max_{y in Y} P(y|x)
//
// Both reduce to ordinary cross-entropy when |Y| = 1. Training runs mini-batch
// SGD either on all data at once or incrementally, one episode at a time over
// everything seen so far, optionally disambiguating the candidate sets after
// each stage with class prototypes in embedding space.

#ifndef TVSUM_PARTIAL_LABEL_HPP_
#define TVSUM_PARTIAL_LABEL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tvsum/embeddings.hpp"
#include "tvsum/error.hpp"

namespace tvsum {

// Ordered list of every character name; index <-> name is fixed for a run.
class LabelSpace {
 public:
  LabelSpace() = default;
  explicit LabelSpace(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw ValidationError("empty label space");
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (!index_.emplace(names_[i], i).second) {
        throw ValidationError("duplicate label '" + names_[i] + "'");
      }
    }
  }

  std::size_t size() const { return names_.size(); }
  const std::string &name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string> &names() const { return names_; }
  std::optional<std::size_t> index(const std::string &name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const LabelSpace &a, const LabelSpace &b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

using LabelSet = std::vector<std::size_t>;  // sorted, unique label indices

struct PartialExample {
  Vector x;
  LabelSet labels;           // current candidates
  LabelSet original_labels;  // candidates before any relabeling
  int episode = 0;
  std::string id;
};

inline PartialExample make_example(Vector x, LabelSet labels, int episode = 0,
                                   std::string id = {}) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return {std::move(x), labels, labels, episode, std::move(id)};
}

// A face with a single, manually verified label.
struct LabeledFace {
  Vector x;
  std::size_t label = 0;
};

class SoftmaxModel {
 public:
  SoftmaxModel() = default;
  SoftmaxModel(LabelSpace labels, std::size_t dim, std::uint64_t seed = 0)
      : labels_(std::move(labels)),
        dim_(dim),
        weights_(labels_.size() * dim, 0.0),
        biases_(labels_.size(), 0.0),
        seed_(seed) {}

  const LabelSpace &label_space() const { return labels_; }
  std::size_t dim() const { return dim_; }
  std::size_t num_labels() const { return labels_.size(); }
  std::uint64_t seed() const { return seed_; }

  // Row-major |labels| x dim.
  std::vector<double> &weights() { return weights_; }
  const std::vector<double> &weights() const { return weights_; }
  std::vector<double> &biases() { return biases_; }
  const std::vector<double> &biases() const { return biases_; }

  Vector logits(std::span<const double> x) const {
    check_input(x);
    Vector z(num_labels());
    for (std::size_t k = 0; k < z.size(); ++k) {
      z[k] = dot(std::span(weights_).subspan(k * dim_, dim_), x) + biases_[k];
    }
    return z;
  }

  Vector log_probabilities(std::span<const double> x) const {
    Vector z = logits(x);
    double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - mx);
    double lse = mx + std::log(sum);
    for (double &v : z) v -= lse;
    return z;
  }

  Vector predict(std::span<const double> x) const {
    Vector z = logits(x);
    double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double &v : z) sum += (v = std::exp(v - mx));
    for (double &v : z) v /= sum;
    return z;
  }

  std::size_t predict_label(std::span<const double> x) const {
    Vector z = logits(x);
    return static_cast<std::size_t>(
        std::max_element(z.begin(), z.end()) - z.begin());
  }

  friend bool operator==(const SoftmaxModel &, const SoftmaxModel &) = default;

 private:
  void check_input(std::span<const double> x) const {
    if (x.size() != dim_) {
      throw ValidationError("input has dimension " + std::to_string(x.size()) +
                            ", model expects " + std::to_string(dim_));
    }
    for (double v : x) {
      if (!std::isfinite(v)) throw ValidationError("non-finite input");
    }
  }

  LabelSpace labels_;
  std::size_t dim_ = 0;
  std::vector<double> weights_;
  std::vector<double> biases_;
  std::uint64_t seed_ = 0;
};

enum class Loss { kAveCE, kHardEM };
enum class Schedule { kAllAtOnce, kIncremental };

inline std::string_view loss_name(Loss l) {
  return l == Loss::kAveCE ? "aveCE" : "hardEM";
}
inline std::string_view schedule_name(Schedule s) {
  return s == Schedule::kAllAtOnce ? "all_at_once" : "incremental";
}
inline std::optional<Loss> parse_loss(std::string_view s) {
  if (s == "aveCE" || s == "avece" || s == "ave_ce") return Loss::kAveCE;
  if (s == "hardEM" || s == "hardem" || s == "hard_em") return Loss::kHardEM;
  return std::nullopt;
}
inline std::optional<Schedule> parse_schedule(std::string_view s) {
  if (s == "all_at_once" || s == "all-at-once") return Schedule::kAllAtOnce;
  if (s == "incremental") return Schedule::kIncremental;
  return std::nullopt;
}

struct TrainConfig {
  Loss loss = Loss::kAveCE;
  Schedule schedule = Schedule::kIncremental;
  bool relabel = true;
  double learning_rate = 0.1;
  int epochs_per_stage = 20;
  int batch_size = 32;
  std::uint64_t seed = 0;
  // Train/relabel rounds when there is only one stage.
  int relabel_iterations = 3;

  void validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
      throw ValidationError("learning_rate must be > 0");
    }
    if (epochs_per_stage < 1) throw ValidationError("epochs_per_stage must be >= 1");
    if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
    if (relabel_iterations < 1) {
      throw ValidationError("relabel_iterations must be >= 1");
    }
  }
};

namespace detail {

inline void check_labels(const LabelSet &labels, std::size_t num_labels) {
  if (labels.empty()) throw ValidationError("empty candidate label set");
  for (std::size_t y : labels) {
    if (y >= num_labels) throw ValidationError("label index out of range");
  }
}

// Candidate with the highest probability; ties go to the smaller index.
inline std::size_t best_candidate(const Vector &log_p, const LabelSet &labels) {
  std::size_t best = labels.front();
  for (std::size_t y : labels) {
    if (log_p[y] > log_p[best]) best = y;
  }
  return best;
}

}  // namespace detail

// Partial-label loss of one example. When grad_logits is given it receives
// dL/dz for the |labels| logits.
inline double partial_label_loss(const SoftmaxModel &model,
                                 std::span<const double> x,
                                 const LabelSet &labels, Loss loss,
                                 Vector *grad_logits = nullptr) {
  detail::check_labels(labels, model.num_labels());
  Vector log_p = model.log_probabilities(x);
  double value = 0.0;
  if (grad_logits) {
    grad_logits->resize(log_p.size());
    for (std::size_t k = 0; k < log_p.size(); ++k) {
      (*grad_logits)[k] = std::exp(log_p[k]);
    }
  }
  if (loss == Loss::kAveCE) {
    double inv = 1.0 / static_cast<double>(labels.size());
    for (std::size_t y : labels) {
      value -= log_p[y];
      if (grad_logits) (*grad_logits)[y] -= inv;
    }
    value *= inv;
  } else {
    std::size_t y = detail::best_candidate(log_p, labels);
    value = -log_p[y];
    if (grad_logits) (*grad_logits)[y] -= 1.0;
  }
  return value;
}

inline double loss_ave_ce(const SoftmaxModel &model, const PartialExample &ex) {
  return partial_label_loss(model, ex.x, ex.labels, Loss::kAveCE);
}

inline double loss_hard_em(const SoftmaxModel &model,
                           const PartialExample &ex) {
  return partial_label_loss(model, ex.x, ex.labels, Loss::kHardEM);
}

// Gradient of the loss with respect to every parameter, laid out as
// [weights (row-major), biases].
inline Vector parameter_gradient(const SoftmaxModel &model,
                                 std::span<const double> x,
                                 const LabelSet &labels, Loss loss) {
  Vector dz;
  partial_label_loss(model, x, labels, loss, &dz);
  const std::size_t d = model.dim(), n = model.num_labels();
  Vector g(n * d + n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < d; ++i) g[k * d + i] = dz[k] * x[i];
    g[n * d + k] = dz[k];
  }
  return g;
}

struct RelabelResult {
  std::vector<PartialExample> examples;
  std::size_t changed = 0;         // examples whose candidate set changed
  std::size_t without_prototype = 0;  // kept their set: no prototype available
};

// Disambiguates candidate sets with class prototypes:
//   1. each example is assigned its most probable label among its original
//      candidates;
//   2. a prototype is the mean x of the examples assigned to a label;
//   3. each example becomes the singleton of the closest (Euclidean)
//      prototype among its original candidates, ties to the smaller index.
// Labels outside the original candidate set are never assigned.
inline RelabelResult prototype_relabel(const SoftmaxModel &model,
                                       std::vector<PartialExample> examples) {
  const std::size_t n_labels = model.num_labels(), d = model.dim();
  std::vector<Vector> sums(n_labels, Vector(d, 0.0));
  std::vector<std::size_t> counts(n_labels, 0);
  for (const PartialExample &ex : examples) {
    detail::check_labels(ex.original_labels, n_labels);
    std::size_t y =
        detail::best_candidate(model.log_probabilities(ex.x), ex.original_labels);
    for (std::size_t i = 0; i < d; ++i) sums[y][i] += ex.x[i];
    ++counts[y];
  }
  for (std::size_t y = 0; y < n_labels; ++y) {
    if (counts[y] == 0) continue;
    for (double &v : sums[y]) v /= static_cast<double>(counts[y]);
  }
  RelabelResult result;
  for (PartialExample &ex : examples) {
    std::optional<std::size_t> best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t y : ex.original_labels) {
      if (counts[y] == 0) continue;
      double dist = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        double diff = ex.x[i] - sums[y][i];
        dist += diff * diff;
      }
      if (dist < best_dist) {
        best_dist = dist;
        best = y;
      }
    }
    LabelSet next = best ? LabelSet{*best} : ex.original_labels;
    if (!best) ++result.without_prototype;
    if (next != ex.labels) ++result.changed;
    ex.labels = std::move(next);
  }
  result.examples = std::move(examples);
  return result;
}

struct StageMetrics {
  int stage = 0;
  int episode = 0;  // last episode included in the stage
  int round = 0;
  std::size_t examples = 0;
  double mean_loss = 0.0;  // over the final epoch
  std::size_t relabeled = 0;
  std::size_t without_prototype = 0;
};

struct TrainResult {
  SoftmaxModel model;
  std::vector<PartialExample> examples;  // candidate sets after training
  std::vector<StageMetrics> metrics;
};

namespace detail {

inline void validate_examples(const std::vector<PartialExample> &examples,
                              const LabelSpace &labels) {
  if (examples.empty()) throw ValidationError("no training examples");
  const std::size_t d = examples.front().x.size();
  if (d == 0) throw ValidationError("empty feature vector");
  for (const PartialExample &ex : examples) {
    if (ex.x.size() != d) throw ValidationError("inconsistent feature dims");
    for (double v : ex.x) {
      if (!std::isfinite(v)) throw ValidationError("non-finite feature");
    }
    check_labels(ex.labels, labels.size());
    check_labels(ex.original_labels, labels.size());
  }
}

// Runs `epochs` epochs of mini-batch SGD over examples[order]. Returns the
// mean loss of the last epoch. Gradients are accumulated in fixed order, so
// results depend only on the RNG state.
template <class LossGrad>
double sgd_epochs(std::vector<double> &weights, std::vector<double> &biases,
                  std::size_t dim, const std::vector<PartialExample> &examples,
                  std::vector<std::size_t> order, int epochs, int batch_size,
                  double lr, std::mt19937_64 &rng, LossGrad &&loss_grad,
                  std::string_view where) {
  const std::size_t n_labels = biases.size();
  std::vector<double> gw(weights.size()), gb(biases.size());
  Vector dz;
  double epoch_loss = 0.0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(batch_size)) {
      std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(batch_size));
      std::fill(gw.begin(), gw.end(), 0.0);
      std::fill(gb.begin(), gb.end(), 0.0);
      double batch_loss = 0.0;
      for (std::size_t b = start; b < stop; ++b) {
        const PartialExample &ex = examples[order[b]];
        batch_loss += loss_grad(ex, dz);
        for (std::size_t k = 0; k < n_labels; ++k) {
          if (dz[k] == 0.0) continue;
          for (std::size_t i = 0; i < dim; ++i) gw[k * dim + i] += dz[k] * ex.x[i];
          gb[k] += dz[k];
        }
      }
      if (!std::isfinite(batch_loss)) {
        throw TrainingError(std::string(where) + ": non-finite loss in epoch " +
                            std::to_string(epoch) + ", batch at " +
                            std::to_string(start));
      }
      epoch_loss += batch_loss;
      double scale = lr / static_cast<double>(stop - start);
      for (std::size_t i = 0; i < weights.size(); ++i) weights[i] -= scale * gw[i];
      for (std::size_t k = 0; k < n_labels; ++k) biases[k] -= scale * gb[k];
    }
    epoch_loss /= static_cast<double>(order.size());
  }
  for (double v : weights) {
    if (!std::isfinite(v)) {
      throw TrainingError(std::string(where) + ": parameters diverged");
    }
  }
  return epoch_loss;
}

}  // namespace detail

// Trains a softmax model. Stages are the distinct episodes in ascending order
// (incremental) or a single stage with everything (all at once); each stage
// warm-starts from the previous parameters and trains on every example seen
// so far. With relabeling, the seen examples are relabeled after each round.
// A single-stage run with relabeling performs relabel_iterations rounds.
inline TrainResult train(std::vector<PartialExample> examples,
                         const LabelSpace &labels, const TrainConfig &cfg) {
  cfg.validate();
  detail::validate_examples(examples, labels);
  const std::size_t dim = examples.front().x.size();
  TrainResult result{SoftmaxModel(labels, dim, cfg.seed), {}, {}};
  std::mt19937_64 rng(cfg.seed);

  std::vector<int> stage_episodes;
  if (cfg.schedule == Schedule::kIncremental) {
    std::set<int> eps;
    for (const PartialExample &ex : examples) eps.insert(ex.episode);
    stage_episodes.assign(eps.begin(), eps.end());
  } else {
    int last = examples.front().episode;
    for (const PartialExample &ex : examples) last = std::max(last, ex.episode);
    stage_episodes.push_back(last);
  }
  const int rounds = (cfg.relabel && stage_episodes.size() == 1)
                         ? cfg.relabel_iterations
                         : 1;

  SoftmaxModel &model = result.model;
  auto loss_grad = [&](const PartialExample &ex, Vector &dz) {
    return partial_label_loss(model, ex.x, ex.labels, cfg.loss, &dz);
  };
  std::vector<std::size_t> seen;
  for (std::size_t s = 0; s < stage_episodes.size(); ++s) {
    seen.clear();
    for (std::size_t i = 0; i < examples.size(); ++i) {
      if (examples[i].episode <= stage_episodes[s]) seen.push_back(i);
    }
    for (int round = 0; round < rounds; ++round) {
      StageMetrics m;
      m.stage = static_cast<int>(s);
      m.episode = stage_episodes[s];
      m.round = round;
      m.examples = seen.size();
      m.mean_loss = detail::sgd_epochs(
          model.weights(), model.biases(), dim, examples, seen,
          cfg.epochs_per_stage, cfg.batch_size, cfg.learning_rate, rng,
          loss_grad, "stage " + std::to_string(s));
      if (cfg.relabel) {
        std::vector<PartialExample> subset;
        for (std::size_t i : seen) subset.push_back(examples[i]);
        RelabelResult r = prototype_relabel(model, std::move(subset));
        for (std::size_t j = 0; j < seen.size(); ++j) {
          examples[seen[j]] = std::move(r.examples[j]);
        }
        m.relabeled = r.changed;
        m.without_prototype = r.without_prototype;
      }
      result.metrics.push_back(m);
    }
  }
  result.examples = std::move(examples);
  return result;
}

}  // namespace tvsum

#endif  // TVSUM_PARTIAL_LABEL_HPP_
