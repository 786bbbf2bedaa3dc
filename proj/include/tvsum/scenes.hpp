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

// Scene segmentation from per-minute character-mention fractions, the two
// tweet-volume baselines, and interval-matching evaluation.

#ifndef TVSUM_SCENES_HPP_
#define TVSUM_SCENES_HPP_

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tvsum/corpus.hpp"
#include "tvsum/error.hpp"

namespace tvsum {

struct SceneDetectorConfig {
  double k = 0.10;  // trigger: bin fraction must exceed k
  double m = 0.05;  // suppression: open-scene fraction must stay below m

  void validate() const {
    if (!(k > 0.0 && k <= 1.0)) throw ValidationError("k must be in (0, 1]");
    if (!(m >= 0.0 && m < 1.0)) throw ValidationError("m must be in [0, 1)");
    if (!(m < k)) throw ValidationError("m must be smaller than k");
  }
};

// A detected interval [start_t, end_t). trigger_characters is empty for the
// volume baselines, which are not character-driven.
struct Scene {
  Timestamp start_t = 0;
  Timestamp end_t = 0;
  CharacterSet trigger_characters;
  std::vector<std::string> message_ids;

  friend bool operator==(const Scene &, const Scene &) = default;
};

namespace detail {

inline Timestamp bins_end(const std::vector<MinuteBin> &bins) {
  return bins.back().start_t + 60;
}

// Fills message ids for scenes built from bin index ranges.
inline Scene scene_from_bins(const std::vector<MinuteBin> &bins,
                             std::size_t first, std::size_t last_exclusive,
                             CharacterSet triggers) {
  Scene s;
  s.start_t = bins[first].start_t;
  s.end_t = last_exclusive < bins.size() ? bins[last_exclusive].start_t
                                         : bins_end(bins);
  s.trigger_characters = std::move(triggers);
  for (std::size_t i = first; i < last_exclusive; ++i) {
    s.message_ids.insert(s.message_ids.end(), bins[i].message_ids.begin(),
                         bins[i].message_ids.end());
  }
  return s;
}

}  // namespace detail

// Scans bins in order. A new scene starts at bin b when some character's
// fraction in b exceeds k while its fraction over all messages of the
// currently open scene (bins before b) is below m. Every character that
// qualifies at b becomes a trigger of the same scene. The last scene runs to
// the end of the final bin.
inline std::vector<Scene> detect_scenes(const std::vector<MinuteBin> &bins,
                                        const SceneDetectorConfig &cfg) {
  cfg.validate();
  std::vector<std::pair<std::size_t, CharacterSet>> starts;
  std::map<std::string, std::size_t> open_mentions;
  std::size_t open_messages = 0;
  for (std::size_t b = 0; b < bins.size(); ++b) {
    const MinuteBin &bin = bins[b];
    CharacterSet triggers;
    for (const auto &[c, frac] : bin.mention_fraction) {
      if (!(frac > cfg.k)) continue;
      if (starts.empty()) {
        triggers.insert(c);
        continue;
      }
      auto it = open_mentions.find(c);
      double prior = 0.0;
      if (it != open_mentions.end() && open_messages > 0) {
        prior = static_cast<double>(it->second) /
                static_cast<double>(open_messages);
      }
      if (prior < cfg.m) triggers.insert(c);
    }
    if (!triggers.empty()) {
      starts.emplace_back(b, std::move(triggers));
      open_mentions.clear();
      open_messages = 0;
    }
    if (!starts.empty()) {
      for (const auto &[c, n] : bin.mention_count) open_mentions[c] += n;
      open_messages += bin.size();
    }
  }
  std::vector<Scene> scenes;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    std::size_t last =
        i + 1 < starts.size() ? starts[i + 1].first : bins.size();
    scenes.push_back(detail::scene_from_bins(bins, starts[i].first, last,
                                             std::move(starts[i].second)));
  }
  return scenes;
}

inline std::vector<std::size_t> bin_counts(const std::vector<MinuteBin> &bins) {
  std::vector<std::size_t> counts;
  counts.reserve(bins.size());
  for (const MinuteBin &b : bins) counts.push_back(b.size());
  return counts;
}

// Volume-peak baseline. A peak is a maximal run of equal counts whose
// neighbours on both sides are strictly lower. The scene spans the strictly
// increasing ascent before the peak through the strictly decreasing descent
// after it. When two peaks share a valley bin, the earlier scene ends where
// the later one starts.
inline std::vector<Scene> baseline_volume_peaks(
    const std::vector<MinuteBin> &bins) {
  std::vector<std::size_t> c = bin_counts(bins);
  std::vector<std::pair<std::size_t, std::size_t>> spans;  // [first, last]
  std::size_t i = 1;
  while (i + 1 < c.size()) {
    std::size_t j = i;
    while (j + 1 < c.size() && c[j + 1] == c[i]) ++j;
    if (j + 1 < c.size() && c[i - 1] < c[i] && c[j + 1] < c[j]) {
      std::size_t lo = i - 1;
      while (lo > 0 && c[lo - 1] < c[lo]) --lo;
      std::size_t hi = j + 1;
      while (hi + 1 < c.size() && c[hi + 1] < c[hi]) ++hi;
      spans.emplace_back(lo, hi);
    }
    i = j + 1;
  }
  std::vector<Scene> scenes;
  for (std::size_t s = 0; s < spans.size(); ++s) {
    std::size_t last = spans[s].second + 1;
    if (s + 1 < spans.size()) last = std::min(last, spans[s + 1].first);
    scenes.push_back(detail::scene_from_bins(bins, spans[s].first, last, {}));
  }
  return scenes;
}

// Mean/standard-deviation spike baseline: threshold = mean + n_sigma * std
// (population std) of per-minute counts; each maximal run of bins strictly
// above the threshold is one scene.
inline std::vector<Scene> baseline_mean_std(const std::vector<MinuteBin> &bins,
                                            double n_sigma) {
  std::vector<Scene> scenes;
  if (bins.empty()) return scenes;
  std::vector<std::size_t> c = bin_counts(bins);
  double n = static_cast<double>(c.size());
  double mean = 0.0;
  for (std::size_t x : c) mean += static_cast<double>(x);
  mean /= n;
  double var = 0.0;
  for (std::size_t x : c) {
    double d = static_cast<double>(x) - mean;
    var += d * d;
  }
  double threshold = mean + n_sigma * std::sqrt(var / n);
  std::size_t i = 0;
  while (i < c.size()) {
    if (static_cast<double>(c[i]) > threshold) {
      std::size_t j = i;
      while (j < c.size() && static_cast<double>(c[j]) > threshold) ++j;
      scenes.push_back(detail::scene_from_bins(bins, i, j, {}));
      i = j;
    } else {
      ++i;
    }
  }
  return scenes;
}

struct GoldScene {
  Timestamp start_t = 0;
  Timestamp end_t = 0;
  std::string description;
};

struct SceneEvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (pred, gold)
};

inline double f1_score(double precision, double recall) {
  return precision + recall > 0.0
             ? 2.0 * precision * recall / (precision + recall)
             : 0.0;
}

// A prediction matches a gold scene when its start lies in
// [gold.start - margin, gold.end + margin]. Predictions are taken in time
// order and each claims the earliest unmatched gold scene it fits.
// Empty predictions against empty gold score 1.0 everywhere.
inline SceneEvalReport evaluate_scenes(const std::vector<Scene> &pred,
                                       const std::vector<GoldScene> &gold,
                                       Timestamp margin_seconds = 0) {
  SceneEvalReport r;
  if (pred.empty() && gold.empty()) {
    r.precision = r.recall = r.f1 = 1.0;
    return r;
  }
  std::vector<std::size_t> order(pred.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return pred[a].start_t < pred[b].start_t;
  });
  std::vector<bool> used(gold.size(), false);
  for (std::size_t p : order) {
    for (std::size_t g = 0; g < gold.size(); ++g) {
      if (used[g]) continue;
      if (pred[p].start_t >= gold[g].start_t - margin_seconds &&
          pred[p].start_t <= gold[g].end_t + margin_seconds) {
        used[g] = true;
        r.matches.emplace_back(p, g);
        break;
      }
    }
  }
  double hits = static_cast<double>(r.matches.size());
  r.precision = pred.empty() ? 0.0 : hits / static_cast<double>(pred.size());
  r.recall = gold.empty() ? 0.0 : hits / static_cast<double>(gold.size());
  r.f1 = f1_score(r.precision, r.recall);
  return r;
}

inline std::vector<GoldScene> parse_gold_scenes(std::string_view source) {
  std::vector<GoldScene> gold;
  std::size_t lineno = 0;
  for (std::string_view raw : text::split_lines(source)) {
    ++lineno;
    std::string_view line = text::trim(raw);
    if (line.empty()) continue;
    nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object() ||
        !rec.contains("start_t") || !rec["start_t"].is_number_integer() ||
        !rec.contains("end_t") || !rec["end_t"].is_number_integer()) {
      throw ParseError("gold scene needs integer 'start_t' and 'end_t'",
                       lineno);
    }
    GoldScene g{rec["start_t"].get<Timestamp>(), rec["end_t"].get<Timestamp>(),
                rec.value("description", std::string())};
    if (g.start_t >= g.end_t) {
      throw ParseError("gold scene start_t must precede end_t", lineno);
    }
    if (!gold.empty() && g.start_t < gold.back().end_t) {
      throw ParseError("gold scenes must be ordered and non-overlapping",
                       lineno);
    }
    gold.push_back(std::move(g));
  }
  return gold;
}

inline nlohmann::json scene_to_json(const Scene &s) {
  return {{"start_t", s.start_t},
          {"end_t", s.end_t},
          {"trigger_characters", s.trigger_characters},
          {"message_ids", s.message_ids}};
}

inline Scene scene_from_json(const nlohmann::json &j) {
  Scene s;
  s.start_t = j.at("start_t").get<Timestamp>();
  s.end_t = j.at("end_t").get<Timestamp>();
  s.trigger_characters = j.at("trigger_characters").get<CharacterSet>();
  s.message_ids = j.at("message_ids").get<std::vector<std::string>>();
  return s;
}

inline std::string serialize_scenes(const std::vector<Scene> &scenes) {
  std::string out;
  for (const Scene &s : scenes) {
    out += scene_to_json(s).dump();
    out += '\n';
  }
  return out;
}

inline std::vector<Scene> parse_scenes(std::string_view source) {
  std::vector<Scene> scenes;
  std::size_t lineno = 0;
  for (std::string_view raw : text::split_lines(source)) {
    ++lineno;
    std::string_view line = text::trim(raw);
    if (line.empty()) continue;
    try {
      scenes.push_back(scene_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(std::string("bad scene record: ") + e.what(), lineno);
    }
  }
  return scenes;
}

}  // namespace tvsum

#endif  // TVSUM_SCENES_HPP_
