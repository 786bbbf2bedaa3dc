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

// Dense vectors for tweets, frames and faces, plus the cosine/centroid
// primitives the selectors share.
//
// Vector file: JSON Lines, {"id", "t", "kind": "tweet"|"frame"|"face",
// "vec": [...]}; face records also carry "frame_id" and optionally "episode".
// The first record fixes the dimension for the whole file.

#ifndef TVSUM_EMBEDDINGS_HPP_
#define TVSUM_EMBEDDINGS_HPP_

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <optional>
#include <ranges>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "tvsum/corpus.hpp"
#include "tvsum/error.hpp"

namespace tvsum {

using Vector = std::vector<double>;

enum class ItemKind { kTweet, kFrame, kFace };

inline std::string_view kind_name(ItemKind k) {
  switch (k) {
    case ItemKind::kTweet: return "tweet";
    case ItemKind::kFrame: return "frame";
    case ItemKind::kFace: return "face";
  }
  return "?";
}

inline std::optional<ItemKind> parse_kind(std::string_view s) {
  if (s == "tweet") return ItemKind::kTweet;
  if (s == "frame") return ItemKind::kFrame;
  if (s == "face") return ItemKind::kFace;
  return std::nullopt;
}

struct EmbeddedItem {
  std::string id;
  Timestamp t = 0;
  ItemKind kind = ItemKind::kTweet;
  Vector vector;
  std::string frame_id;  // faces only
  int episode = 0;       // faces only
};

// Immutable after load. Items keep file order; by_time() gives them sorted by
// (t, id).
class EmbeddingStore {
 public:
  EmbeddingStore() = default;

  // Throws ValidationError on duplicate ids, dimension mismatch, empty or
  // non-finite vectors.
  void add(EmbeddedItem item) {
    if (item.vector.empty()) {
      throw ValidationError("item '" + item.id + "' has an empty vector");
    }
    for (double v : item.vector) {
      if (!std::isfinite(v)) {
        throw ValidationError("item '" + item.id + "' has a non-finite value");
      }
    }
    if (!items_.empty() && item.vector.size() != dim_) {
      throw ValidationError("dimension mismatch: '" + items_.front().id +
                            "' has " + std::to_string(dim_) + ", '" + item.id +
                            "' has " + std::to_string(item.vector.size()));
    }
    if (by_id_.count(item.id)) {
      throw ValidationError("duplicate item id '" + item.id + "'");
    }
    dim_ = item.vector.size();
    by_id_.emplace(item.id, items_.size());
    items_.push_back(std::move(item));
    order_.clear();
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const std::vector<EmbeddedItem> &items() const { return items_; }

  const EmbeddedItem *find(const std::string &id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &items_[it->second];
  }

  // Items with t in [begin, end), ordered by (t, id).
  std::vector<const EmbeddedItem *> in_window(Timestamp begin,
                                              Timestamp end) const {
    const auto &ord = by_time();
    auto lo = std::partition_point(ord.begin(), ord.end(), [&](auto *p) {
      return p->t < begin;
    });
    auto hi = std::partition_point(lo, ord.end(), [&](auto *p) {
      return p->t < end;
    });
    return {lo, hi};
  }

  const std::vector<const EmbeddedItem *> &by_time() const {
    if (order_.size() != items_.size()) {
      order_.clear();
      for (const auto &it : items_) order_.push_back(&it);
      std::stable_sort(order_.begin(), order_.end(), [](auto *a, auto *b) {
        return a->t != b->t ? a->t < b->t : a->id < b->id;
      });
    }
    return order_;
  }

 private:
  std::vector<EmbeddedItem> items_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::size_t dim_ = 0;
  mutable std::vector<const EmbeddedItem *> order_;
};

inline EmbeddingStore load_store(std::string_view source) {
  EmbeddingStore store;
  std::size_t lineno = 0;
  for (std::string_view raw : text::split_lines(source)) {
    ++lineno;
    std::string_view line = text::trim(raw);
    if (line.empty()) continue;
    nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
      throw ParseError("vector record is not a JSON object", lineno);
    }
    EmbeddedItem item;
    try {
      item.id = rec.at("id").get<std::string>();
      item.t = rec.at("t").get<Timestamp>();
      auto kind = parse_kind(rec.at("kind").get<std::string>());
      if (!kind) throw ParseError("unknown kind", lineno);
      item.kind = *kind;
      for (const auto &v : rec.at("vec")) {
        if (!v.is_number()) {
          throw ValidationError("item '" + item.id +
                                "' has a non-finite value");
        }
        item.vector.push_back(v.get<double>());
      }
      if (item.kind == ItemKind::kFace) {
        item.frame_id = rec.value("frame_id", std::string());
        item.episode = rec.value("episode", 0);
      }
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(std::string("bad vector record: ") + e.what(), lineno);
    }
    store.add(std::move(item));
  }
  return store;
}

inline std::string serialize_item(const EmbeddedItem &item) {
  nlohmann::json rec = {{"id", item.id},
                        {"t", item.t},
                        {"kind", kind_name(item.kind)},
                        {"vec", item.vector}};
  if (item.kind == ItemKind::kFace) {
    rec["frame_id"] = item.frame_id;
    rec["episode"] = item.episode;
  }
  return rec.dump();
}

inline double dot(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

inline double norm(std::span<const double> u) { return std::sqrt(dot(u, u)); }

// Cosine similarity, clamped to [-1, 1]. Zero vectors are rejected.
inline double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw ValidationError("cosine: dimension mismatch");
  }
  double nu = norm(u), nv = norm(v);
  if (nu == 0.0 || nv == 0.0) throw ValidationError("cosine: zero-norm vector");
  return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

// Coordinate-wise mean of proj(item) over a non-empty range.
template <std::ranges::input_range R, class Proj = std::identity>
Vector centroid(R &&items, Proj proj = {}) {
  Vector sum;
  std::size_t n = 0;
  for (auto &&item : items) {
    const Vector &v = std::invoke(proj, item);
    if (sum.empty()) {
      sum.assign(v.size(), 0.0);
    } else if (v.size() != sum.size()) {
      throw ValidationError("centroid: dimension mismatch");
    }
    for (std::size_t i = 0; i < v.size(); ++i) sum[i] += v[i];
    ++n;
  }
  if (n == 0) throw ValidationError("centroid of an empty set");
  for (double &x : sum) x /= static_cast<double>(n);
  return sum;
}

inline Vector centroid(std::span<const EmbeddedItem *const> items) {
  return centroid(items, [](const EmbeddedItem *p) -> const Vector & {
    return p->vector;
  });
}

struct Nearest {
  const EmbeddedItem *item = nullptr;
  double similarity = 0.0;
};

// The centroid is taken over all items; the filter only restricts which items
// may be returned. Ties go to the earlier t, then the smaller id. Returns
// nullopt when nothing passes the filter.
template <class Filter>
  requires std::predicate<Filter &, const EmbeddedItem &>
std::optional<Nearest> nearest_to_centroid(
    std::span<const EmbeddedItem *const> items, Filter &&filter) {
  if (items.empty()) return std::nullopt;
  Vector c = centroid(items);
  std::optional<Nearest> best;
  for (const EmbeddedItem *item : items) {
    if (!filter(*item)) continue;
    double sim = cosine(item->vector, c);
    if (!best || sim > best->similarity ||
        (sim == best->similarity &&
         (item->t < best->item->t ||
          (item->t == best->item->t && item->id < best->item->id)))) {
      best = Nearest{item, sim};
    }
  }
  return best;
}

inline std::optional<Nearest> nearest_to_centroid(
    std::span<const EmbeddedItem *const> items) {
  return nearest_to_centroid(items, [](const EmbeddedItem &) { return true; });
}

}  // namespace tvsum

#endif  // TVSUM_EMBEDDINGS_HPP_
