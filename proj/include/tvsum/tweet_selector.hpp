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

#ifndef TVSUM_TWEET_SELECTOR_HPP_
#define TVSUM_TWEET_SELECTOR_HPP_

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tvsum/corpus.hpp"
#include "tvsum/embeddings.hpp"
#include "tvsum/error.hpp"
#include "tvsum/scenes.hpp"

namespace tvsum {

// Which candidate restriction produced the selected tweet.
enum class TweetTier {
  kAllTriggers,   // mentions every trigger character
  kAnyTrigger,    // mentions at least one trigger character
  kUnrestricted,  // nearest to centroid, no mention constraint
};

inline std::string_view tier_name(TweetTier t) {
  switch (t) {
    case TweetTier::kAllTriggers: return "all_triggers";
    case TweetTier::kAnyTrigger: return "any_trigger";
    case TweetTier::kUnrestricted: return "unrestricted";
  }
  return "?";
}

inline std::optional<TweetTier> parse_tier(std::string_view s) {
  if (s == "all_triggers") return TweetTier::kAllTriggers;
  if (s == "any_trigger") return TweetTier::kAnyTrigger;
  if (s == "unrestricted") return TweetTier::kUnrestricted;
  return std::nullopt;
}

struct TweetSelection {
  std::string tweet_id;
  TweetTier tier = TweetTier::kAllTriggers;
  double similarity = 0.0;
};

// Picks the scene tweet nearest (cosine) to the centroid of all scene tweets,
// preferring tweets that name every trigger character, then any trigger
// character, then any tweet. Throws ValidationError when a scene message has
// no embedding.
inline TweetSelection select_scene_tweet(const Scene &scene,
                                         const Corpus &corpus,
                                         const EmbeddingStore &tweets,
                                         const AliasTable &aliases) {
  if (scene.message_ids.empty()) {
    throw ValidationError("scene has no messages");
  }
  std::vector<const EmbeddedItem *> items;
  std::vector<std::string> missing;
  for (const std::string &id : scene.message_ids) {
    const EmbeddedItem *item = tweets.find(id);
    if (item) {
      items.push_back(item);
    } else {
      missing.push_back(id);
    }
  }
  if (!missing.empty()) {
    throw ValidationError("scene messages without embeddings: " +
                          text::join(missing, ", "));
  }
  auto mentions = [&](const EmbeddedItem &item) {
    const Message *m = corpus.find(item.id);
    return m ? tag_mentions(*m, aliases) : CharacterSet{};
  };
  const CharacterSet &trig = scene.trigger_characters;
  auto all = [&](const EmbeddedItem &item) {
    CharacterSet got = mentions(item);
    return !trig.empty() &&
           std::includes(got.begin(), got.end(), trig.begin(), trig.end());
  };
  auto any = [&](const EmbeddedItem &item) {
    CharacterSet got = mentions(item);
    return std::any_of(trig.begin(), trig.end(),
                       [&](const std::string &c) { return got.count(c) > 0; });
  };
  if (auto hit = nearest_to_centroid(items, all)) {
    return {hit->item->id, TweetTier::kAllTriggers, hit->similarity};
  }
  if (auto hit = nearest_to_centroid(items, any)) {
    return {hit->item->id, TweetTier::kAnyTrigger, hit->similarity};
  }
  auto hit = nearest_to_centroid(items);
  return {hit->item->id, TweetTier::kUnrestricted, hit->similarity};
}

}  // namespace tvsum

#endif  // TVSUM_TWEET_SELECTOR_HPP_
