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

#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "tvsum/embeddings.hpp"
#include "tvsum/tweet_selector.hpp"

namespace tvsum {
namespace {

EmbeddedItem tweet(std::string id, Timestamp t, Vector v) {
  return {std::move(id), t, ItemKind::kTweet, std::move(v), "", 0};
}

TEST(VectorFile, LoadsAllKinds) {
  EmbeddingStore s = load_store(
      R"({"id":"t1","t":5,"kind":"tweet","vec":[1,0,0,0]})"
      "\n\n"
      R"({"id":"f1","t":6,"kind":"frame","vec":[0,1,0,0]})"
      "\n"
      R"({"id":"x1","t":6,"kind":"face","vec":[0,0,1,0],"frame_id":"f1","episode":2})"
      "\n");
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(s.dim(), 4u);
  ASSERT_NE(s.find("x1"), nullptr);
  EXPECT_EQ(s.find("x1")->frame_id, "f1");
  EXPECT_EQ(s.find("x1")->episode, 2);
  EXPECT_EQ(s.find("f1")->kind, ItemKind::kFrame);
}

TEST(VectorFile, EmptyFileGivesEmptyStore) {
  EXPECT_TRUE(load_store("").empty());
  EXPECT_EQ(load_store("").dim(), 0u);
}

TEST(VectorFile, DimensionMismatchNamesBothIds) {
  try {
    load_store(R"({"id":"a","t":0,"kind":"tweet","vec":[1,2,3,4]})"
               "\n"
               R"({"id":"b","t":0,"kind":"tweet","vec":[1,2,3,4,5]})");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError &e) {
    std::string what = e.what();
    EXPECT_NE(what.find("'a'"), std::string::npos);
    EXPECT_NE(what.find("'b'"), std::string::npos);
  }
}

TEST(VectorFile, RejectsBadRecords) {
  EXPECT_THROW(load_store(R"({"id":"a","t":0,"kind":"tweet","vec":[1,null]})"),
               ValidationError);
  EXPECT_THROW(load_store(R"({"id":"a","t":0,"kind":"song","vec":[1]})"), ParseError);
  EXPECT_THROW(load_store(R"({"id":"a","kind":"tweet","vec":[1]})"), ParseError);
  EXPECT_THROW(load_store("[1,2]"), ParseError);
  EXPECT_THROW(load_store(R"({"id":"a","t":0,"kind":"tweet","vec":[]})"),
               ValidationError);
  EXPECT_THROW(load_store(R"({"id":"a","t":0,"kind":"tweet","vec":[1]})"
                          "\n"
                          R"({"id":"a","t":1,"kind":"tweet","vec":[2]})"),
               ValidationError);
}

TEST(VectorFile, NonFiniteValueIsRejectedById) {
  EmbeddingStore s;
  try {
    s.add(tweet("nan-item", 0, {1.0, std::nan("")}));
    FAIL();
  } catch (const ValidationError &e) {
    EXPECT_NE(std::string(e.what()).find("nan-item"), std::string::npos);
  }
}

TEST(VectorFile, SerializeRoundTripIsExact) {
  std::mt19937_64 rng(1);
  EmbeddingStore s;
  std::string file;
  for (int i = 0; i < 50; ++i) {
    EmbeddedItem it{"i" + std::to_string(i), i * 3,
                    i % 3 == 0 ? ItemKind::kTweet : i % 3 == 1 ? ItemKind::kFrame : ItemKind::kFace,
                    oracle::random_vec(rng, 7, 1e3), i % 3 == 2 ? "fr" : "", i % 3 == 2 ? 1 : 0};
    file += serialize_item(it) + "\n";
    s.add(it);
  }
  EmbeddingStore back = load_store(file);
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(back.items()[i].vector, s.items()[i].vector);
    EXPECT_EQ(back.items()[i].kind, s.items()[i].kind);
    EXPECT_EQ(back.items()[i].frame_id, s.items()[i].frame_id);
  }
}

TEST(EmbeddingStore, WindowIsHalfOpenAndTimeOrdered) {
  EmbeddingStore s;
  s.add(tweet("c", 20, {1}));
  s.add(tweet("a", 10, {1}));
  s.add(tweet("b", 10, {1}));
  s.add(tweet("d", 30, {1}));
  auto w = s.in_window(10, 30);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w[0]->id, "a");
  EXPECT_EQ(w[1]->id, "b");
  EXPECT_EQ(w[2]->id, "c");
  EXPECT_TRUE(s.in_window(31, 100).empty());
}

TEST(Cosine, HandValues) {
  EXPECT_DOUBLE_EQ(cosine(Vector{1, 0}, Vector{0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(cosine(Vector{1, 1}, Vector{1, 1}), 1.0);
  // 32 / sqrt(14 * 77)
  EXPECT_NEAR(cosine(Vector{1, 2, 3}, Vector{4, 5, 6}), 0.9746318461970762, 1e-15);
  EXPECT_THROW(cosine(Vector{0, 0}, Vector{1, 1}), ValidationError);
  EXPECT_THROW(cosine(Vector{1}, Vector{1, 1}), ValidationError);
}

TEST(CosineProperty, BoundedAndSymmetric) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 1000; ++i) {
    auto a = oracle::random_vec(rng, 5), b = oracle::random_vec(rng, 5);
    double c = cosine(a, b);
    EXPECT_LE(std::abs(c), 1.0);
    EXPECT_EQ(c, cosine(b, a));
    EXPECT_NEAR(c, oracle::cos_sim(a, b), 1e-12);
  }
}

TEST(Centroid, HandValues) {
  std::vector<Vector> one = {{3, 4}};
  EXPECT_EQ(centroid(one), (Vector{3, 4}));
  std::vector<Vector> two = {{0, 0}, {2, 2}};
  EXPECT_EQ(centroid(two), (Vector{1, 1}));
  EXPECT_THROW(centroid(std::vector<Vector>{}), ValidationError);
  EXPECT_THROW(centroid(std::vector<Vector>{{1}, {1, 2}}), ValidationError);
}

TEST(Centroid, MatchesIndependentSum) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Vector> xs;
    for (int i = 0; i < 5; ++i) xs.push_back(oracle::random_vec(rng, 6));
    Vector c = centroid(xs);
    Vector o = oracle::mean_of(xs);
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(c[i], o[i], 1e-12);
  }
}

TEST(NearestToCentroid, SingletonAndNoCandidate) {
  EmbeddedItem a = tweet("a", 0, {1, 2});
  std::vector<const EmbeddedItem *> items = {&a};
  auto hit = nearest_to_centroid(items);
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->item->id, "a");
  EXPECT_NEAR(hit->similarity, 1.0, 1e-15);
  EXPECT_FALSE(nearest_to_centroid(items, [](const EmbeddedItem &) { return false; }));
  EXPECT_FALSE(nearest_to_centroid(std::vector<const EmbeddedItem *>{}));
}

TEST(NearestToCentroid, TiesGoToEarlierThenSmallerId) {
  EmbeddedItem a = tweet("b", 5, {1, 0}), b = tweet("a", 5, {1, 0}),
               c = tweet("c", 1, {0, 1});
  std::vector<const EmbeddedItem *> items = {&a, &b, &c};
  auto hit = nearest_to_centroid(items, [](const EmbeddedItem &x) { return x.id != "c"; });
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->item->id, "a");
}

TEST(NearestToCentroid, MatchesExhaustiveScan) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<EmbeddedItem> store;
    std::vector<oracle::Item> ref;
    std::size_t n = 1 + rng() % 10;
    for (std::size_t i = 0; i < n; ++i) {
      EmbeddedItem it = tweet("t" + std::to_string(rng() % 1000) + "_" + std::to_string(i),
                              static_cast<Timestamp>(rng() % 5),
                              oracle::random_vec(rng, 4));
      bool ok = rng() % 3 != 0;
      ref.push_back({it.id, it.t, it.vector, ok});
      store.push_back(std::move(it));
    }
    std::vector<const EmbeddedItem *> ptrs;
    for (const auto &it : store) ptrs.push_back(&it);
    auto filter = [&](const EmbeddedItem &x) {
      for (const auto &r : ref) {
        if (r.id == x.id) return r.eligible;
      }
      return false;
    };
    auto got = nearest_to_centroid(ptrs, filter);
    auto want = oracle::nearest(ref);
    ASSERT_EQ(got.has_value(), want.has_value());
    if (want) {
      EXPECT_EQ(got->item->id, ref[*want].id);
    }
  }
}

class TweetSelectorTest : public ::testing::Test {
 protected:
  AliasTable aliases_ = parse_alias_table("Jon Snow: Jon, Snow\nArya Stark: Arya\n");

  void add(std::string id, Timestamp t, std::string text, Vector v) {
    msgs_.push_back({id, t, "", std::move(text)});
    store_.add(tweet(id, t, std::move(v)));
    scene_.message_ids.push_back(std::move(id));
  }
  TweetSelection select() {
    Corpus corpus(msgs_);
    return select_scene_tweet(scene_, corpus, store_, aliases_);
  }

  std::vector<Message> msgs_;
  EmbeddingStore store_;
  Scene scene_{0, 600, {"Jon Snow"}, {}};
};

TEST_F(TweetSelectorTest, OnlyMentioningTweetWins) {
  add("a", 1, "great scene", {1, 0});
  add("b", 2, "Jon is here", {0, 1});
  add("c", 3, "wow", {1, 0.1});
  auto sel = select();
  EXPECT_EQ(sel.tweet_id, "b");
  EXPECT_EQ(sel.tier, TweetTier::kAllTriggers);
}

TEST_F(TweetSelectorTest, PlantedNearCentroidTweet) {
  std::mt19937_64 rng(8);
  Vector topic = oracle::random_vec(rng, 6, 3.0);
  for (int i = 0; i < 19; ++i) {
    Vector v = topic;
    for (double &x : v) x += 1.5 * std::normal_distribution<double>()(rng);
    add("n" + std::to_string(i), i, i % 2 ? "Jon again" : "so good", v);
  }
  add("planted", 30, "Jon Snow returns", topic);
  std::vector<oracle::Item> ref;
  for (const auto &it : store_.items()) {
    bool jon = Corpus(msgs_).find(it.id)->text.find("Jon") != std::string::npos;
    ref.push_back({it.id, it.t, it.vector, jon});
  }
  auto sel = select();
  EXPECT_EQ(sel.tweet_id, "planted");
  EXPECT_EQ(sel.tweet_id, ref[*oracle::nearest(ref)].id);
}

TEST_F(TweetSelectorTest, FallsBackToUnrestricted) {
  add("a", 1, "great scene", {1, 0});
  add("b", 2, "wow", {0.9, 0.1});
  add("c", 3, "Arya!", {0, 1});
  scene_.trigger_characters = {"Jon Snow"};
  auto sel = select();
  EXPECT_EQ(sel.tier, TweetTier::kUnrestricted);
  EXPECT_EQ(sel.tweet_id, "b");
}

TEST_F(TweetSelectorTest, AnyTriggerTier) {
  scene_.trigger_characters = {"Jon Snow", "Arya Stark"};
  add("a", 1, "Jon", {1, 0});
  add("b", 2, "Arya", {0, 1});
  add("c", 3, "nobody", {1, 1});
  auto sel = select();
  EXPECT_EQ(sel.tier, TweetTier::kAnyTrigger);
  add("d", 4, "Jon and Arya", {-1, 0});
  EXPECT_EQ(select().tweet_id, "d");
  EXPECT_EQ(select().tier, TweetTier::kAllTriggers);
}

TEST_F(TweetSelectorTest, MissingEmbeddingsAreListed) {
  add("a", 1, "Jon", {1, 0});
  scene_.message_ids.push_back("ghost1");
  scene_.message_ids.push_back("ghost2");
  try {
    select();
    FAIL();
  } catch (const ValidationError &e) {
    std::string what = e.what();
    EXPECT_NE(what.find("ghost1"), std::string::npos);
    EXPECT_NE(what.find("ghost2"), std::string::npos);
  }
}

TEST_F(TweetSelectorTest, TierOneAlwaysMentionsAllTriggers) {
  std::mt19937_64 rng(12);
  const char *texts[] = {"Jon", "Arya", "Jon and Arya", "nothing"};
  for (int trial = 0; trial < 100; ++trial) {
    msgs_.clear();
    store_ = EmbeddingStore();
    scene_.message_ids.clear();
    scene_.trigger_characters = rng() % 2 ? CharacterSet{"Jon Snow"}
                                          : CharacterSet{"Jon Snow", "Arya Stark"};
    for (int i = 0; i < 8; ++i) {
      add("m" + std::to_string(i), i, texts[rng() % 4], oracle::random_vec(rng, 3));
    }
    auto sel = select();
    EXPECT_EQ(select().tweet_id, sel.tweet_id);
    if (sel.tier == TweetTier::kAllTriggers) {
      Corpus corpus(msgs_);
      CharacterSet got = tag_mentions(*corpus.find(sel.tweet_id), aliases_);
      EXPECT_TRUE(std::includes(got.begin(), got.end(),
                                scene_.trigger_characters.begin(),
                                scene_.trigger_characters.end()));
    }
  }
}

}  // namespace
}  // namespace tvsum
