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

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "tvsum/weak_labels.hpp"

namespace tvsum {
namespace {

TEST(Srt, SingleCueArithmetic) {
  auto r = parse_srt("1\n00:00:01,000 --> 00:00:02,500\nHello there\n");
  ASSERT_EQ(r.cues.size(), 1u);
  EXPECT_EQ(r.cues[0].start_ms, 1000);
  EXPECT_EQ(r.cues[0].end_ms, 2500);
  EXPECT_EQ(r.cues[0].text, "Hello there");
}

TEST(Srt, EmptyFile) {
  EXPECT_TRUE(parse_srt("").cues.empty());
  EXPECT_TRUE(parse_srt("\n\n").cues.empty());
}

TEST(Srt, ThreeCueRoundTrip) {
  std::vector<SubtitleCue> cues = {{1, 0, 1500, "First"},
                                   {2, 2000, 4000, "Second\nline two"},
                                   {3, 3'600'000, 3'601'001, "Late"}};
  std::string text = write_srt(cues);
  EXPECT_EQ(parse_srt(text).cues, cues);
  EXPECT_EQ(write_srt(parse_srt(text).cues), text);
}

TEST(Srt, TagsBomAndCrLf) {
  auto r = parse_srt(
      "\xEF\xBB\xBF"
      "1\r\n00:00:01,000 --> 00:00:02,000\r\n<i>Winter</i> {\\an8}is coming\r\n\r\n");
  ASSERT_EQ(r.cues.size(), 1u);
  EXPECT_EQ(r.cues[0].text, "Winter is coming");
}

TEST(Srt, MalformedTimecodeNamesCue) {
  try {
    parse_srt("1\n00:00:01,000 --> 00:00:02,000\nA\n\n7\n00:00:03.000 --> 00:00:04,000\nB\n");
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_NE(std::string(e.what()).find("cue 7"), std::string::npos);
    EXPECT_EQ(e.line(), 6u);
  }
  EXPECT_THROW(parse_srt("1\n00:00:02,000 --> 00:00:01,000\nA\n"), ParseError);
  EXPECT_THROW(parse_srt("x\n00:00:01,000 --> 00:00:02,000\nA\n"), ParseError);
  EXPECT_THROW(parse_srt("1\n"), ParseError);
  EXPECT_THROW(parse_srt("1\n00:61:01,000 --> 00:62:02,000\nA\n"), ParseError);
}

TEST(Srt, OverlapsAreMergedAndCounted) {
  auto r = parse_srt(
      "2\n00:00:02,000 --> 00:00:05,000\nB\n\n"
      "1\n00:00:01,000 --> 00:00:03,000\nA\n\n"
      "3\n00:00:06,000 --> 00:00:07,000\nC\n");
  ASSERT_EQ(r.cues.size(), 2u);
  EXPECT_EQ(r.merged_overlaps, 1u);
  EXPECT_EQ(r.cues[0].start_ms, 1000);
  EXPECT_EQ(r.cues[0].end_ms, 5000);
  EXPECT_EQ(r.cues[0].text, "A\nB");
  for (std::size_t i = 1; i < r.cues.size(); ++i) {
    EXPECT_LE(r.cues[i - 1].end_ms, r.cues[i].start_ms);
  }
}

TEST(Timecode, Formatting) {
  EXPECT_EQ(format_timecode(0), "00:00:00,000");
  EXPECT_EQ(format_timecode(3'723'004), "01:02:03,004");
}

TEST(TokenF1, HandValues) {
  using V = std::vector<std::string>;
  EXPECT_DOUBLE_EQ(token_f1(V{"a", "b"}, V{"a", "b"}), 1.0);
  EXPECT_DOUBLE_EQ(token_f1(V{"a"}, V{"b"}), 0.0);
  EXPECT_DOUBLE_EQ(token_f1(V{}, V{"b"}), 0.0);
  // overlap 1: p = 1/2, r = 1/3
  EXPECT_DOUBLE_EQ(token_f1(V{"a", "x"}, V{"a", "y", "z"}), 0.4);
  // multiset: one shared "a"
  EXPECT_DOUBLE_EQ(token_f1(V{"a", "a"}, V{"a"}), 2.0 / 3.0);
}

const AliasTable &got() {
  static const AliasTable t = parse_alias_table(
      "Jon Snow: Jon\nSansa Stark: Sansa\nArya Stark: Arya\nA: alpha\nB: bravo\n");
  return t;
}

TEST(Transcript, ResolvesAliasesAndRejectsUnknown) {
  auto lines = parse_transcript(
      R"({"speaker":"Jon","text":"winter is coming"})"
      "\n"
      R"({"speaker":"Sansa Stark","text":"yes"})",
      got());
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0].speaker, "Jon Snow");
  EXPECT_THROW(parse_transcript(R"({"speaker":"Hodor","text":"hodor"})", got()),
               ParseError);
  EXPECT_THROW(parse_transcript(R"({"speaker":"Jon","text":"  "})", got()), ParseError);
  EXPECT_THROW(parse_transcript(R"({"text":"x"})", got()), ParseError);
}

TEST(Align, IdenticalTextsGiveDiagonal) {
  std::vector<SubtitleCue> cues;
  std::vector<TranscriptLine> lines;
  const char *speakers[] = {"Jon Snow", "Sansa Stark", "Arya Stark"};
  for (int i = 0; i < 6; ++i) {
    std::string t = "line number " + std::to_string(i) + " words";
    cues.push_back({i + 1, i * 1000, i * 1000 + 900, t});
    lines.push_back({speakers[i % 3], t});
  }
  auto iv = align(cues, lines);
  ASSERT_EQ(iv.size(), 6u);
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(iv[i].speaker, speakers[i % 3]);
    EXPECT_EQ(iv[i].start_ms, i * 1000);
  }
}

TEST(Align, BestMatchingLineWins) {
  std::vector<SubtitleCue> cues = {{1, 0, 1000, "winter is coming"}};
  std::vector<TranscriptLine> lines = {{"A", "hello there"}, {"B", "winter is coming"}};
  auto iv = align(cues, lines);
  ASSERT_EQ(iv.size(), 1u);
  EXPECT_EQ(iv[0].speaker, "B");
}

TEST(Align, DisjointVocabulariesGiveNothing) {
  std::vector<SubtitleCue> cues = {{1, 0, 1000, "dragons fly"}, {2, 2000, 3000, "north"}};
  std::vector<TranscriptLine> lines = {{"A", "hello there"}, {"B", "good night"}};
  EXPECT_TRUE(align(cues, lines).empty());
}

TEST(Align, SplitCuesShareOneLine) {
  std::vector<SubtitleCue> cues = {{1, 0, 1000, "the night is dark"},
                                   {2, 1100, 2000, "and full of terrors"},
                                   {3, 3000, 4000, "you know nothing"}};
  std::vector<TranscriptLine> lines = {
      {"A", "the night is dark and full of terrors"},
      {"B", "you know nothing"}};
  auto pairs = align_cues(cues, lines);
  ASSERT_EQ(pairs.size(), 3u);
  EXPECT_EQ(pairs[0].second, 0u);
  EXPECT_EQ(pairs[1].second, 0u);
  EXPECT_EQ(pairs[2].second, 1u);
}

TEST(AlignProperty, MonotoneAndAboveThreshold) {
  static const char *kWords[] = {"a", "b", "c", "d", "e", "f", "g", "h"};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(seed);
    auto words = [&] {
      std::string s;
      for (int i = 0, n = 1 + static_cast<int>(rng() % 5); i < n; ++i) {
        s += std::string(kWords[rng() % 8]) + " ";
      }
      return s;
    };
    std::vector<SubtitleCue> cues;
    std::vector<TranscriptLine> lines;
    for (int i = 0, n = static_cast<int>(rng() % 10); i < n; ++i) {
      cues.push_back({i + 1, i * 1000, i * 1000 + 500, words()});
    }
    for (int i = 0, n = static_cast<int>(rng() % 10); i < n; ++i) {
      lines.push_back({"A", words()});
    }
    auto pairs = align_cues(cues, lines);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      EXPECT_GE(token_f1(text::tokenize(cues[pairs[i].first].text, false),
                         text::tokenize(lines[pairs[i].second].text, false)),
                0.5);
      if (i) {
        EXPECT_LT(pairs[i - 1].first, pairs[i].first);
        EXPECT_LE(pairs[i - 1].second, pairs[i].second);
      }
    }
  }
}

TEST(SpeakingIntervals, RoundTripAndErrors) {
  std::vector<SpeakingInterval> iv = {{"A", 0, 10}, {"B", 5, 20}};
  EXPECT_EQ(parse_speaking_intervals(serialize_speaking_intervals(iv)), iv);
  EXPECT_THROW(parse_speaking_intervals(R"({"speaker":"A","start_ms":5,"end_ms":5})"),
               ParseError);
  EXPECT_THROW(parse_speaking_intervals(R"({"speaker":"A"})"), ParseError);
}

FaceRecord face(std::string id, Timestamp t, std::string frame = "") {
  EmbeddedItem it{std::move(id), t, ItemKind::kFace, {1.0}, std::move(frame), 0};
  return {it, {}};
}

TEST(WeakLabels, SingleSpeaker) {
  auto r = assign_weak_labels({face("f", 12)}, {{"S", 10'000, 20'000}});
  ASSERT_EQ(r.faces.size(), 1u);
  EXPECT_EQ(r.faces[0].weak_labels, CharacterSet{"S"});
}

TEST(WeakLabels, BothSpeakersWithinWindow) {
  auto r = assign_weak_labels({face("f", 15)},
                              {{"A", 0, 10'000}, {"B", 20'000, 30'000}},
                              {.window_seconds = 15});
  ASSERT_EQ(r.faces.size(), 1u);
  EXPECT_EQ(r.faces[0].weak_labels, (CharacterSet{"A", "B"}));
}

TEST(WeakLabels, WindowIsClosed) {
  std::vector<SpeakingInterval> iv = {{"A", 0, 1000}, {"B", 7000, 8000}};
  auto r = assign_weak_labels({face("f", 4)}, iv, {.window_seconds = 3});
  ASSERT_EQ(r.faces.size(), 1u);
  EXPECT_EQ(r.faces[0].weak_labels, (CharacterSet{"A", "B"}));
  auto narrow = assign_weak_labels({face("f", 4)}, iv, {.window_seconds = 2.999});
  EXPECT_TRUE(narrow.faces.empty());
  EXPECT_EQ(narrow.dropped_unlabeled, 1u);
}

TEST(WeakLabels, VideoOriginShiftsFaceClock) {
  auto r = assign_weak_labels({face("f", 1'000'012)}, {{"S", 10'000, 20'000}},
                              {.window_seconds = 0, .video_origin_t = 1'000'000});
  ASSERT_EQ(r.faces.size(), 1u);
}

TEST(WeakLabels, CrowdedFramesAreDropped) {
  std::vector<FaceRecord> faces;
  for (int i = 0; i < 6; ++i) faces.push_back(face("crowd" + std::to_string(i), 5, "big"));
  for (int i = 0; i < 5; ++i) faces.push_back(face("ok" + std::to_string(i), 5, "small"));
  faces.push_back(face("loner1", 5));
  faces.push_back(face("loner2", 5));
  auto r = assign_weak_labels(faces, {{"S", 0, 10'000}});
  EXPECT_EQ(r.dropped_crowded, 6u);
  EXPECT_EQ(r.faces.size(), 7u);
  for (const auto &f : r.faces) EXPECT_NE(f.frame_id(), "big");
}

// Two speakers alternating every 10 s for 10 minutes, one face per second.
struct Alternating {
  std::vector<FaceRecord> faces;
  std::vector<SpeakingInterval> intervals;
};

Alternating alternating() {
  Alternating a;
  for (int s = 0; s < 60; ++s) {
    a.intervals.push_back({s % 2 ? "B" : "A", s * 10'000, (s + 1) * 10'000});
  }
  for (int t = 0; t < 600; ++t) {
    a.faces.push_back(face("f" + std::to_string(t), t, "fr" + std::to_string(t)));
  }
  return a;
}

TEST(WeakLabels, AlternatingSpeakersAreMostlyMultiLabeled) {
  Alternating a = alternating();
  auto r = assign_weak_labels(a.faces, a.intervals);
  ASSERT_EQ(r.faces.size(), 600u);
  std::size_t multi = std::count_if(r.faces.begin(), r.faces.end(),
                                    [](const FaceRecord &f) { return f.weak_labels.size() > 1; });
  EXPECT_GE(multi, 420u);
}

TEST(WeakLabelsProperty, WiderWindowsOnlyAddLabels) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    std::vector<SpeakingInterval> iv;
    const char *who[] = {"A", "B", "C", "D"};
    Millis at = 0;
    for (int i = 0; i < 30; ++i) {
      at += static_cast<Millis>(rng() % 20'000);
      Millis len = 500 + static_cast<Millis>(rng() % 5000);
      iv.push_back({who[rng() % 4], at, at + len});
      at += len;
    }
    std::vector<FaceRecord> faces;
    for (int i = 0; i < 100; ++i) {
      faces.push_back(face("f" + std::to_string(i), static_cast<Timestamp>(rng() % (at / 1000 + 1)),
                           "fr" + std::to_string(rng() % 80)));
    }
    std::map<std::string, CharacterSet> prev;
    for (double w : {5.0, 10.0, 15.0, 30.0}) {
      auto r = assign_weak_labels(faces, iv, {.window_seconds = w});
      std::map<std::string, CharacterSet> now;
      for (const auto &f : r.faces) now[f.face.id] = f.weak_labels;
      for (const auto &[id, labels] : prev) {
        ASSERT_TRUE(now.count(id)) << id;
        EXPECT_TRUE(std::includes(now[id].begin(), now[id].end(), labels.begin(), labels.end()));
      }
      prev = std::move(now);
    }
  }
}

}  // namespace
}  // namespace tvsum
