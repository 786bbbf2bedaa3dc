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

// Deterministic synthetic data: planted-spike message streams, a partially
// labeled face benchmark, and a complete event fixture for the pipeline.

#ifndef TVSUM_SYNTHETIC_HPP_
#define TVSUM_SYNTHETIC_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tvsum/corpus.hpp"
#include "tvsum/embeddings.hpp"
#include "tvsum/io.hpp"
#include "tvsum/partial_label.hpp"
#include "tvsum/scenes.hpp"
#include "tvsum/weak_labels.hpp"

namespace tvsum {
namespace synthetic {

struct Character {
  std::string name;
  std::vector<std::string> aliases;
};

inline const std::vector<Character> &default_cast() {
  static const std::vector<Character> cast = {
      {"Jon Snow", {"Jon", "Snow"}},
      {"Cersei Lannister", {"Cersei"}},
      {"Daenerys Targaryen", {"Daenerys", "Targaryen", "Dany"}},
      {"Tyrion Lannister", {"Tyrion", "Imp"}},
      {"Arya Stark", {"Arya"}},
      {"Petyr Baelish", {"Petyr", "Baelish", "Littlefinger"}},
  };
  return cast;
}

inline AliasTable cast_aliases(const std::vector<Character> &cast) {
  AliasTable table;
  for (const Character &c : cast) table.add(c.name, c.aliases);
  return table;
}

// ---------------------------------------------------------------------------
// Planted-spike message streams

struct Spike {
  int minute = 0;
  std::vector<std::string> characters;
};

struct SpikeStreamSpec {
  Timestamp start = 1'500'000'000;
  int minutes = 60;
  int messages_per_minute = 30;
  double spike_fraction = 0.5;    // share mentioning the scene cast at onset
  double sustain_fraction = 0.1;  // share mentioning it later in the scene
  std::vector<Spike> spikes;
  std::map<int, int> volume;  // minute -> message count override
  std::uint64_t seed = 7;
};

struct SpikeStream {
  std::vector<Message> messages;
  AliasTable aliases;
  std::vector<GoldScene> gold;
};

// Builds a stream where only the planted onset minutes carry a character
// share above spike_fraction / |cast|. Non-mentioning messages sometimes
// carry @handles built from character names, and a sparse background
// mention (one message, at most every other minute) of a character outside
// the current scene.
inline SpikeStream make_spike_stream(const SpikeStreamSpec &spec,
                                     const std::vector<Character> &cast =
                                         default_cast()) {
  static const std::array<const char *, 8> kPhrases = {
      "what a moment",        "cannot believe this",  "this scene though",
      "the music is perfect", "everyone is watching", "best episode so far",
      "so much tension",      "I need a minute"};
  SpikeStream out;
  out.aliases = cast_aliases(cast);
  std::mt19937_64 rng(spec.seed);
  auto alias_of = [&](const std::string &name) {
    for (const Character &c : cast) {
      if (c.name == name) {
        std::uniform_int_distribution<std::size_t> pick(0, c.aliases.size() - 1);
        return c.aliases[pick(rng)];
      }
    }
    throw ValidationError("unknown character '" + name + "'");
  };
  auto phrase = [&] {
    std::uniform_int_distribution<std::size_t> pick(0, kPhrases.size() - 1);
    return std::string(kPhrases[pick(rng)]);
  };
  std::size_t next_id = 0;
  std::size_t spike_idx = 0;
  const Spike *current = nullptr;
  for (int minute = 0; minute < spec.minutes; ++minute) {
    bool onset = spike_idx < spec.spikes.size() &&
                 spec.spikes[spike_idx].minute == minute;
    if (onset) current = &spec.spikes[spike_idx++];
    auto vol = spec.volume.find(minute);
    int n = vol != spec.volume.end() ? vol->second : spec.messages_per_minute;
    int mentions = 0;
    if (current) {
      double share = onset ? spec.spike_fraction : spec.sustain_fraction;
      mentions = static_cast<int>(std::lround(share * n));
    }
    // A background character outside the current cast, every other minute.
    std::string background;
    if (minute % 2 == 1) {
      for (const Character &c : cast) {
        bool in_cast = current && std::find(current->characters.begin(),
                                            current->characters.end(),
                                            c.name) != current->characters.end();
        bool upcoming = false;
        for (std::size_t s = spike_idx; s < spec.spikes.size(); ++s) {
          for (const auto &u : spec.spikes[s].characters) upcoming |= u == c.name;
        }
        if (!in_cast && !upcoming) {
          background = c.name;
          break;
        }
      }
    }
    for (int j = 0; j < n; ++j) {
      Message m;
      m.id = "m" + std::to_string(next_id++);
      m.t = spec.start + 60 * minute + (60 * j) / n;
      m.author = "user" + std::to_string(rng() % 1000);
      if (j < mentions) {
        const auto &chars = current->characters;
        if (chars.size() == 1) {
          m.text = alias_of(chars[0]) + " " + phrase();
        } else {
          // Cycle through "all of them", then each one alone.
          std::size_t slot = static_cast<std::size_t>(j) % (chars.size() + 1);
          if (slot == 0) {
            std::vector<std::string> names;
            for (const auto &c : chars) names.push_back(alias_of(c));
            m.text = text::join(names, " and ") + " together, " + phrase();
          } else {
            m.text = alias_of(chars[slot - 1]) + " " + phrase();
          }
        }
      } else if (j == mentions && !background.empty()) {
        m.text = phrase() + ", where is " + alias_of(background);
      } else if (j % 5 == 4) {
        std::string handle = text::to_lower(alias_of(cast[rng() % cast.size()].name));
        m.text = "@" + handle + "_fan " + phrase();
      } else {
        m.text = phrase();
      }
      out.messages.push_back(std::move(m));
    }
  }
  const Timestamp stream_end = spec.start + 60 * spec.minutes;
  for (std::size_t s = 0; s < spec.spikes.size(); ++s) {
    Timestamp begin = spec.start + 60 * spec.spikes[s].minute;
    Timestamp end = s + 1 < spec.spikes.size()
                        ? spec.start + 60 * spec.spikes[s + 1].minute
                        : stream_end;
    out.gold.push_back({begin, end, text::join(spec.spikes[s].characters, ", ")});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Partial-label face benchmark

struct PartialLabelBenchmark {
  LabelSpace labels;
  std::vector<PartialExample> train;
  std::vector<LabeledFace> test;
  std::vector<int> train_truth;  // true label of each training example
};

struct BenchmarkSpec {
  std::size_t dim = 16;
  std::size_t train_size = 800;
  std::size_t test_size = 200;
  int episodes = 4;
  double center_scale = 3.0;  // class means are center_scale * e_i
  double sigma = 1.0;
  // Extra shared variance along a fixed direction orthogonal to every class
  // mean (pose and lighting). It leaves the Bayes accuracy unchanged.
  double nuisance_scale = 2.25;
  std::uint64_t seed = 2024;
};

// Co-occurrence graph: the j-th training face of label y in an episode is
// weak-labeled {y, benchmark_distractor(episode, y, j)}. Label 0 is the lead
// character and co-occurs with half of everyone else's faces; the other half
// co-occur with an episode partner, and the partners rotate:
//   episode 0: (0,1) (2,3)   episode 1: (0,2) (1,3)
//   episode 2: (0,3) (1,2)   episode 3: (0,1) (2,3)
inline int benchmark_distractor(int episode, int label, std::size_t j) {
  static const int kPartner[4][4] = {
      {1, 0, 3, 2},
      {2, 3, 0, 1},
      {3, 2, 1, 0},
      {1, 0, 3, 2},
  };
  constexpr int kLead = 0;
  if (label != kLead && j % 4 < 2) return kLead;
  return kPartner[episode % 4][label];
}

// Four Gaussian classes in `dim` dimensions with means 3 e_i and covariance
// sigma^2 I + nuisance_scale^2 v v^T, where v spreads over the dimensions not
// used by any mean. The Bayes accuracy is near 95%. Training faces come in
// `episodes` equal stages; test faces are clean and balanced.
inline PartialLabelBenchmark make_partial_label_benchmark(
    const BenchmarkSpec &spec = {}) {
  constexpr int kClasses = 4;
  if (spec.dim <= static_cast<std::size_t>(kClasses)) {
    throw ValidationError("benchmark needs more than 4 dimensions");
  }
  PartialLabelBenchmark b;
  b.labels = LabelSpace({"Jon", "Sansa", "Jaime", "Cersei"});
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.sigma);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double v = 1.0 / std::sqrt(static_cast<double>(spec.dim - kClasses));
  auto sample = [&](int y) {
    Vector x(spec.dim);
    for (std::size_t i = 0; i < spec.dim; ++i) {
      x[i] = noise(rng) + (static_cast<int>(i) == y ? spec.center_scale : 0.0);
    }
    double shift = spec.nuisance_scale * unit(rng);
    for (std::size_t i = kClasses; i < spec.dim; ++i) x[i] += shift * v;
    return x;
  };
  const std::size_t per_episode = spec.train_size / spec.episodes;
  for (int e = 0; e < spec.episodes; ++e) {
    for (std::size_t j = 0; j < per_episode; ++j) {
      int y = static_cast<int>(j % kClasses);
      int d = benchmark_distractor(e, y, j / kClasses);
      LabelSet ys = {static_cast<std::size_t>(std::min(y, d)),
                     static_cast<std::size_t>(std::max(y, d))};
      b.train.push_back(make_example(sample(y), std::move(ys), e,
                                     "f" + std::to_string(b.train.size())));
      b.train_truth.push_back(y);
    }
  }
  for (std::size_t j = 0; j < spec.test_size; ++j) {
    int y = static_cast<int>(j % kClasses);
    b.test.push_back({sample(y), static_cast<std::size_t>(y)});
  }
  return b;
}

// ---------------------------------------------------------------------------
// Complete event fixture

struct EpisodeFiles {
  int episode = 0;
  Timestamp video_start_t = 0;
  std::string srt;
  std::string transcript;
};

struct EventFixture {
  std::string messages;
  std::string aliases;
  std::string tweet_vectors;
  std::string frame_vectors;
  std::string face_vectors;
  std::string face_test;
  std::string gold_scenes;
  std::vector<EpisodeFiles> episodes;
  Timestamp event_start = 0;
};

// A 30-minute event with three scenes (Jon Snow at minute 0, Cersei at 10,
// Daenerys with Tyrion at 20) plus three earlier 10-minute episodes used only
// for face training. Frames are sampled every 2 s and carry 1-2 faces from
// the current cast; every 60th frame is a crowd shot with 6 faces.
inline EventFixture make_event_fixture(std::uint64_t seed = 11) {
  const std::vector<Character> &cast = default_cast();
  const std::size_t n_chars = 5;  // Petyr never appears
  constexpr std::size_t kTweetDim = 8, kFrameDim = 8, kFaceDim = 8;
  constexpr Timestamp kEventStart = 1'500'000'000;
  EventFixture fx;
  fx.event_start = kEventStart;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_vec = [&](std::size_t d, double scale) {
    Vector v(d);
    for (double &x : v) x = scale * gauss(rng);
    return v;
  };
  auto jitter = [&](const Vector &mean, double scale) {
    Vector v(mean);
    for (double &x : v) x += scale * gauss(rng);
    return v;
  };

  SpikeStreamSpec stream;
  stream.start = kEventStart;
  stream.minutes = 30;
  stream.messages_per_minute = 20;
  stream.spike_fraction = 0.5;
  stream.sustain_fraction = 0.15;
  stream.spikes = {{0, {"Jon Snow"}},
                   {10, {"Cersei Lannister"}},
                   {20, {"Daenerys Targaryen", "Tyrion Lannister"}}};
  stream.seed = seed;
  SpikeStream s = make_spike_stream(stream, cast);
  fx.messages = serialize_messages(s.messages);
  fx.aliases = serialize_alias_table(s.aliases);
  for (const GoldScene &g : s.gold) {
    fx.gold_scenes += nlohmann::json{{"start_t", g.start_t},
                                     {"end_t", g.end_t},
                                     {"description", g.description}}
                          .dump() +
                      "\n";
  }

  // Tweet vectors: a topic per scene; mentioning tweets sit closer to it.
  std::vector<Vector> topics;
  for (std::size_t i = 0; i < s.gold.size(); ++i) topics.push_back(random_vec(kTweetDim, 2.0));
  for (const Message &m : s.messages) {
    std::size_t scene = 0;
    while (scene + 1 < s.gold.size() && m.t >= s.gold[scene + 1].start_t) ++scene;
    bool mentions = !tag_mentions(m, s.aliases).empty();
    EmbeddedItem item{m.id, m.t, ItemKind::kTweet,
                      jitter(topics[scene], mentions ? 0.4 : 1.0), "", 0};
    fx.tweet_vectors += serialize_item(item) + "\n";
  }

  std::vector<Vector> identity;
  for (std::size_t c = 0; c < n_chars; ++c) {
    Vector v(kFaceDim, 0.0);
    v[c] = 3.0;
    identity.push_back(v);
  }
  std::vector<Vector> looks;  // visual mean per scene/episode

  // Episodes 0-2 precede the event by whole days; episode 3 is the event.
  struct Segment {
    Timestamp begin, end;
    std::vector<std::size_t> cast;
  };
  std::vector<std::vector<Segment>> plans = {
      {{0, 300, {0, 1}}, {300, 600, {2, 3}}},
      {{0, 300, {0, 4}}, {300, 600, {1, 3}}},
      {{0, 300, {0, 2}}, {300, 600, {1, 4}}},
      {{0, 600, {0, 4}}, {600, 1200, {1, 3}}, {1200, 1800, {2, 3}}},
  };
  static const std::array<const char *, 24> kWords = {
      "winter", "coming",  "dragons", "north",  "throne", "gold",
      "debt",   "wall",    "sword",   "fire",   "blood",  "queen",
      "king",   "army",    "ships",   "honor",  "night",  "watch",
      "wolves", "lions",   "ravens",  "castle", "crown",  "oath"};
  std::size_t face_id = 0, frame_id = 0;
  for (int e = 0; e < 4; ++e) {
    EpisodeFiles ep;
    ep.episode = e;
    ep.video_start_t = e == 3 ? kEventStart : kEventStart - (3 - e) * 86400;
    const auto &plan = plans[static_cast<std::size_t>(e)];
    for (std::size_t seg = 0; seg < plan.size(); ++seg) looks.push_back(random_vec(kFrameDim, 2.0));
    const std::size_t look_base = looks.size() - plan.size();
    // Dialogue: 4-second turns by a cast member; some turns are split across
    // two cues.
    int cue_index = 1;
    for (std::size_t seg = 0; seg < plan.size(); ++seg) {
      for (Timestamp at = plan[seg].begin; at + 4 <= plan[seg].end; at += 4) {
        const auto &who = plan[seg].cast;
        std::size_t speaker = who[rng() % who.size()];
        std::vector<std::string> words;
        for (int w = 0; w < 6; ++w) words.push_back(kWords[rng() % kWords.size()]);
        words.push_back("t" + std::to_string(at));
        std::string line = text::join(words, " ");
        ep.transcript += nlohmann::json{{"speaker", cast[speaker].name},
                                        {"text", line}}
                             .dump() +
                         "\n";
        Millis begin_ms = at * 1000, end_ms = (at + 4) * 1000 - 200;
        std::vector<SubtitleCue> cues;
        if (rng() % 4 == 0) {
          std::vector<std::string> a(words.begin(), words.begin() + 4),
              b(words.begin() + 3, words.end());
          cues.push_back({cue_index++, begin_ms, begin_ms + 1800, text::join(a, " ")});
          cues.push_back({cue_index++, begin_ms + 1900, end_ms, text::join(b, " ")});
        } else {
          cues.push_back({cue_index++, begin_ms, end_ms, line});
        }
        ep.srt += write_srt(cues);
      }
    }
    // Frames and faces.
    for (std::size_t seg = 0; seg < plan.size(); ++seg) {
      for (Timestamp at = plan[seg].begin; at < plan[seg].end; at += 2) {
        EmbeddedItem frame{"fr" + std::to_string(frame_id++),
                           ep.video_start_t + at, ItemKind::kFrame,
                           jitter(looks[look_base + seg], 0.5), "", 0};
        fx.frame_vectors += serialize_item(frame) + "\n";
        const auto &who = plan[seg].cast;
        std::size_t n_faces = frame_id % 60 == 0 ? 6 : 1 + rng() % 2;
        for (std::size_t k = 0; k < n_faces; ++k) {
          std::size_t c = k < who.size() ? who[(k + rng()) % who.size()]
                                         : rng() % n_chars;
          EmbeddedItem face{"fa" + std::to_string(face_id++), frame.t,
                            ItemKind::kFace, jitter(identity[c], 0.6),
                            frame.id, e};
          fx.face_vectors += serialize_item(face) + "\n";
        }
      }
    }
    fx.episodes.push_back(std::move(ep));
  }
  // Clean test faces.
  for (std::size_t j = 0; j < 100; ++j) {
    std::size_t c = j % n_chars;
    fx.face_test += nlohmann::json{{"id", "test" + std::to_string(j)},
                                   {"label", cast[c].name},
                                   {"vec", jitter(identity[c], 0.6)}}
                        .dump() +
                    "\n";
  }
  return fx;
}

// Writes the fixture files plus a tvsum.ini that points at them. Returns the
// config path.
inline std::filesystem::path write_event_fixture(const std::filesystem::path &dir,
                                                 std::uint64_t seed = 11) {
  EventFixture fx = make_event_fixture(seed);
  write_file(dir / "messages.jsonl", fx.messages);
  write_file(dir / "aliases.jsonl", fx.aliases);
  write_file(dir / "tweet_vectors.jsonl", fx.tweet_vectors);
  write_file(dir / "frame_vectors.jsonl", fx.frame_vectors);
  write_file(dir / "face_vectors.jsonl", fx.face_vectors);
  write_file(dir / "face_test.jsonl", fx.face_test);
  write_file(dir / "gold_scenes.jsonl", fx.gold_scenes);
  std::string episodes;
  for (const EpisodeFiles &ep : fx.episodes) {
    std::string stem = "episode" + std::to_string(ep.episode);
    write_file(dir / (stem + ".srt"), ep.srt);
    write_file(dir / (stem + ".transcript.jsonl"), ep.transcript);
    episodes += nlohmann::json{{"episode", ep.episode},
                               {"video_start_t", ep.video_start_t},
                               {"subtitles", stem + ".srt"},
                               {"transcript", stem + ".transcript.jsonl"}}
                    .dump() +
                "\n";
  }
  write_file(dir / "episodes.jsonl", episodes);
  std::string ini =
      "messages = messages.jsonl\n"
      "aliases = aliases.jsonl\n"
      "tweet_vectors = tweet_vectors.jsonl\n"
      "frame_vectors = frame_vectors.jsonl\n"
      "face_vectors = face_vectors.jsonl\n"
      "episodes = episodes.jsonl\n"
      "gold_scenes = gold_scenes.jsonl\n"
      "face_test = face_test.jsonl\n"
      "out_dir = out\n"
      "event_start = " + std::to_string(fx.event_start) + "\n"
      "k = 0.2\n"
      "m = 0.05\n"
      "margin_seconds = 60\n";
  std::filesystem::path config = dir / "tvsum.ini";
  write_file(config, ini);
  return config;
}

}  // namespace synthetic
}  // namespace tvsum

#endif  // TVSUM_SYNTHETIC_HPP_
