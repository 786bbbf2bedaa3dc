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

// Frame selection for a scene and the assembled multimedia summary.

#ifndef TVSUM_FRAME_SELECTOR_HPP_
#define TVSUM_FRAME_SELECTOR_HPP_

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "tvsum/corpus.hpp"
#include "tvsum/embeddings.hpp"
#include "tvsum/partial_label.hpp"
#include "tvsum/scenes.hpp"
#include "tvsum/tweet_selector.hpp"

namespace tvsum {

inline constexpr std::string_view kAllCharacters = "ALL";

// Faces grouped by the frame they were cropped from.
class FaceIndex {
 public:
  FaceIndex() = default;
  explicit FaceIndex(const EmbeddingStore &faces) {
    for (const EmbeddedItem &f : faces.items()) by_frame_[f.frame_id].push_back(&f);
  }
  explicit FaceIndex(const std::vector<const EmbeddedItem *> &faces) {
    for (const EmbeddedItem *f : faces) by_frame_[f->frame_id].push_back(f);
  }
  const std::vector<const EmbeddedItem *> &faces_in(const std::string &frame) const {
    static const std::vector<const EmbeddedItem *> kNone;
    auto it = by_frame_.find(frame);
    return it == by_frame_.end() ? kNone : it->second;
  }

 private:
  std::unordered_map<std::string, std::vector<const EmbeddedItem *>> by_frame_;
};

struct FrameSelectorOptions {
  double confidence_threshold = 0.5;
  std::size_t frames_per_character = 1;
};

struct SelectedFrame {
  std::string frame_id;
  Timestamp t = 0;
  std::string who;  // character name, or "ALL"
  double confidence = 0.0;
  double similarity = 0.0;

  friend bool operator==(const SelectedFrame &, const SelectedFrame &) = default;
};

struct OmittedCharacter {
  std::string who;
  std::string reason;
};

struct FrameSelection {
  std::vector<SelectedFrame> frames;  // ascending t
  std::vector<OmittedCharacter> omitted;
  bool no_frames_in_window = false;
};

namespace detail {

// Ranks candidates by cosine to their centroid, then confidence, then earlier
// t, then id, and keeps the first `keep`.
inline std::vector<SelectedFrame> rank_candidates(
    const std::vector<const EmbeddedItem *> &frames,
    const std::vector<double> &confidence, std::string_view who,
    std::size_t keep) {
  Vector c = centroid(frames, [](const EmbeddedItem *p) -> const Vector & {
    return p->vector;
  });
  std::vector<SelectedFrame> ranked;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    ranked.push_back({frames[i]->id, frames[i]->t, std::string(who),
                      confidence[i], cosine(frames[i]->vector, c)});
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto &a, const auto &b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.t != b.t) return a.t < b.t;
    return a.frame_id < b.frame_id;
  });
  if (ranked.size() > keep) ranked.resize(keep);
  return ranked;
}

}  // namespace detail

// For each character, candidate frames are the scene-window frames holding a
// face whose probability for that character exceeds the threshold (a frame's
// confidence is its best such face). Among candidates the frame closest to
// the candidates' centroid wins. With two or more characters an "ALL" frame is
// chosen the same way among frames where every character qualifies, with
// confidence equal to the weakest character's.
inline FrameSelection select_frames(const Scene &scene,
                                    const CharacterSet &tweet_characters,
                                    const EmbeddingStore &frames,
                                    const FaceIndex &faces,
                                    const SoftmaxModel &model,
                                    const FrameSelectorOptions &opts = {}) {
  FrameSelection out;
  std::vector<const EmbeddedItem *> window =
      frames.in_window(scene.start_t, scene.end_t);
  if (window.empty()) {
    out.no_frames_in_window = true;
    return out;
  }
  std::vector<std::string> chars;
  std::vector<std::size_t> label_idx;
  for (const std::string &c : tweet_characters) {
    auto idx = model.label_space().index(c);
    if (!idx) {
      out.omitted.push_back({c, "not in the face model's label space"});
      continue;
    }
    chars.push_back(c);
    label_idx.push_back(*idx);
  }
  // conf[f][j]: best probability of character j over faces in frame f.
  std::vector<std::vector<double>> conf(window.size(),
                                        std::vector<double>(chars.size(), 0.0));
  for (std::size_t f = 0; f < window.size(); ++f) {
    for (const EmbeddedItem *face : faces.faces_in(window[f]->id)) {
      Vector p = model.predict(face->vector);
      for (std::size_t j = 0; j < chars.size(); ++j) {
        conf[f][j] = std::max(conf[f][j], p[label_idx[j]]);
      }
    }
  }
  for (std::size_t j = 0; j < chars.size(); ++j) {
    std::vector<const EmbeddedItem *> cand;
    std::vector<double> cand_conf;
    for (std::size_t f = 0; f < window.size(); ++f) {
      if (conf[f][j] > opts.confidence_threshold) {
        cand.push_back(window[f]);
        cand_conf.push_back(conf[f][j]);
      }
    }
    if (cand.empty()) {
      out.omitted.push_back({chars[j], "no frame above the confidence threshold"});
      continue;
    }
    auto top = detail::rank_candidates(cand, cand_conf, chars[j],
                                       opts.frames_per_character);
    out.frames.insert(out.frames.end(), top.begin(), top.end());
  }
  if (tweet_characters.size() >= 2 && chars.size() == tweet_characters.size()) {
    std::vector<const EmbeddedItem *> cand;
    std::vector<double> cand_conf;
    for (std::size_t f = 0; f < window.size(); ++f) {
      double weakest = *std::min_element(conf[f].begin(), conf[f].end());
      if (weakest > opts.confidence_threshold) {
        cand.push_back(window[f]);
        cand_conf.push_back(weakest);
      }
    }
    if (cand.empty()) {
      out.omitted.push_back({std::string(kAllCharacters),
                             "no frame shows every character"});
    } else {
      auto top = detail::rank_candidates(cand, cand_conf, kAllCharacters, 1);
      out.frames.insert(out.frames.end(), top.begin(), top.end());
    }
  }
  std::stable_sort(out.frames.begin(), out.frames.end(),
                   [](const auto &a, const auto &b) { return a.t < b.t; });
  return out;
}

struct SummaryEntry {
  Scene scene;
  std::string tweet_id;
  std::string tweet_text;
  TweetTier tier = TweetTier::kAllTriggers;
  FrameSelection frames;
};

// One entry per scene, in chronological order. Inputs are index-aligned.
inline std::vector<SummaryEntry> assemble_summary(
    const std::vector<Scene> &scenes,
    const std::vector<TweetSelection> &tweets,
    const std::vector<FrameSelection> &frames, const Corpus &corpus) {
  if (tweets.size() != scenes.size() || frames.size() != scenes.size()) {
    throw ValidationError("summary inputs are not aligned by scene");
  }
  std::vector<SummaryEntry> entries;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const Message *m = corpus.find(tweets[i].tweet_id);
    entries.push_back({scenes[i], tweets[i].tweet_id, m ? m->text : "",
                       tweets[i].tier, frames[i]});
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto &a, const auto &b) {
                     return a.scene.start_t < b.scene.start_t;
                   });
  return entries;
}

inline nlohmann::json frame_selection_to_json(const FrameSelection &sel) {
  nlohmann::json frames = nlohmann::json::array();
  for (const SelectedFrame &f : sel.frames) {
    frames.push_back({{"frame_id", f.frame_id},
                      {"t", f.t},
                      {"who", f.who},
                      {"confidence", f.confidence},
                      {"similarity", f.similarity}});
  }
  nlohmann::json omitted = nlohmann::json::array();
  for (const auto &o : sel.omitted) {
    omitted.push_back({{"who", o.who}, {"reason", o.reason}});
  }
  return {{"frames", frames},
          {"omitted", omitted},
          {"no_frames", sel.frames.empty()},
          {"no_frames_in_window", sel.no_frames_in_window}};
}

inline FrameSelection frame_selection_from_json(const nlohmann::json &j) {
  FrameSelection sel;
  for (const auto &f : j.at("frames")) {
    sel.frames.push_back({f.at("frame_id").get<std::string>(),
                          f.at("t").get<Timestamp>(),
                          f.at("who").get<std::string>(),
                          f.at("confidence").get<double>(),
                          f.at("similarity").get<double>()});
  }
  for (const auto &o : j.at("omitted")) {
    sel.omitted.push_back(
        {o.at("who").get<std::string>(), o.at("reason").get<std::string>()});
  }
  sel.no_frames_in_window = j.at("no_frames_in_window").get<bool>();
  return sel;
}

inline std::string serialize_summary(const std::vector<SummaryEntry> &entries) {
  std::string out;
  for (const SummaryEntry &e : entries) {
    nlohmann::json rec = frame_selection_to_json(e.frames);
    rec["start_t"] = e.scene.start_t;
    rec["end_t"] = e.scene.end_t;
    rec["trigger_characters"] = e.scene.trigger_characters;
    rec["tweet_id"] = e.tweet_id;
    rec["tweet_text"] = e.tweet_text;
    rec["fallback_tier"] = tier_name(e.tier);
    out += rec.dump();
    out += '\n';
  }
  return out;
}

namespace detail {

inline std::string html_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

// Static HTML rendering. `{frame_id}` in image_pattern is replaced by each
// frame's id to form the image path.
inline std::string render_report_html(const std::vector<SummaryEntry> &entries,
                                      std::string_view image_pattern =
                                          "frames/{frame_id}.jpg") {
  auto image_path = [&](const std::string &frame_id) {
    std::string p(image_pattern);
    const std::string key = "{frame_id}";
    for (std::size_t pos; (pos = p.find(key)) != std::string::npos;) {
      p.replace(pos, key.size(), frame_id);
    }
    return p;
  };
  std::string html =
      "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">"
      "<title>Event summary</title></head><body>\n";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const SummaryEntry &e = entries[i];
    html += "<section>\n<h2>Scene " + std::to_string(i + 1) + " [" +
            std::to_string(e.scene.start_t) + ", " +
            std::to_string(e.scene.end_t) + ")</h2>\n";
    std::vector<std::string> who(e.scene.trigger_characters.begin(),
                                 e.scene.trigger_characters.end());
    html += "<p><em>" + detail::html_escape(text::join(who, ", ")) +
            "</em></p>\n";
    html += "<blockquote>" + detail::html_escape(e.tweet_text) +
            "</blockquote>\n";
    if (e.frames.frames.empty()) html += "<p>No frames selected.</p>\n";
    for (const SelectedFrame &f : e.frames.frames) {
      html += "<figure><img src=\"" + detail::html_escape(image_path(f.frame_id)) +
              "\" alt=\"" + detail::html_escape(f.frame_id) +
              "\"><figcaption>" + detail::html_escape(f.who) + " (" +
              std::to_string(f.confidence).substr(0, 5) +
              ")</figcaption></figure>\n";
    }
    html += "</section>\n";
  }
  html += "</body></html>\n";
  return html;
}

}  // namespace tvsum

#endif  // TVSUM_FRAME_SELECTOR_HPP_
