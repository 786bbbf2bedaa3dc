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

// Who-speaks-when from subtitles (what/when) and transcripts (who/what), and
// partial face labels derived from it.

#ifndef TVSUM_WEAK_LABELS_HPP_
#define TVSUM_WEAK_LABELS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tvsum/corpus.hpp"
#include "tvsum/embeddings.hpp"
#include "tvsum/error.hpp"
#include "tvsum/text.hpp"

namespace tvsum {

using Millis = std::int64_t;

struct SubtitleCue {
  int index = 0;
  Millis start_ms = 0;
  Millis end_ms = 0;
  std::string text;

  friend bool operator==(const SubtitleCue &, const SubtitleCue &) = default;
};

struct SrtParseResult {
  std::vector<SubtitleCue> cues;
  std::size_t merged_overlaps = 0;
};

namespace detail {

inline bool parse_fixed_digits(std::string_view s, std::size_t n, int &out) {
  if (s.size() < n) return false;
  out = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    out = out * 10 + (s[i] - '0');
  }
  return true;
}

// HH:MM:SS,mmm
inline bool parse_timecode(std::string_view s, Millis &ms) {
  int h, m, sec, milli;
  if (s.size() != 12 || s[2] != ':' || s[5] != ':' || s[8] != ',') {
    return false;
  }
  if (!parse_fixed_digits(s.substr(0, 2), 2, h) ||
      !parse_fixed_digits(s.substr(3, 2), 2, m) ||
      !parse_fixed_digits(s.substr(6, 2), 2, sec) ||
      !parse_fixed_digits(s.substr(9, 3), 3, milli) || m > 59 || sec > 59) {
    return false;
  }
  ms = ((static_cast<Millis>(h) * 60 + m) * 60 + sec) * 1000 + milli;
  return true;
}

// Removes <i>-style markup and {\an8}-style override blocks.
inline std::string strip_tags(std::string_view s) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    char close = s[i] == '<' ? '>' : (s[i] == '{' ? '}' : 0);
    if (close) {
      std::size_t end = s.find(close, i);
      if (end != std::string_view::npos) {
        i = end + 1;
        continue;
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

}  // namespace detail

inline std::string format_timecode(Millis ms) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%02lld:%02lld:%02lld,%03lld",
                static_cast<long long>(ms / 3600000),
                static_cast<long long>(ms / 60000 % 60),
                static_cast<long long>(ms / 1000 % 60),
                static_cast<long long>(ms % 1000));
  return buf;
}

// Parses SubRip text. Cues come back in start order; overlapping cues are
// merged into the earlier one and counted.
inline SrtParseResult parse_srt(std::string_view source) {
  if (source.substr(0, 3) == "\xEF\xBB\xBF") source.remove_prefix(3);
  std::vector<std::string_view> lines = text::split_lines(source);
  SrtParseResult result;
  std::size_t i = 0;
  while (i < lines.size()) {
    if (text::trim(lines[i]).empty()) {
      ++i;
      continue;
    }
    std::string_view idx = text::trim(lines[i]);
    int index = 0;
    if (idx.size() > 9 || !detail::parse_fixed_digits(idx, idx.size(), index)) {
      throw ParseError("expected cue index, got '" + std::string(idx) + "'",
                       i + 1);
    }
    ++i;
    std::string where = "cue " + std::to_string(index);
    if (i >= lines.size()) throw ParseError(where + ": missing timecode", i);
    std::string_view tc = text::trim(lines[i]);
    Millis start = 0, end = 0;
    if (tc.size() != 29 || tc.substr(12, 5) != " --> " ||
        !detail::parse_timecode(tc.substr(0, 12), start) ||
        !detail::parse_timecode(tc.substr(17, 12), end)) {
      throw ParseError(where + ": malformed timecode '" + std::string(tc) + "'",
                       i + 1);
    }
    if (start >= end) {
      throw ParseError(where + ": start is not before end", i + 1);
    }
    ++i;
    std::vector<std::string> body;
    while (i < lines.size() && !text::trim(lines[i]).empty()) {
      body.push_back(detail::strip_tags(lines[i]));
      ++i;
    }
    result.cues.push_back({index, start, end, text::join(body, "\n")});
  }
  std::stable_sort(result.cues.begin(), result.cues.end(),
                   [](const SubtitleCue &a, const SubtitleCue &b) {
                     return a.start_ms < b.start_ms;
                   });
  std::vector<SubtitleCue> merged;
  for (SubtitleCue &c : result.cues) {
    if (!merged.empty() && c.start_ms < merged.back().end_ms) {
      SubtitleCue &prev = merged.back();
      prev.end_ms = std::max(prev.end_ms, c.end_ms);
      if (!c.text.empty()) prev.text += (prev.text.empty() ? "" : "\n") + c.text;
      ++result.merged_overlaps;
      continue;
    }
    merged.push_back(std::move(c));
  }
  result.cues = std::move(merged);
  return result;
}

inline std::string write_srt(const std::vector<SubtitleCue> &cues) {
  std::string out;
  for (const SubtitleCue &c : cues) {
    out += std::to_string(c.index) + "\n" + format_timecode(c.start_ms) +
           " --> " + format_timecode(c.end_ms) + "\n" + c.text + "\n\n";
  }
  return out;
}

struct TranscriptLine {
  std::string speaker;
  std::string text;
};

// Transcript file: JSON Lines {"speaker", "text"}. Speakers may be given by
// canonical name or alias and are resolved through the alias table.
inline std::vector<TranscriptLine> parse_transcript(std::string_view source,
                                                    const AliasTable &aliases) {
  std::vector<TranscriptLine> lines;
  std::size_t lineno = 0;
  for (std::string_view raw : text::split_lines(source)) {
    ++lineno;
    std::string_view line = text::trim(raw);
    if (line.empty()) continue;
    nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object() || !rec.contains("speaker") ||
        !rec["speaker"].is_string() || !rec.contains("text") ||
        !rec["text"].is_string()) {
      throw ParseError("transcript line needs 'speaker' and 'text'", lineno);
    }
    std::string speaker = rec["speaker"].get<std::string>();
    auto canonical = aliases.resolve(speaker);
    if (!canonical) {
      throw ParseError("unknown speaker '" + speaker + "'", lineno);
    }
    std::string txt = rec["text"].get<std::string>();
    if (text::trim(txt).empty()) {
      throw ParseError("empty transcript text", lineno);
    }
    lines.push_back({*canonical, std::move(txt)});
  }
  return lines;
}

struct SpeakingInterval {
  std::string speaker;
  Millis start_ms = 0;
  Millis end_ms = 0;

  friend bool operator==(const SpeakingInterval &,
                         const SpeakingInterval &) = default;
};

// Override file: JSON Lines {"speaker", "start_ms", "end_ms"}.
inline std::vector<SpeakingInterval> parse_speaking_intervals(
    std::string_view source) {
  std::vector<SpeakingInterval> out;
  std::size_t lineno = 0;
  for (std::string_view raw : text::split_lines(source)) {
    ++lineno;
    std::string_view line = text::trim(raw);
    if (line.empty()) continue;
    try {
      nlohmann::json rec = nlohmann::json::parse(line);
      SpeakingInterval s{rec.at("speaker").get<std::string>(),
                         rec.at("start_ms").get<Millis>(),
                         rec.at("end_ms").get<Millis>()};
      if (s.start_ms >= s.end_ms) {
        throw ParseError("interval start_ms must precede end_ms", lineno);
      }
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(std::string("bad interval record: ") + e.what(), lineno);
    }
  }
  return out;
}

inline std::string serialize_speaking_intervals(
    const std::vector<SpeakingInterval> &intervals) {
  std::string out;
  for (const SpeakingInterval &s : intervals) {
    nlohmann::json rec = {
        {"speaker", s.speaker}, {"start_ms", s.start_ms}, {"end_ms", s.end_ms}};
    out += rec.dump();
    out += '\n';
  }
  return out;
}

// Token F1 between two texts, counting repeated tokens as a multiset.
inline double token_f1(const std::vector<std::string> &a,
                       const std::vector<std::string> &b) {
  if (a.empty() || b.empty()) return 0.0;
  std::vector<std::string> sa(a), sb(b);
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  std::size_t i = 0, j = 0, overlap = 0;
  while (i < sa.size() && j < sb.size()) {
    if (sa[i] == sb[j]) {
      ++overlap, ++i, ++j;
    } else if (sa[i] < sb[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  if (overlap == 0) return 0.0;
  double p = static_cast<double>(overlap) / static_cast<double>(a.size());
  double r = static_cast<double>(overlap) / static_cast<double>(b.size());
  return 2.0 * p * r / (p + r);
}

struct AlignOptions {
  double min_score = 0.5;  // pairs scoring below this are never aligned
};

// Monotone alignment of cues to transcript lines maximising the summed token
// F1 of aligned pairs; gaps cost nothing. Several consecutive cues may map to
// the same line (subtitles often split one spoken line). Returns
// (cue index, line index) pairs in cue order.
inline std::vector<std::pair<std::size_t, std::size_t>> align_cues(
    const std::vector<SubtitleCue> &cues,
    const std::vector<TranscriptLine> &lines, const AlignOptions &opts = {}) {
  const std::size_t nc = cues.size(), nl = lines.size();
  std::vector<std::vector<std::string>> ct(nc), lt(nl);
  for (std::size_t i = 0; i < nc; ++i) ct[i] = text::tokenize(cues[i].text, false);
  for (std::size_t j = 0; j < nl; ++j) lt[j] = text::tokenize(lines[j].text, false);
  std::vector<double> score(nc * nl);
  for (std::size_t i = 0; i < nc; ++i) {
    for (std::size_t j = 0; j < nl; ++j) {
      double s = token_f1(ct[i], lt[j]);
      score[i * nl + j] = s >= opts.min_score ? s : -1.0;
    }
  }
  // best[i][j]: cues [0, i) against lines [0, j).
  std::vector<double> best((nc + 1) * (nl + 1), 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double & {
    return best[i * (nl + 1) + j];
  };
  for (std::size_t i = 1; i <= nc; ++i) {
    for (std::size_t j = 1; j <= nl; ++j) {
      double v = std::max(at(i, j - 1), at(i - 1, j));
      double s = score[(i - 1) * nl + (j - 1)];
      if (s >= 0.0) v = std::max(v, at(i - 1, j) + s);
      at(i, j) = v;
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::size_t i = nc, j = nl;
  while (i > 0 && j > 0) {
    double s = score[(i - 1) * nl + (j - 1)];
    if (s >= 0.0 && at(i, j) == at(i - 1, j) + s) {
      pairs.emplace_back(i - 1, j - 1);
      --i;
    } else if (at(i, j) == at(i - 1, j)) {
      --i;
    } else {
      --j;
    }
  }
  std::reverse(pairs.begin(), pairs.end());
  return pairs;
}

inline std::vector<SpeakingInterval> align(
    const std::vector<SubtitleCue> &cues,
    const std::vector<TranscriptLine> &lines, const AlignOptions &opts = {}) {
  std::vector<SpeakingInterval> out;
  for (auto [ci, li] : align_cues(cues, lines, opts)) {
    out.push_back({lines[li].speaker, cues[ci].start_ms, cues[ci].end_ms});
  }
  return out;
}

// A face with the set of characters that may be the person shown.
struct FaceRecord {
  EmbeddedItem face;
  CharacterSet weak_labels;

  const std::string &frame_id() const { return face.frame_id; }
};

struct WeakLabelOptions {
  double window_seconds = 15.0;
  std::size_t max_faces_per_frame = 5;
  // Epoch time of the video's first frame; face timestamps minus this origin
  // give the position on the subtitle clock.
  Timestamp video_origin_t = 0;
};

struct WeakLabelResult {
  std::vector<FaceRecord> faces;
  std::size_t dropped_crowded = 0;
  std::size_t dropped_unlabeled = 0;
};

// Labels each face with every speaker whose interval intersects the closed
// window [t - w, t + w] around the face. Faces from frames with more than
// max_faces_per_frame faces, and faces left without any label, are dropped.
inline WeakLabelResult assign_weak_labels(
    const std::vector<FaceRecord> &faces,
    const std::vector<SpeakingInterval> &intervals,
    const WeakLabelOptions &opts = {}) {
  // Faces without a frame id count as alone in their frame.
  auto frame_key = [](const FaceRecord &f) {
    return f.frame_id().empty() ? "\x1f" + f.face.id : f.frame_id();
  };
  std::map<std::string, std::size_t> per_frame;
  for (const FaceRecord &f : faces) ++per_frame[frame_key(f)];
  const Millis w = std::llround(opts.window_seconds * 1000.0);
  WeakLabelResult result;
  for (const FaceRecord &f : faces) {
    if (per_frame[frame_key(f)] > opts.max_faces_per_frame) {
      ++result.dropped_crowded;
      continue;
    }
    const Millis tf = (f.face.t - opts.video_origin_t) * 1000;
    FaceRecord out{f.face, {}};
    for (const SpeakingInterval &s : intervals) {
      if (s.start_ms <= tf + w && s.end_ms >= tf - w) {
        out.weak_labels.insert(s.speaker);
      }
    }
    if (out.weak_labels.empty()) {
      ++result.dropped_unlabeled;
      continue;
    }
    result.faces.push_back(std::move(out));
  }
  return result;
}

}  // namespace tvsum

#endif  // TVSUM_WEAK_LABELS_HPP_
