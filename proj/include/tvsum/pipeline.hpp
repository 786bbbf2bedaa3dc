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

// End-to-end pipeline: ingest -> detect scenes -> select tweets -> weak label
// -> train faces -> select frames -> summarize, plus the two evaluations.
// Every stage reads its inputs from the configured files or from earlier
// stages' outputs in out_dir, and writes its own outputs there.

#ifndef TVSUM_PIPELINE_HPP_
#define TVSUM_PIPELINE_HPP_

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tvsum/checkpoint.hpp"
#include "tvsum/corpus.hpp"
#include "tvsum/embeddings.hpp"
#include "tvsum/error.hpp"
#include "tvsum/io.hpp"
#include "tvsum/face_baselines.hpp"
#include "tvsum/frame_selector.hpp"
#include "tvsum/partial_label.hpp"
#include "tvsum/scenes.hpp"
#include "tvsum/tweet_selector.hpp"
#include "tvsum/weak_labels.hpp"

namespace tvsum {

struct PipelineConfig {
  std::string base_dir;  // relative input paths resolve against this

  // Inputs.
  std::string messages;
  std::string aliases;
  std::string tweet_vectors;
  std::string frame_vectors;
  std::string face_vectors;
  std::string episodes;  // JSON Lines {episode, video_start_t, subtitles,
                         // transcript, intervals}
  std::string gold_scenes;
  std::string face_test;  // JSON Lines {id, label, vec}
  std::string out_dir = "out";

  // Ingest.
  std::int64_t event_start = -1;  // < 0: first message
  bool dedupe = false;

  // Scenes.
  double k = 0.10;
  double m = 0.05;
  std::string baseline = "none";  // none | volume | meanstd
  double n_sigma = 1.0;
  std::int64_t margin_seconds = 0;

  // Weak labels.
  double window_seconds = 15.0;
  std::size_t max_faces_per_frame = 5;
  double min_align_score = 0.5;

  // Face model.
  TrainConfig train;

  // Frames.
  double confidence_threshold = 0.5;
  std::size_t frames_per_character = 1;
  std::string image_pattern = "frames/{frame_id}.jpg";
};

enum class Stage {
  kIngest,
  kDetectScenes,
  kSelectTweets,
  kWeakLabel,
  kTrainFaces,
  kSelectFrames,
  kSummarize,
  kEvalScenes,
  kEvalFaces,
};

inline constexpr Stage kAllStages[] = {
    Stage::kIngest,     Stage::kDetectScenes, Stage::kSelectTweets,
    Stage::kWeakLabel,  Stage::kTrainFaces,   Stage::kSelectFrames,
    Stage::kSummarize,  Stage::kEvalScenes,   Stage::kEvalFaces};

inline std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::kIngest: return "ingest";
    case Stage::kDetectScenes: return "detect-scenes";
    case Stage::kSelectTweets: return "select-tweets";
    case Stage::kWeakLabel: return "weak-label";
    case Stage::kTrainFaces: return "train-faces";
    case Stage::kSelectFrames: return "select-frames";
    case Stage::kSummarize: return "summarize";
    case Stage::kEvalScenes: return "eval-scenes";
    case Stage::kEvalFaces: return "eval-faces";
  }
  return "?";
}

inline std::optional<Stage> parse_stage(std::string_view s) {
  if (s == "detect") return Stage::kDetectScenes;
  if (s == "train") return Stage::kTrainFaces;
  for (Stage st : kAllStages) {
    if (stage_name(st) == s) return st;
  }
  return std::nullopt;
}

// Output file names inside out_dir.
namespace outputs {
inline constexpr const char *kCorpus = "corpus.jsonl";
inline constexpr const char *kBins = "bins.jsonl";
inline constexpr const char *kScenes = "scenes.jsonl";
inline constexpr const char *kTweets = "tweets.jsonl";
inline constexpr const char *kWeakLabels = "weak_labels.jsonl";
inline constexpr const char *kModel = "model.ckpt";
inline constexpr const char *kTrainMetrics = "train_metrics.jsonl";
inline constexpr const char *kFrames = "frames.jsonl";
inline constexpr const char *kSummary = "summary.jsonl";
inline constexpr const char *kReport = "report.html";
inline constexpr const char *kSceneEval = "scene_eval.json";
inline constexpr const char *kFaceEval = "face_eval.json";
inline constexpr const char *kRunReport = "run_report.json";
}  // namespace outputs

class Pipeline {
 public:
  explicit Pipeline(PipelineConfig cfg, std::ostream *log = nullptr)
      : cfg_(std::move(cfg)), log_(log) {}

  const PipelineConfig &config() const { return cfg_; }
  fs::path out(const char *name) const { return fs::path(cfg_.out_dir) / name; }

  bool completed(Stage s) const { return fs::exists(marker(s)); }

  // Runs the stages in order. With resume, stages whose completion marker
  // exists are skipped. Returns one report object per stage.
  nlohmann::json run(const std::vector<Stage> &stages, bool resume = false) {
    nlohmann::json report = nlohmann::json::object();
    for (Stage s : stages) {
      std::string name(stage_name(s));
      if (resume && completed(s)) {
        note(name + ": skipped (already complete)");
        report[name] = {{"skipped", true}};
        continue;
      }
      nlohmann::json r = run_stage(s);
      write_file(marker(s), r.dump() + "\n");
      note(name + ": done");
      report[name] = r;
    }
    write_file(out(outputs::kRunReport), report.dump(2) + "\n");
    return report;
  }

  // The default stage list: everything, with evaluations only when their
  // reference files are configured.
  std::vector<Stage> default_stages() const {
    std::vector<Stage> s = {Stage::kIngest,     Stage::kDetectScenes,
                            Stage::kSelectTweets, Stage::kWeakLabel,
                            Stage::kTrainFaces, Stage::kSelectFrames,
                            Stage::kSummarize};
    if (!cfg_.gold_scenes.empty()) s.push_back(Stage::kEvalScenes);
    if (!cfg_.face_test.empty()) s.push_back(Stage::kEvalFaces);
    return s;
  }

  nlohmann::json run_stage(Stage s) {
    switch (s) {
      case Stage::kIngest: return ingest();
      case Stage::kDetectScenes: return detect();
      case Stage::kSelectTweets: return select_tweets();
      case Stage::kWeakLabel: return weak_label();
      case Stage::kTrainFaces: return train_faces();
      case Stage::kSelectFrames: return select_frames_stage();
      case Stage::kSummarize: return summarize();
      case Stage::kEvalScenes: return eval_scenes();
      case Stage::kEvalFaces: return eval_faces();
    }
    throw Error("unknown stage");
  }

 private:
  fs::path marker(Stage s) const {
    return fs::path(cfg_.out_dir) / ".done" / std::string(stage_name(s));
  }

  void note(const std::string &msg) const {
    if (log_) *log_ << msg << '\n';
  }

  fs::path input(const std::string &path, const char *key) const {
    if (path.empty()) throw Error(std::string("no '") + key + "' configured");
    fs::path p(path);
    if (p.is_relative() && !cfg_.base_dir.empty()) p = fs::path(cfg_.base_dir) / p;
    if (!fs::exists(p)) throw MissingInputError(p);
    return p;
  }

  // One JSON value per non-blank line.
  static std::vector<nlohmann::json> read_records(const fs::path &path) {
    std::string contents = read_file(path);
    std::vector<nlohmann::json> records;
    std::size_t line = 0;
    for (std::string_view raw : text::split_lines(contents)) {
      ++line;
      if (text::trim(raw).empty()) continue;
      nlohmann::json rec = nlohmann::json::parse(raw, nullptr, false);
      if (rec.is_discarded()) {
        throw ParseError(path.string() + ": invalid JSON", line);
      }
      records.push_back(std::move(rec));
    }
    return records;
  }

  AliasTable load_aliases() const {
    return parse_alias_table(read_file(input(cfg_.aliases, "aliases")));
  }
  Corpus load_corpus() const {
    return Corpus(parse_messages(read_file(out(outputs::kCorpus))).messages);
  }
  std::vector<Scene> load_scenes() const {
    return parse_scenes(read_file(out(outputs::kScenes)));
  }
  LabelSpace label_space(const AliasTable &aliases) const {
    return LabelSpace(aliases.names());
  }

  nlohmann::json ingest() {
    MessageParseResult parsed =
        parse_messages(read_file(input(cfg_.messages, "messages")));
    AliasTable aliases = load_aliases();
    std::vector<Message> msgs = cfg_.dedupe ? collapse_retweets(parsed.messages)
                                            : parsed.messages;
    BinningOptions opts;
    if (cfg_.event_start >= 0) opts.event_start = cfg_.event_start;
    std::vector<MinuteBin> bins = bin_by_minute(msgs, aliases, opts);
    write_file(out(outputs::kCorpus), serialize_messages(msgs));
    write_file(out(outputs::kBins), serialize_bins(bins));
    nlohmann::json malformed = nlohmann::json::array();
    for (const LineError &e : parsed.malformed) {
      malformed.push_back({{"line", e.line}, {"reason", e.reason}});
      note("messages line " + std::to_string(e.line) + ": " + e.reason);
    }
    return {{"messages", msgs.size()},
            {"dropped_duplicates", parsed.messages.size() - msgs.size()},
            {"bins", bins.size()},
            {"characters", aliases.names().size()},
            {"malformed", malformed}};
  }

  std::vector<Scene> detect_with(const std::vector<MinuteBin> &bins) const {
    if (cfg_.baseline == "none" || cfg_.baseline.empty()) {
      return detect_scenes(bins, SceneDetectorConfig{cfg_.k, cfg_.m});
    }
    if (cfg_.baseline == "volume") return baseline_volume_peaks(bins);
    if (cfg_.baseline == "meanstd") return baseline_mean_std(bins, cfg_.n_sigma);
    throw ValidationError("unknown baseline '" + cfg_.baseline + "'");
  }

  nlohmann::json detect() {
    std::vector<MinuteBin> bins = parse_bins(read_file(out(outputs::kBins)));
    std::vector<Scene> scenes = detect_with(bins);
    write_file(out(outputs::kScenes), serialize_scenes(scenes));
    return {{"scenes", scenes.size()},
            {"method", cfg_.baseline.empty() ? "none" : cfg_.baseline}};
  }

  nlohmann::json select_tweets() {
    Corpus corpus = load_corpus();
    AliasTable aliases = load_aliases();
    EmbeddingStore tweets =
        load_store(read_file(input(cfg_.tweet_vectors, "tweet_vectors")));
    std::vector<Scene> scenes = load_scenes();
    std::string lines;
    std::map<std::string, int> tiers;
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      TweetSelection sel = select_scene_tweet(scenes[i], corpus, tweets, aliases);
      ++tiers[std::string(tier_name(sel.tier))];
      lines += nlohmann::json{{"scene", i},
                              {"tweet_id", sel.tweet_id},
                              {"tier", tier_name(sel.tier)},
                              {"similarity", sel.similarity}}
                   .dump() +
               "\n";
    }
    write_file(out(outputs::kTweets), lines);
    return {{"scenes", scenes.size()}, {"tiers", tiers}};
  }

  nlohmann::json weak_label() {
    AliasTable aliases = load_aliases();
    EmbeddingStore faces =
        load_store(read_file(input(cfg_.face_vectors, "face_vectors")));
    fs::path episodes_path = input(cfg_.episodes, "episodes");
    fs::path episodes_dir = episodes_path.parent_path();
    auto local = [&](const std::string &p) {
      fs::path q(p);
      if (q.is_relative()) q = episodes_dir / q;
      if (!fs::exists(q)) throw MissingInputError(q);
      return q;
    };
    std::map<int, std::vector<FaceRecord>> by_episode;
    for (const EmbeddedItem &f : faces.items()) {
      by_episode[f.episode].push_back({f, {}});
    }
    std::string lines;
    nlohmann::json per_episode = nlohmann::json::array();
    std::size_t kept = 0, multi = 0;
    for (const nlohmann::json &rec : read_records(episodes_path)) {
      const nlohmann::json &ep = rec;
      int episode = ep.at("episode").get<int>();
      std::vector<SpeakingInterval> intervals;
      std::size_t cues = 0, merged = 0;
      if (ep.contains("intervals")) {
        intervals = parse_speaking_intervals(
            read_file(local(ep["intervals"].get<std::string>())));
      } else {
        SrtParseResult srt =
            parse_srt(read_file(local(ep.at("subtitles").get<std::string>())));
        cues = srt.cues.size();
        merged = srt.merged_overlaps;
        auto transcript = parse_transcript(
            read_file(local(ep.at("transcript").get<std::string>())), aliases);
        intervals = align(srt.cues, transcript, {cfg_.min_align_score});
      }
      WeakLabelOptions opts;
      opts.window_seconds = cfg_.window_seconds;
      opts.max_faces_per_frame = cfg_.max_faces_per_frame;
      opts.video_origin_t = ep.value("video_start_t", Timestamp{0});
      WeakLabelResult r = assign_weak_labels(by_episode[episode], intervals, opts);
      for (const FaceRecord &f : r.faces) {
        if (f.weak_labels.size() > 1) ++multi;
        lines += nlohmann::json{{"id", f.face.id},
                                {"frame_id", f.frame_id()},
                                {"episode", episode},
                                {"labels", f.weak_labels}}
                     .dump() +
                 "\n";
      }
      kept += r.faces.size();
      per_episode.push_back({{"episode", episode},
                             {"cues", cues},
                             {"merged_overlaps", merged},
                             {"intervals", intervals.size()},
                             {"faces", r.faces.size()},
                             {"dropped_crowded", r.dropped_crowded},
                             {"dropped_unlabeled", r.dropped_unlabeled}});
    }
    write_file(out(outputs::kWeakLabels), lines);
    return {{"faces", kept},
            {"multi_labeled", multi},
            {"episodes", per_episode}};
  }

  struct WeakExamples {
    LabelSpace labels;
    std::vector<PartialExample> examples;
  };

  WeakExamples load_weak_examples(const AliasTable &aliases) const {
    EmbeddingStore faces =
        load_store(read_file(input(cfg_.face_vectors, "face_vectors")));
    WeakExamples w{label_space(aliases), {}};
    for (const nlohmann::json &rec : read_records(out(outputs::kWeakLabels))) {
      const EmbeddedItem *face = faces.find(rec.at("id").get<std::string>());
      if (!face) throw ValidationError("weak label for unknown face");
      LabelSet ys;
      for (const auto &name : rec.at("labels")) {
        auto idx = w.labels.index(name.get<std::string>());
        if (!idx) throw ValidationError("weak label outside the alias table");
        ys.push_back(*idx);
      }
      w.examples.push_back(make_example(face->vector, ys,
                                        rec.at("episode").get<int>(), face->id));
    }
    return w;
  }

  nlohmann::json train_faces() {
    AliasTable aliases = load_aliases();
    WeakExamples w = load_weak_examples(aliases);
    TrainResult r = train(w.examples, w.labels, cfg_.train);
    write_file(out(outputs::kModel), save_checkpoint(r.model, cfg_.train));
    std::string metrics;
    for (const StageMetrics &m : r.metrics) {
      metrics += nlohmann::json{{"stage", m.stage},
                                {"episode", m.episode},
                                {"round", m.round},
                                {"examples", m.examples},
                                {"mean_loss", m.mean_loss},
                                {"relabeled", m.relabeled},
                                {"without_prototype", m.without_prototype}}
                     .dump() +
                 "\n";
    }
    write_file(out(outputs::kTrainMetrics), metrics);
    return {{"examples", w.examples.size()},
            {"labels", w.labels.size()},
            {"stages", r.metrics.size()}};
  }

  nlohmann::json select_frames_stage() {
    Corpus corpus = load_corpus();
    AliasTable aliases = load_aliases();
    EmbeddingStore frames =
        load_store(read_file(input(cfg_.frame_vectors, "frame_vectors")));
    EmbeddingStore faces =
        load_store(read_file(input(cfg_.face_vectors, "face_vectors")));
    FaceIndex face_index(faces);
    SoftmaxModel model = load_checkpoint(read_file(out(outputs::kModel))).model;
    std::vector<Scene> scenes = load_scenes();
    std::vector<std::string> tweet_ids = load_tweet_ids(scenes.size());
    FrameSelectorOptions opts{cfg_.confidence_threshold,
                              cfg_.frames_per_character};
    std::string lines;
    std::size_t selected = 0;
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      const Message *m = corpus.find(tweet_ids[i]);
      if (!m) throw ValidationError("selected tweet not in corpus");
      FrameSelection sel = select_frames(scenes[i], tag_mentions(*m, aliases),
                                         frames, face_index, model, opts);
      selected += sel.frames.size();
      nlohmann::json rec = frame_selection_to_json(sel);
      rec["scene"] = i;
      lines += rec.dump() + "\n";
    }
    write_file(out(outputs::kFrames), lines);
    return {{"scenes", scenes.size()}, {"frames", selected}};
  }

  std::vector<std::string> load_tweet_ids(std::size_t n_scenes) const {
    std::vector<std::string> ids;
    for (const nlohmann::json &rec : read_records(out(outputs::kTweets))) {
      ids.push_back(rec.at("tweet_id").get<std::string>());
    }
    if (ids.size() != n_scenes) throw ValidationError("tweet file out of date");
    return ids;
  }

  nlohmann::json summarize() {
    Corpus corpus = load_corpus();
    std::vector<Scene> scenes = load_scenes();
    std::vector<TweetSelection> tweets;
    for (const nlohmann::json &rec : read_records(out(outputs::kTweets))) {
      auto tier = parse_tier(rec.at("tier").get<std::string>());
      if (!tier) throw ParseError("unknown tweet tier");
      tweets.push_back({rec.at("tweet_id").get<std::string>(), *tier,
                        rec.at("similarity").get<double>()});
    }
    std::vector<FrameSelection> frames;
    for (const nlohmann::json &rec : read_records(out(outputs::kFrames))) {
      frames.push_back(frame_selection_from_json(rec));
    }
    std::vector<SummaryEntry> entries =
        assemble_summary(scenes, tweets, frames, corpus);
    write_file(out(outputs::kSummary), serialize_summary(entries));
    write_file(out(outputs::kReport),
               render_report_html(entries, cfg_.image_pattern));
    return {{"entries", entries.size()}};
  }

  nlohmann::json eval_scenes() {
    std::vector<GoldScene> gold =
        parse_gold_scenes(read_file(input(cfg_.gold_scenes, "gold_scenes")));
    std::vector<MinuteBin> bins = parse_bins(read_file(out(outputs::kBins)));
    nlohmann::json report = nlohmann::json::object();
    auto score = [&](const std::vector<Scene> &pred) {
      SceneEvalReport r = evaluate_scenes(pred, gold, cfg_.margin_seconds);
      return nlohmann::json{{"predicted", pred.size()},
                            {"gold", gold.size()},
                            {"precision", r.precision},
                            {"recall", r.recall},
                            {"f1", r.f1},
                            {"matches", r.matches}};
    };
    report["detector"] = score(load_scenes());
    report["baseline_volume"] = score(baseline_volume_peaks(bins));
    report["baseline_meanstd"] = score(baseline_mean_std(bins, cfg_.n_sigma));
    write_file(out(outputs::kSceneEval), report.dump(2) + "\n");
    return report;
  }

  nlohmann::json eval_faces() {
    AliasTable aliases = load_aliases();
    LabelSpace labels = label_space(aliases);
    std::vector<LabeledFace> test;
    for (const nlohmann::json &rec : read_records(input(cfg_.face_test, "face_test"))) {
      auto name = aliases.resolve(rec.at("label").get<std::string>());
      auto idx = name ? labels.index(*name) : std::nullopt;
      if (!idx) throw ValidationError("test label outside the alias table");
      test.push_back({rec.at("vec").get<Vector>(), *idx});
    }
    SoftmaxModel model = load_checkpoint(read_file(out(outputs::kModel))).model;
    WeakExamples w = load_weak_examples(aliases);
    std::map<std::size_t, double> freq;
    for (const PartialExample &ex : w.examples) {
      for (std::size_t y : ex.original_labels) {
        freq[y] += 1.0 / static_cast<double>(ex.original_labels.size());
      }
    }
    AccuracyReport acc = evaluate_accuracy(model, test, &freq);
    nlohmann::json per_label = nlohmann::json::object();
    for (const auto &[name, a] : acc.per_label) {
      per_label[name] = {{"count", a.count}, {"accuracy", a.accuracy}};
    }
    nlohmann::json report = {
        {"test_faces", test.size()},
        {"micro_accuracy", acc.micro},
        {"per_label", per_label},
        {"frequency_accuracy_r",
         acc.frequency_accuracy_r ? nlohmann::json(*acc.frequency_accuracy_r)
                                  : nlohmann::json(nullptr)}};
    report["baseline_one_vs_rest"] =
        evaluate_accuracy(naive_multilabel_baseline(w.examples, labels, cfg_.train),
                          test)
            .micro;
    report["baseline_kmeans"] =
        kmeans_baseline(w.examples, test, labels, labels.size(), cfg_.train.seed)
            .accuracy;
    write_file(out(outputs::kFaceEval), report.dump(2) + "\n");
    return report;
  }

  PipelineConfig cfg_;
  std::ostream *log_;
};

}  // namespace tvsum

#endif  // TVSUM_PIPELINE_HPP_
