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

// tvsum: command-line driver for the summarization pipeline.
//
//   tvsum run --config event.ini [--stage detect] [--resume]
//   tvsum detect-scenes --config event.ini --k 0.2
//   tvsum make-fixture --dir /tmp/fixture
//
// Every flag mirrors a key of the config file. Relative paths in the config
// file resolve against the file's directory.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tvsum/pipeline.hpp"
#include "tvsum/synthetic.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitFailure = 1;
constexpr int kExitMissingInput = 2;

void add_config_options(CLI::App &app, tvsum::PipelineConfig &c,
                        std::string &loss, std::string &schedule) {
  auto opt = [&](const char *names, auto &value, const char *help) {
    app.add_option(names, value, help)->capture_default_str();
  };
  opt("--messages", c.messages, "message stream (JSON Lines)");
  opt("--aliases", c.aliases, "character alias table");
  opt("--tweet-vectors,--tweet_vectors", c.tweet_vectors, "tweet vector file");
  opt("--frame-vectors,--frame_vectors", c.frame_vectors, "frame vector file");
  opt("--face-vectors,--face_vectors", c.face_vectors, "face vector file");
  opt("--episodes", c.episodes, "episode list (JSON Lines)");
  opt("--gold-scenes,--gold_scenes", c.gold_scenes, "gold scene file");
  opt("--face-test,--face_test", c.face_test, "labeled test faces");
  opt("--out-dir,--out_dir", c.out_dir, "output directory");

  opt("--event-start,--event_start", c.event_start,
      "first bin start (unix seconds); negative uses the first message");
  opt("--dedupe", c.dedupe, "collapse retweets");

  opt("--k", c.k, "per-minute mention fraction threshold");
  opt("--m", c.m, "open-scene mention fraction threshold");
  app.add_option("--baseline", c.baseline, "scene method")
      ->check(CLI::IsMember({"none", "volume", "meanstd"}))
      ->capture_default_str();
  opt("--n-sigma,--n_sigma", c.n_sigma, "mean/std baseline multiplier");
  opt("--margin-seconds,--margin_seconds", c.margin_seconds,
      "scene matching margin");

  opt("--window-seconds,--window_seconds", c.window_seconds,
      "speaking window half-width");
  opt("--max-faces-per-frame,--max_faces_per_frame", c.max_faces_per_frame,
      "frames with more faces are dropped");
  opt("--min-align-score,--min_align_score", c.min_align_score,
      "subtitle/transcript match threshold");

  app.add_option("--loss", loss, "aveCE or hardEM")
      ->check(CLI::IsMember({"aveCE", "hardEM"}))
      ->capture_default_str();
  app.add_option("--schedule", schedule, "all_at_once or incremental")
      ->check(CLI::IsMember({"all_at_once", "incremental"}))
      ->capture_default_str();
  opt("--relabel", c.train.relabel, "prototype relabeling");
  opt("--learning-rate,--learning_rate", c.train.learning_rate, "SGD step");
  opt("--epochs-per-stage,--epochs_per_stage", c.train.epochs_per_stage,
      "epochs per training stage");
  opt("--batch-size,--batch_size", c.train.batch_size, "mini-batch size");
  opt("--seed", c.train.seed, "random seed");
  opt("--relabel-iterations,--relabel_iterations", c.train.relabel_iterations,
      "relabel rounds for all_at_once");

  opt("--confidence-threshold,--confidence_threshold", c.confidence_threshold,
      "minimum face confidence");
  opt("--frames-per-character,--frames_per_character", c.frames_per_character,
      "frames kept per character");
  opt("--image-pattern,--image_pattern", c.image_pattern,
      "report image path pattern");
}

std::string resolve(const fs::path &base, const std::string &p) {
  if (p.empty() || fs::path(p).is_absolute() || base.empty()) return p;
  return (base / p).string();
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"tvsum: summarize TV events from viewer messages and video"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key = value config file");
  app.allow_config_extras(CLI::config_extras_mode::error);

  tvsum::PipelineConfig cfg;
  std::string loss(tvsum::loss_name(cfg.train.loss));
  std::string schedule(tvsum::schedule_name(cfg.train.schedule));
  add_config_options(app, cfg, loss, schedule);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "no progress output");

  std::vector<std::pair<CLI::App *, tvsum::Stage>> stage_cmds;
  for (tvsum::Stage s : tvsum::kAllStages) {
    std::string name(tvsum::stage_name(s));
    stage_cmds.emplace_back(app.add_subcommand(name, "run the " + name + " stage"), s);
  }

  CLI::App *run = app.add_subcommand("run", "run the pipeline");
  std::vector<std::string> only;
  bool resume = false;
  run->add_option("--stage", only, "run only these stages")
      ->check([](const std::string &s) {
        return tvsum::parse_stage(s) ? std::string() : "unknown stage " + s;
      });
  run->add_flag("--resume", resume, "skip stages that already completed");

  CLI::App *fixture = app.add_subcommand("make-fixture", "write the synthetic event fixture");
  std::string fixture_dir = "fixture";
  std::uint64_t fixture_seed = 11;
  fixture->add_option("--dir", fixture_dir, "destination")->capture_default_str();
  fixture->add_option("--fixture-seed", fixture_seed, "generator seed")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (fixture->parsed()) {
      fs::path ini = tvsum::synthetic::write_event_fixture(fixture_dir, fixture_seed);
      if (!quiet) std::cout << "wrote " << ini.string() << '\n';
      return 0;
    }

    auto l = tvsum::parse_loss(loss);
    auto sch = tvsum::parse_schedule(schedule);
    cfg.train.loss = *l;
    cfg.train.schedule = *sch;
    cfg.train.validate();

    std::string config_path = app.get_option("--config")->as<std::string>();
    if (!config_path.empty()) {
      if (!fs::exists(config_path)) throw tvsum::MissingInputError(config_path);
      cfg.base_dir = fs::path(config_path).parent_path().string();
      cfg.out_dir = resolve(cfg.base_dir, cfg.out_dir);
    }

    std::vector<tvsum::Stage> stages;
    tvsum::Pipeline pipeline(cfg, quiet ? nullptr : &std::cerr);
    if (run->parsed()) {
      if (only.empty()) {
        stages = pipeline.default_stages();
      } else {
        for (const std::string &s : only) stages.push_back(*tvsum::parse_stage(s));
      }
    } else {
      for (const auto &[cmd, s] : stage_cmds) {
        if (cmd->parsed()) stages.push_back(s);
      }
    }
    nlohmann::json report = pipeline.run(stages, resume);
    if (!quiet) std::cout << report.dump(2) << '\n';
    return 0;
  } catch (const tvsum::MissingInputError &e) {
    std::cerr << "tvsum: " << e.what() << '\n';
    return kExitMissingInput;
  } catch (const std::exception &e) {
    std::cerr << "tvsum: " << e.what() << '\n';
    return kExitFailure;
  }
}
