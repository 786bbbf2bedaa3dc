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

// Runs the tvsum binary end to end on the synthetic event fixture.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "tvsum/io.hpp"
#include "tvsum/pipeline.hpp"
#include "tvsum/synthetic.hpp"

namespace tvsum {
namespace {

struct Result {
  int status = -1;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("tvsum_cli_") + info->name() + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    config_ = synthetic::write_event_fixture(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result tvsum(const std::string &args) {
    fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    std::string cmd = std::string("'") + TVSUM_CLI_PATH + "' " + args + " >'" +
                      out.string() + "' 2>'" + err.string() + "'";
    int raw = std::system(cmd.c_str());
    Result r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = read_file(out);
    r.err = read_file(err);
    return r;
  }
  std::string cfg() const { return "--config '" + config_.string() + "'"; }
  fs::path out(const char *name) const { return dir_ / "out" / name; }

  fs::path dir_, config_;
};

TEST_F(CliTest, FullRunSummarizesThreeScenes) {
  Result r = tvsum("run -q " + cfg());
  ASSERT_EQ(r.status, 0) << r.err;
  std::string summary = read_file(out(outputs::kSummary));
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 3);
  for (const char *name : {outputs::kScenes, outputs::kModel, outputs::kReport,
                           outputs::kSceneEval, outputs::kFaceEval, outputs::kRunReport}) {
    EXPECT_TRUE(fs::exists(out(name))) << name;
  }
  auto eval = nlohmann::json::parse(read_file(out(outputs::kSceneEval)));
  EXPECT_EQ(eval["detector"]["f1"], 1.0);
}

TEST_F(CliTest, DetectStageOnly) {
  Result r = tvsum("run " + cfg() + " --stage ingest --stage detect");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(fs::exists(out(outputs::kScenes)));
  EXPECT_FALSE(fs::exists(out(outputs::kSummary)));
  auto report = nlohmann::json::parse(r.out);
  EXPECT_TRUE(report.contains("detect-scenes"));
  EXPECT_FALSE(report.contains("summarize"));
}

TEST_F(CliTest, StageSubcommandWithOverride) {
  ASSERT_EQ(tvsum("ingest -q " + cfg()).status, 0);
  ASSERT_EQ(tvsum("detect-scenes -q " + cfg() + " --k 0.99 --m 0.5").status, 0);
  EXPECT_EQ(read_file(out(outputs::kScenes)), "");
  ASSERT_EQ(tvsum("detect-scenes -q " + cfg() + " --k 0.2 --m 0.05").status, 0);
  EXPECT_NE(read_file(out(outputs::kScenes)), "");
}

TEST_F(CliTest, ResumeSkipsCompletedStages) {
  ASSERT_EQ(tvsum("run -q " + cfg()).status, 0);
  std::string scenes = read_file(out(outputs::kScenes));
  std::string model = read_file(out(outputs::kModel));
  std::string summary = read_file(out(outputs::kSummary));
  Result r = tvsum("run " + cfg() + " --resume");
  ASSERT_EQ(r.status, 0) << r.err;
  auto report = nlohmann::json::parse(r.out);
  for (auto &[stage, rep] : report.items()) {
    EXPECT_TRUE(rep.value("skipped", false)) << stage;
  }
  EXPECT_EQ(read_file(out(outputs::kScenes)), scenes);
  EXPECT_EQ(read_file(out(outputs::kModel)), model);
  EXPECT_EQ(read_file(out(outputs::kSummary)), summary);

  fs::remove(out(".done/summarize"));
  r = tvsum("run " + cfg() + " --resume");
  ASSERT_EQ(r.status, 0) << r.err;
  report = nlohmann::json::parse(r.out);
  EXPECT_FALSE(report["summarize"].value("skipped", false));
  EXPECT_TRUE(report["train-faces"].value("skipped", false));
  EXPECT_EQ(read_file(out(outputs::kSummary)), summary);
}

TEST_F(CliTest, MissingInputNamesThePath) {
  fs::remove(dir_ / "messages.jsonl");
  Result r = tvsum("run -q " + cfg());
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("messages.jsonl"), std::string::npos) << r.err;
}

TEST_F(CliTest, MissingConfigAndBadOptions) {
  EXPECT_NE(tvsum("run --config /nonexistent/tvsum.ini").status, 0);
  EXPECT_NE(tvsum("run " + cfg() + " --loss mse").status, 0);
  EXPECT_NE(tvsum("run " + cfg() + " --stage nonsense").status, 0);
  EXPECT_NE(tvsum("").status, 0);
  write_file(dir_ / "bad.ini", "no_such_key = 1\n");
  EXPECT_NE(tvsum("run --config '" + (dir_ / "bad.ini").string() + "'").status, 0);
}

TEST_F(CliTest, InvalidSceneThresholdsFail) {
  ASSERT_EQ(tvsum("ingest -q " + cfg()).status, 0);
  Result r = tvsum("detect-scenes -q " + cfg() + " --k 0.05 --m 0.1");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("m must be smaller than k"), std::string::npos) << r.err;
}

TEST_F(CliTest, MakeFixture) {
  fs::path where = dir_ / "again";
  Result r = tvsum("make-fixture --dir '" + where.string() + "'");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(fs::exists(where / "tvsum.ini"));
  EXPECT_EQ(read_file(where / "messages.jsonl"), read_file(dir_ / "messages.jsonl"));
}

}  // namespace
}  // namespace tvsum
