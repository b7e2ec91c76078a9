// tests/cli-test.cc

// Copyright 2026  The SISE Toolkit Authors

// See ../../COPYING for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "sise/digest.h"
#include "sise/process.h"
#include "sise/track.h"
#include "sise/wav-io.h"

#ifndef SISE_CLI_PATH
#error "SISE_CLI_PATH must name the sise binary"
#endif

namespace sise {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = MakeTempDir("sise-cli-test");
    const CommandResult toy = Run("augment toy --n 12 --seed 7 --duration 0.5 --out " + dir_ + "/toy");
    ASSERT_EQ(toy.exit_code, 0) << toy.err;
    const std::string noise = dir_ + "/toy/noise/";
    const CommandResult train =
        Run("augment build-train --manifest " + dir_ + "/toy/manifest.jsonl --babble-pool " + noise +
            "train_babble.list --nonbabble-pool " + noise + "train_nonbabble.list --seed 3 --out " + dir_ +
            "/train");
    ASSERT_EQ(train.exit_code, 0) << train.err;
    const CommandResult test =
        Run("augment build-test --manifest " + dir_ + "/toy/manifest.jsonl --babble-pool " + noise +
            "test_babble.list --nonbabble-pool " + noise + "test_nonbabble.list --train-babble-pool " + noise +
            "train_babble.list --train-nonbabble-pool " + noise + "train_nonbabble.list --snr-levels=-5,0 " +
            "--seed 4 --out " + dir_ + "/test");
    ASSERT_EQ(test.exit_code, 0) << test.err;
    const CommandResult si =
        Run("train --scenario si-o --manifest " + dir_ + "/train/manifest.jsonl --max-epochs 1 --hidden 4 " +
            "--run-root " + dir_ + "/runs --run-name si-o");
    ASSERT_EQ(si.exit_code, 0) << si.err;
    const CommandResult mt =
        Run("train --scenario sise-m --manifest " + dir_ + "/train/manifest.jsonl --max-epochs 1 --hidden 4 " +
            "--run-root " + dir_ + "/runs --run-name sise-m");
    ASSERT_EQ(mt.exit_code, 0) << mt.err;
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static CommandResult Run(const std::string &args) {
    return RunCommand(ShellQuote(SISE_CLI_PATH) + " " + args, 600);
  }
  static std::string dir_;
};
std::string Cli::dir_;

TEST_F(Cli, ToyCorpusIsReproducible) {
  ASSERT_EQ(Run("augment toy --n 12 --seed 7 --duration 0.5 --out " + dir_ + "/toy-again").exit_code, 0);
  EXPECT_EQ(Sha256File(dir_ + "/toy/manifest.jsonl"), Sha256File(dir_ + "/toy-again/manifest.jsonl"));
  EXPECT_EQ(Sha256File(dir_ + "/toy/clean/toy0003.wav"), Sha256File(dir_ + "/toy-again/clean/toy0003.wav"));
  EXPECT_TRUE(fs::exists(dir_ + "/toy/resolved_config.json"));
  std::ifstream in(dir_ + "/toy/manifest.jsonl");
  int lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  EXPECT_EQ(lines, 1 + 12);  // header + entries
}

TEST_F(Cli, BuildTestWithoutPoolsFails) {
  const CommandResult r = Run("augment build-test --manifest " + dir_ + "/toy/manifest.jsonl --out " + dir_ + "/nopool");
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.err.find("InsufficientPool"), std::string::npos) << r.err;
}

TEST_F(Cli, UsageAndStateErrors) {
  EXPECT_EQ(Run("train --scenario sise-x --manifest " + dir_ + "/train/manifest.jsonl").exit_code, 2);
  EXPECT_EQ(Run("frobnicate").exit_code, 2);
  EXPECT_EQ(Run("--help").exit_code, 0);
  const CommandResult p = Run("train --scenario sise-p --manifest " + dir_ + "/train/manifest.jsonl --run-root " +
                              dir_ + "/runs");
  EXPECT_EQ(p.exit_code, 4);
  EXPECT_NE(p.err.find("InvalidState"), std::string::npos) << p.err;
}

TEST_F(Cli, TrainWritesRunDirectory) {
  const std::string run = dir_ + "/runs/si-o";
  for (const char *f : {"resolved_config.json", "metrics.jsonl", "run_record.json", "stage1.ckpt", "stage2.ckpt"})
    EXPECT_TRUE(fs::exists(run + "/" + f)) << f;
  const CommandResult one = Run("train --scenario si-o --stage 1 --manifest " + dir_ +
                                "/train/manifest.jsonl --max-epochs 1 --hidden 4 --seed 5 --run-root " + dir_ +
                                "/stamped");
  ASSERT_EQ(one.exit_code, 0) << one.err;
  int dirs = 0;
  for (const auto &e : fs::directory_iterator(dir_ + "/stamped")) {
    ++dirs;
    EXPECT_EQ(e.path().filename().string().rfind("si-o-seed5-", 0), 0u) << e.path();
    EXPECT_TRUE(fs::exists(e.path() / "stage1.ckpt"));
    EXPECT_FALSE(fs::exists(e.path() / "stage2.ckpt"));
  }
  EXPECT_EQ(dirs, 1);
}

TEST_F(Cli, EnhanceAndInvertContracts) {
  const std::string ckpt = dir_ + "/runs/sise-m/stage2.ckpt";
  const std::string in = dir_ + "/toy/clean/toy0000.wav";
  ASSERT_EQ(Run("enhance --checkpoint " + ckpt + " --input " + in + " --output " + dir_ + "/enh.wav").exit_code, 0);
  const Waveform a = ReadWav(in), b = ReadWav(dir_ + "/enh.wav");
  EXPECT_EQ(a.size(), b.size());
  EXPECT_EQ(a.sample_rate, b.sample_rate);
  EXPECT_TRUE(fs::exists(dir_ + "/enh.wav.config.json"));

  ASSERT_EQ(Run("invert --checkpoint " + ckpt + " --input " + in + " --output " + dir_ + "/t.csv").exit_code, 0);
  const ArticulatoryTrack t = ReadTrack(dir_ + "/t.csv");
  EXPECT_EQ(t.NumFrames(), 25);  // round(0.5 s * 50)
  std::ifstream csv(dir_ + "/t.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_NE(header.find("TTCD"), std::string::npos);

  const CommandResult geom = Run("enhance --checkpoint " + ckpt + " --input " + in + " --output " + dir_ +
                                 "/x.wav --geometry 512,128");
  EXPECT_EQ(geom.exit_code, 4);
  EXPECT_NE(geom.err.find("IncompatibleCheckpoint"), std::string::npos) << geom.err;
  EXPECT_NE(Run("enhance --checkpoint " + ckpt + " --input " + dir_ + "/missing.wav --output " + dir_ + "/y.wav").exit_code, 0);
}

TEST_F(Cli, EvaluateAndReport) {
  for (const char *run : {"si-o", "sise-m"}) {
    const CommandResult r = Run("evaluate --checkpoint " + dir_ + "/runs/" + run + "/stage2.ckpt --manifest " + dir_ +
                                "/test/manifest.jsonl --train-manifest " + dir_ + "/train/manifest.jsonl --out " +
                                dir_ + "/eval-" + run);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir_ + "/eval-" + run + "/cells.json"));
  }
  const std::string cells = "--cells " + dir_ + "/eval-si-o/cells.json --cells " + dir_ + "/eval-sise-m/cells.json";
  const CommandResult rep = Run("--output-format json report " + cells + " --scenarios si-o,sise-m --snrs=-5,0 " +
                                "--improve sise-m:si-o:avg_all --out " + dir_ + "/report");
  ASSERT_EQ(rep.exit_code, 0) << rep.err;
  std::ifstream in(dir_ + "/report/table.json");
  const nlohmann::json table = nlohmann::json::parse(in);
  EXPECT_EQ(table.at("rows").size(), 2u * 2u * 2u);
  EXPECT_TRUE(fs::exists(dir_ + "/report/improvements.json"));

  EXPECT_EQ(Run("report " + cells + " --scenarios nobody --out " + dir_ + "/empty").exit_code, 3);

  const CommandResult fig =
      Run("report --figure toy0011 --manifest " + dir_ + "/test/manifest.jsonl --snr 0 --se-checkpoint " + dir_ +
          "/runs/sise-m/stage2.ckpt --si-checkpoint si-o=" + dir_ + "/runs/si-o/stage2.ckpt --si-checkpoint sise-m=" +
          dir_ + "/runs/sise-m/stage2.ckpt --out " + dir_ + "/fig");
  ASSERT_EQ(fig.exit_code, 0) << fig.err;
  EXPECT_TRUE(fs::exists(dir_ + "/fig/figure-toy0011.png"));
  std::ifstream layout_in(dir_ + "/fig/figure-toy0011.json");
  const nlohmann::json layout = nlohmann::json::parse(layout_in);
  EXPECT_EQ(layout.at("panels").back().at("title"), "TTCD");
}

TEST_F(Cli, TestSetOverlapIsRejected) {
  // Declaring the test manifest itself as training data must be refused.
  const CommandResult r = Run("evaluate --checkpoint " + dir_ + "/runs/si-o/stage2.ckpt --manifest " + dir_ +
                              "/test/manifest.jsonl --train-manifest " + dir_ + "/test/manifest.jsonl --out " +
                              dir_ + "/eval-bad");
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.err.find("ContaminatedEvaluation"), std::string::npos) << r.err;
}

}  // namespace
}  // namespace sise
