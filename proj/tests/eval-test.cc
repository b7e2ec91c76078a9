// tests/eval-test.cc

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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "oracles.h"
#include "sise/external-scorer.h"
#include "sise/figure.h"
#include "sise/ppmc.h"
#include "sise/process.h"
#include "sise/report.h"
#include "sise/stoi.h"
#include "sise/toy-corpus.h"
#include "sise/wav-io.h"

#ifndef SISE_TEST_DATA_DIR
#error "SISE_TEST_DATA_DIR must point at tests/data"
#endif

namespace sise {
namespace {

namespace fs = std::filesystem;
const std::string kData = SISE_TEST_DATA_DIR;

Matrix RandomTrack(uint64_t seed, int frames) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(frames, kNumTrackChannels);
  for (long i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

TEST(Ppmc, SelfCorrelationIsOne) {
  const std::vector<Matrix> ref = {RandomTrack(1, 40), RandomTrack(2, 55)};
  for (PpmcMode mode : {PpmcMode::kCorpus, PpmcMode::kPerUtterance}) {
    const PpmcReport r = ComputePpmc(ref, ref, mode);
    for (double v : r.values) EXPECT_NEAR(v, 1.0, 1e-12);
    EXPECT_NEAR(r.avg_all, 1.0, 1e-12);
  }
}

TEST(Ppmc, AffineInvariant) {
  const std::vector<Matrix> ref = {RandomTrack(3, 60)};
  std::vector<Matrix> est = {RandomTrack(4, 60)};
  est[0] = 0.5 * est[0] + ref[0];
  const PpmcReport base = ComputePpmc(est, ref);
  std::vector<Matrix> moved = {3.0 * est[0].array() + 7.0};
  const PpmcReport r = ComputePpmc(moved, ref);
  for (int c = 0; c < kNumTrackChannels; ++c) EXPECT_NEAR(r.values[c], base.values[c], 1e-12);
}

TEST(Ppmc, IndependentSeriesNearZero) {
  const PpmcReport r = ComputePpmc({RandomTrack(5, 10000)}, {RandomTrack(6, 10000)});
  for (double v : r.values) EXPECT_LT(std::abs(v), 0.05);
}

TEST(Ppmc, MatchesOracleAndModesDiffer) {
  const std::vector<Matrix> ref = {RandomTrack(7, 30), RandomTrack(8, 45)};
  std::vector<Matrix> est = {ref[0] + RandomTrack(9, 30), 2.0 * ref[1] + RandomTrack(10, 45)};
  const PpmcReport corpus = ComputePpmc(est, ref, PpmcMode::kCorpus);
  const PpmcReport per = ComputePpmc(est, ref, PpmcMode::kPerUtterance);
  for (int c = 0; c < kNumTrackChannels; ++c) {
    std::vector<double> a, b;
    for (size_t u = 0; u < ref.size(); ++u)
      for (long t = 0; t < ref[u].rows(); ++t) {
        a.push_back(est[u](t, c));
        b.push_back(ref[u](t, c));
      }
    EXPECT_NEAR(corpus.values[c], oracle::Pearson(a, b), 1e-12);
    double mean = 0.0;
    for (size_t u = 0; u < ref.size(); ++u) {
      std::vector<double> x(ref[u].rows()), y(ref[u].rows());
      for (long t = 0; t < ref[u].rows(); ++t) {
        x[t] = est[u](t, c);
        y[t] = ref[u](t, c);
      }
      mean += oracle::Pearson(x, y) / ref.size();
    }
    EXPECT_NEAR(per.values[c], mean, 1e-12);
  }
  double sum = 0.0;
  for (double v : corpus.values) sum += v;
  EXPECT_NEAR(corpus.avg_all, sum / kNumTrackChannels, 1e-12);
}

TEST(Ppmc, ConstantChannelIsExcludedWithWarning) {
  const std::vector<Matrix> ref = {RandomTrack(11, 50)};
  std::vector<Matrix> est = {ref[0] + 0.3 * RandomTrack(12, 50)};
  est[0].col(9).setConstant(120.0);
  const PpmcReport r = ComputePpmc(est, ref);
  EXPECT_FALSE(r.defined[9]);
  EXPECT_EQ(r.num_undefined, 1);
  EXPECT_FALSE(r.warnings.empty());
  double sum = 0.0;
  for (int c = 0; c < 9; ++c) sum += r.values[c];
  EXPECT_NEAR(r.avg_all, sum / 9.0, 1e-12);
  const nlohmann::json j = r;
  EXPECT_TRUE(j.at("values").at("F0").is_null());
}

TEST(Ppmc, MismatchedShapesRejected) {
  EXPECT_THROW(ComputePpmc({RandomTrack(1, 10)}, {RandomTrack(1, 11)}), Error);
  EXPECT_THROW(ComputePpmc({RandomTrack(1, 10)}, {}), Error);
}

struct StoiPair {
  std::string name;
  double snr = 0.0;
  double reference = 0.0;
};

std::vector<StoiPair> ReadReference() {
  std::ifstream in(kData + "/stoi/reference.csv");
  std::string line;
  std::getline(in, line);
  std::vector<StoiPair> pairs;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    StoiPair p;
    std::string f;
    std::getline(ss, p.name, ',');
    std::getline(ss, f, ',');
    p.snr = std::stod(f);
    std::getline(ss, f, ',');
    p.reference = std::stod(f);
    pairs.push_back(p);
  }
  return pairs;
}

TEST(Stoi, MatchesReferenceImplementation) {
  const std::vector<StoiPair> pairs = ReadReference();
  ASSERT_EQ(pairs.size(), 20u);
  for (const StoiPair &p : pairs) {
    const Waveform clean = ReadWav(kData + "/stoi/" + p.name + "-clean.wav");
    const Waveform degraded = ReadWav(kData + "/stoi/" + p.name + "-degraded.wav");
    EXPECT_NEAR(Stoi(clean, degraded), p.reference, 0.01) << p.name;
  }
}

TEST(Stoi, IdentityAndRange) {
  const Waveform clean = ReadWav(kData + "/stoi/pair00-clean.wav");
  EXPECT_GE(Stoi(clean, clean), 0.99);
  EXPECT_LE(Stoi(clean, clean), 1.0);
}

TEST(Stoi, MonotoneOverSnrLadder) {
  for (uint64_t seed : {1, 2, 3}) {
    const Waveform clean = SynthesizeToyUtterance(2.0, seed).wave;
    const std::vector<double> noise = oracle::RandomSignal(seed + 40, clean.size());
    double previous = -1.0;
    for (double snr : {-10.0, -5.0, 0.0, 5.0, 10.0}) {
      const double g = std::sqrt(Energy(clean.samples) / Energy(noise) / std::pow(10.0, snr / 10.0));
      Waveform noisy = clean;
      for (size_t i = 0; i < noisy.size(); ++i) noisy.samples[i] += g * noise[i];
      const double s = Stoi(clean, noisy);
      EXPECT_GE(s, previous) << "seed " << seed << " snr " << snr;
      previous = s;
    }
  }
}

TEST(Stoi, TooShortIsInvalid) {
  const Waveform a(oracle::RandomSignal(1, 4000));
  try {
    Stoi(a, a);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidInput);
  }
  const Waveform b(oracle::RandomSignal(1, 16000));
  const Waveform c(oracle::RandomSignal(1, 15999));
  EXPECT_THROW(Stoi(b, c), Error);
}

TEST(Scorer, OutputFormats) {
  const auto a = ParseScorerOutput("{\"pesq\": 2.5, \"csig\": 3.0}");
  EXPECT_EQ(a.at("pesq"), 2.5);
  const auto b = ParseScorerOutput("PESQ: 1.75\ncovl=2.25\nnoise line\n");
  EXPECT_EQ(b.at("pesq"), 1.75);
  EXPECT_EQ(b.at("covl"), 2.25);
  EXPECT_THROW(ParseScorerOutput("nothing numeric here"), Error);
}

TEST(Scorer, AbsentAdapterIsUnavailable) {
  const ExternalScores s = RunExternalScorer({}, "a.wav", "b.wav");
  EXPECT_EQ(s.status, "unavailable");
  EXPECT_TRUE(s.values.empty());
  SeReport r;
  r.stoi = 0.8;
  r.MergeExternal(s);
  EXPECT_FALSE(r.pesq.has_value());
  const nlohmann::json j = r;
  EXPECT_FALSE(j.contains("pesq"));
  EXPECT_EQ(j.at("external_status"), "unavailable");
}

TEST(Scorer, EchoStubAndBatchOrder) {
  const ExternalScorerConfig stub{"echo pesq=2.50", 10};
  const ExternalScores s = RunExternalScorer(stub, "a.wav", "b.wav");
  EXPECT_EQ(s.status, "ok");
  EXPECT_EQ(s.provenance, "external");
  EXPECT_EQ(s.values.at("pesq"), 2.50);

  const ExternalScorerConfig by_name{"echo pesq=$(basename {degraded} .wav)", 10};
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int i = 0; i < 5; ++i) pairs.push_back({"c.wav", std::to_string(i + 1) + ".wav"});
  const std::vector<ExternalScores> out = RunExternalScorerBatch(by_name, pairs);
  ASSERT_EQ(out.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(out[i].values.at("pesq"), i + 1.0);
}

TEST(Scorer, FailureAndTimeoutAreScorerErrors) {
  for (const ExternalScorerConfig &cfg :
       {ExternalScorerConfig{"echo broken >&2; exit 3", 10}, ExternalScorerConfig{"sleep 5", 1}}) {
    try {
      RunExternalScorer(cfg, "a.wav", "b.wav");
      FAIL() << cfg.command;
    } catch (const Error &e) {
      EXPECT_EQ(e.kind(), ErrorKind::kScorerError);
    }
  }
}

class Published : public ::testing::Test {
 protected:
  void SetUp() override {
    std::ifstream in(kData + "/published-values.json");
    data_ = nlohmann::json::parse(in);
    for (const auto &row : data_.at("ppmc")) {
      ReportCell c{row.at("scenario"), row.at("noise"), row.at("snr_db").get<double>(), {}, 0};
      c.metrics["avg_all"] = row.at("avg_all");
      cells_.push_back(c);
    }
    for (const auto &row : data_.at("quality")) {
      auto same = [&](const ReportCell &c) {
        return c.scenario == row.at("scenario") && c.noise == row.at("noise") &&
               *c.snr_db == row.at("snr_db");
      };
      auto it = std::find_if(cells_.begin(), cells_.end(), same);
      if (it == cells_.end()) {
        cells_.push_back({row.at("scenario"), row.at("noise"), row.at("snr_db").get<double>(), {}, 0});
        it = std::prev(cells_.end());
      }
      it->metrics["pesq"] = row.at("pesq");
    }
  }
  double Claim(const std::string &k) const { return data_.at("claimed_percent").at(k); }
  nlohmann::json data_;
  std::vector<ReportCell> cells_;
};

TEST_F(Published, RelativeImprovementsReproduceClaims) {
  const auto rows = RelativeImprovements(cells_, "sise-m", "si-o", "avg_all");
  ASSERT_EQ(rows.size(), 2u);
  for (const ImprovementRow &r : rows) {
    const double claim = r.noise == "babble" ? Claim("sise_m_vs_si_o_babble") : Claim("sise_m_vs_si_o_nonbabble");
    EXPECT_NEAR(r.percent, claim, 0.01) << r.noise;
  }
  EXPECT_NEAR(NoiseImprovement(cells_, "sise-m", -5, "nonbabble", "babble", "avg_all").percent,
              Claim("nonbabble_vs_babble_ppmc"), 0.01);
  EXPECT_NEAR(NoiseImprovement(cells_, "sise-m", -5, "nonbabble", "babble", "pesq").percent,
              Claim("nonbabble_vs_babble_pesq"), 0.01);
}

TEST(Report, RelativeImprovementArithmetic) {
  EXPECT_NEAR(RelativeImprovement(0.76, 0.42), 80.952380952, 1e-6);
  EXPECT_NEAR(RelativeImprovement(0.82, 0.59), 38.983050847, 1e-6);
  EXPECT_NEAR(RelativeImprovement(1.62, 1.39), 16.546762589, 1e-6);
  try {
    RelativeImprovement(1.0, 0.0);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateInput);
  }
}

TEST(Report, GridShapeGapsAndRecomputableAverage) {
  std::vector<ReportCell> cells;
  for (const char *sc : {"si-o", "sise-m"}) {
    for (const char *nz : {"babble", "nonbabble"}) {
      for (double snr : {-5.0, 0.0, 5.0}) {
        if (std::string(sc) == "si-o" && snr == 5.0) continue;  // left as a gap
        ReportCell c{sc, nz, snr, {}, 4};
        PpmcReport p;
        for (int k = 0; k < kNumTrackChannels; ++k) {
          p.values[k] = 0.05 * k + 0.01 * snr;
          p.defined[k] = true;
        }
        double s = 0.0;
        for (double v : p.values) s += v;
        p.avg_all = s / kNumTrackChannels;
        c.AddPpmc(p);
        cells.push_back(c);
      }
    }
  }
  const ReportTable t = BuildGrid({"si-o", "sise-m"}, {"babble", "nonbabble"}, {-5, 0, 5}, cells);
  EXPECT_EQ(t.rows.size(), 2u * 2u * 3u);
  EXPECT_EQ(t.gaps.size(), 2u);
  for (const ReportCell &row : t.rows) {
    if (!row.metrics.count("avg_all")) continue;
    double s = 0.0;
    for (auto name : kTrackChannelNames) s += row.metrics.at(std::string(name));
    EXPECT_NEAR(row.metrics.at("avg_all"), s / kNumTrackChannels, 1e-12);
  }
  const std::string csv = TableToCsv(t);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 12);
  EXPECT_NE(csv.find("avg_all"), std::string::npos);
  const nlohmann::json j = TableToJson(t);
  EXPECT_EQ(j.at("rows").size(), 12u);
  EXPECT_EQ(j.at("gaps").size(), 2u);
  EXPECT_THROW(BuildGrid({}, {"babble"}, {0}, cells), Error);
}

TEST(Figure, ThreeSpectrogramsAndOneTrajectory) {
  const std::string dir = MakeTempDir("sise-figure-test");
  FigureInput in;
  in.utterance_id = "toy0001";
  const ToyUtterance u = SynthesizeToyUtterance(1.0, 2);
  in.clean = u.wave;
  in.noisy = u.wave;
  for (size_t i = 0; i < in.noisy.size(); ++i) in.noisy.samples[i] += 0.01 * std::sin(0.3 * i);
  in.enhanced = u.wave;
  std::vector<double> ttcd(u.track.NumFrames());
  for (int t = 0; t < u.track.NumFrames(); ++t) ttcd[t] = u.track.channels(t, TrackChannelIndex("TTCD"));
  in.series = {{"ground truth", ttcd}, {"model", ttcd}};
  const FigureLayout layout = RenderFigure(in, dir + "/f.png");
  int spectrograms = 0, trajectories = 0;
  for (const FigurePanel &p : layout.panels) {
    spectrograms += p.kind == "spectrogram";
    trajectories += p.kind == "trajectory";
  }
  EXPECT_EQ(spectrograms, 3);
  EXPECT_EQ(trajectories, 1);
  EXPECT_EQ(layout.panels.back().title.find("TTCD") != std::string::npos, true);
  std::ifstream png(dir + "/f.png", std::ios::binary);
  char magic[8];
  png.read(magic, 8);
  EXPECT_EQ(std::string(magic + 1, 3), "PNG");
  fs::remove_all(dir);
}

}  // namespace
}  // namespace sise
