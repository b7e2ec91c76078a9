// tests/acceptance.cc

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

// Acceptance run: prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.
//
//   acceptance [--only N[,M...]] [--work DIR] [--keep]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "oracles.h"
#include "sise/augment.h"
#include "sise/checkpoint.h"
#include "sise/digest.h"
#include "sise/evaluate.h"
#include "sise/losses.h"
#include "sise/process.h"
#include "sise/report.h"
#include "sise/signal.h"
#include "sise/stoi.h"
#include "sise/toy-corpus.h"
#include "sise/trainer.h"
#include "sise/wav-io.h"

namespace fs = std::filesystem;
using namespace sise;

namespace {

const std::string kData = SISE_TEST_DATA_DIR;

using Clock = std::chrono::steady_clock;
double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void Check(bool ok, const std::string &what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string Fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---- 1: DSP kernel -------------------------------------------------------

void DspKernel(Outcome &o) {
  const auto start = Clock::now();
  double worst = 0.0;
  for (uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> x(16000 + 101 * seed);
    for (double &v : x) v = u(rng);
    const Waveform y = Istft(Stft(x, SpectrogramGeometry::Canonical()), static_cast<long>(x.size()));
    for (size_t i = 400; i + 400 < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y.samples[i]));
  }
  Matrix m(200, 201);
  std::mt19937_64 rng(1);
  for (long i = 0; i < m.size(); ++i) m.data()[i] = std::pow(10.0, std::uniform_real_distribution<double>(-8, 6)(rng));
  m(0, 0) = 0.0;
  m(0, 1) = 1e6;
  const Matrix back = Decompress(Compress(m));
  double rel = 0.0;
  for (long i = 0; i < m.size(); ++i)
    if (m.data()[i] > 0) rel = std::max(rel, std::abs(back.data()[i] - m.data()[i]) / m.data()[i]);
  const double elapsed = Seconds(start);
  o.detail << "round-trip max interior error " << worst << ", compress inverse max rel error " << rel
           << ", " << Fmt(elapsed, 2) << " s";
  o.Check(worst < 1e-6, "round trip");
  o.Check(rel <= 1e-6 && back(0, 0) == 0.0, "compress inverse");
  o.Check(elapsed < 10.0, "runtime");
}

// ---- 2: mixing precision ---------------------------------------------------

void MixingPrecision(Outcome &o) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> snr(-5.0, 10.0);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const Waveform clean(oracle::RandomSignal(1000 + i, 4000));
    Waveform noise(oracle::RandomSignal(5000 + i, 6000));
    const double gain = std::uniform_real_distribution<double>(0.1, 10.0)(rng);
    for (double &v : noise.samples) v *= gain;
    const double target = snr(rng);
    const MixResult mix = MixAtSnr(clean, noise, target, i);
    worst = std::max(worst, std::abs(RemeasureSnr(clean, mix.mixture, mix.peak_gain) - target));
  }
  std::vector<Waveform> pool;
  for (int i = 0; i < 20; ++i) pool.push_back(SynthesizeToyUtterance(0.05, 300 + i).wave);
  int lo = 100, hi = 0;
  for (uint64_t seed = 0; seed < 1000; ++seed) {
    int k = 0;
    SynthBabble(pool, 400, seed, &k);
    lo = std::min(lo, k);
    hi = std::max(hi, k);
  }
  bool refused = false;
  try {
    CheckPoolsDisjoint(std::vector<std::string>{"/n/a.wav", "/n/shared.wav"},
                       std::vector<std::string>{"/n/shared.wav", "/n/b.wav"});
  } catch (const Error &e) {
    refused = e.kind() == ErrorKind::kContaminatedEvaluation;
  }
  o.detail << "500 mixes max |remeasured - target| " << Fmt(worst, 6) << " dB, talkers in [" << lo << ", "
           << hi << "], shared pool file " << (refused ? "refused" : "accepted");
  o.Check(worst <= 0.05, "SNR precision");
  o.Check(lo >= 5 && hi <= 20, "talker count");
  o.Check(refused, "pool disjointness");
}

// ---- 3: loss oracles -------------------------------------------------------

void LossOracles(Outcome &o) {
  const LossConfig cfg;
  double worst[4] = {0, 0, 0, 0};
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (uint64_t s = 0; s < 100; ++s) {
    const size_t n = 1100 + 17 * s;
    const std::vector<double> clean = oracle::RandomSignal(3 * s + 1, n);
    const std::vector<double> noise = oracle::RandomSignal(3 * s + 2, n);
    const std::vector<double> err = oracle::RandomSignal(3 * s + 3, n);
    std::vector<double> mix(n), enh(n);
    for (size_t i = 0; i < n; ++i) {
      mix[i] = clean[i] + noise[i];
      enh[i] = clean[i] + 0.4 * err[i];
    }
    worst[0] = std::max(worst[0], std::abs(WsdrLoss(mix, clean, enh) - oracle::Wsdr(mix, clean, enh)));
    worst[1] = std::max(worst[1], std::abs(CmsLoss(clean, enh, cfg.geometry) - oracle::Cms(clean, enh)));
    worst[2] = std::max(worst[2], std::abs(MrsLoss(clean, enh, cfg) - oracle::Mrs(clean, enh)));
    const int rows = 10 + static_cast<int>(s % 40), cols = s % 2 ? 6 : 4;
    Matrix pred(rows, cols), target(rows, cols);
    std::vector<std::vector<double>> pr(rows, std::vector<double>(cols)), tr(rows, std::vector<double>(cols));
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        tr[r][c] = target(r, c) = g(rng);
        pr[r][c] = pred(r, c) = 0.5 * target(r, c) + g(rng);
      }
    worst[3] = std::max(worst[3], std::abs(SiTaskLoss(pred, target, cfg).loss - oracle::SiTask(pr, tr, 0.2)));
  }
  const std::vector<double> clean = oracle::RandomSignal(91, 2000), noise = oracle::RandomSignal(92, 2000);
  std::vector<double> mix(2000);
  for (size_t i = 0; i < mix.size(); ++i) mix[i] = clean[i] + noise[i];
  Matrix t(40, 6);
  for (long i = 0; i < t.size(); ++i) t.data()[i] = std::sin(0.11 * i * i);
  const double perfect[4] = {WsdrLoss(mix, clean, clean), CmsLoss(clean, clean, cfg.geometry),
                             MrsLoss(clean, clean, cfg), SiTaskLoss(t, t, cfg).loss};
  // Linearity: a pure offset keeps PC at 1; doubling it doubles RMSE.
  Matrix off = Matrix::Ones(40, 6);
  const SiTaskResult a = SiTaskLoss(t + 0.25 * off, t, cfg), b = SiTaskLoss(t + 0.5 * off, t, cfg);
  const bool linear = a.pc_mean == b.pc_mean && b.rmse_mean == 2 * a.rmse_mean &&
                      b.loss - a.loss == 0.2 * a.rmse_mean;
  o.detail << "max |lib - oracle| wsdr " << worst[0] << ", cms " << worst[1] << ", mrs " << worst[2]
           << ", si_task " << worst[3] << "; perfect = " << perfect[0] << " / " << perfect[1] << " / "
           << perfect[2] << " / " << perfect[3] << "; 0.2*RMSE linearity " << (linear ? "exact" : "broken");
  for (double w : worst) o.Check(w <= 1e-6, "oracle agreement");
  o.Check(perfect[0] == -1.0 && perfect[1] == 0.0 && perfect[2] == 0.0 && perfect[3] == 0.0, "perfect cases");
  o.Check(linear, "linearity");
}

// ---- 4: gradient checks ----------------------------------------------------

void GradientChecks(Outcome &o) {
  ModelConfig cfg;
  cfg.se_hidden = 6;
  cfg.si_hidden = 5;
  cfg.se_layers = 2;
  cfg.si_layers = 2;
  cfg.toy.num_layers = 3;
  cfg.toy.dim = 8;
  cfg.seed = 4;
  SiseModel model(cfg);
  model.set_backbone_frozen(false);
  ModelBatch batch;
  for (int b = 0; b < 2; ++b) {
    const ToyUtterance u = SynthesizeToyUtterance(0.25, 70 + b);
    Waveform noisy = u.wave;
    const Waveform n = SynthesizeToyNoise(0.25, 80 + b);
    for (size_t i = 0; i < noisy.size(); ++i) noisy.samples[i] += 0.6 * n.samples[i];
    batch.input.push_back(noisy);
    batch.clean.push_back(u.wave);
    batch.targets.push_back(u.track.channels.topRows(NumFeatureFrames(noisy.size())));
  }
  model.set_normalizer(TrackNormalizer::Fit(batch.targets));
  const LossConfig lc;
  double worst = 0.0;
  int checked = 0;
  std::set<std::string> groups;
  for (const ForwardOptions heads : {ForwardOptions{true, false, false}, ForwardOptions{false, true, false}}) {
    ForwardOptions with_grad = heads;
    with_grad.backward = true;
    model.ZeroGrad();
    model.ForwardBackward(batch, with_grad, lc);
    std::mt19937_64 rng(heads.se ? 1 : 2);
    for (Parameter *p : model.TrainableParameters(heads)) {
      for (int s = 0; s < 2; ++s) {
        const long i = std::uniform_int_distribution<long>(0, p->size() - 1)(rng);
        const double v = p->value.data()[i], h = 1e-5;
        p->value.data()[i] = v + h;
        const double lp = model.ForwardBackward(batch, heads, lc).total;
        p->value.data()[i] = v - h;
        const double lm = model.ForwardBackward(batch, heads, lc).total;
        p->value.data()[i] = v;
        const double num = (lp - lm) / (2 * h), an = p->grad.data()[i];
        worst = std::max(worst, std::abs(num - an) / std::max({std::abs(num), std::abs(an), 1e-6}));
        ++checked;
        groups.insert(p->name.substr(0, p->name.find('.', p->name.find('.') + 1)));
      }
    }
  }
  o.detail << checked << " sampled entries over " << groups.size()
           << " parameter groups (both heads, toy backbone), max relative error " << worst;
  o.Check(worst <= 1e-3, "relative error");
  o.Check(groups.count("backbone.q1") && groups.count("se.out") && groups.count("si.a"), "coverage");
}

// ---- toy corpus shared by 5, 6, 8 ------------------------------------------

struct ToySetup {
  std::string root;
  std::string train_manifest;
  std::string test_manifest;
};

struct ToyRunSettings {
  int num_utterances = 64;
  double duration_s = 2.0;
  uint64_t seed = 11;
  double train_snr_lo = -5.0, train_snr_hi = 5.0;
  int hidden = 64;
  double stage1_lr = 2e-3;
  int stage1_epochs = 50;
  int stage2_epochs = 8;
  int batch = 8;
};

ToySetup BuildToy(const std::string &root, const ToyRunSettings &s) {
  ToySetup t;
  t.root = root;
  ToyCorpusOptions o;
  o.num_utterances = s.num_utterances;
  o.duration_s = s.duration_s;
  o.seed = s.seed;
  ToyCorpusPaths p;
  const CorpusManifest clean = GenerateToyCorpus(o, root + "/toy", &p);
  const SnrPolicy train_snr = SnrPolicy::Uniform(s.train_snr_lo, s.train_snr_hi);
  const NoiseSpec babble{NoiseKind::kBabble, ReadPoolList(p.train_babble_list), train_snr, 1};
  const NoiseSpec nonbabble{NoiseKind::kNonBabble, ReadPoolList(p.train_nonbabble_list), train_snr, 2};
  WriteManifest(root + "/train/manifest.jsonl", BuildTrainDev(clean, babble, nonbabble, {root + "/train", s.seed}));
  std::vector<std::string> train_pools = babble.source_pool;
  train_pools.insert(train_pools.end(), nonbabble.source_pool.begin(), nonbabble.source_pool.end());
  const NoiseSpec test_babble{NoiseKind::kBabble, ReadPoolList(p.test_babble_list), SnrPolicy::Fixed({0.0}), 3};
  const NoiseSpec test_nonbabble{NoiseKind::kNonBabble, ReadPoolList(p.test_nonbabble_list),
                                 SnrPolicy::Fixed({0.0}), 4};
  WriteManifest(root + "/test/manifest.jsonl",
                BuildTest(clean, test_babble, test_nonbabble, train_pools, {root + "/test", s.seed + 1}));
  t.train_manifest = root + "/train/manifest.jsonl";
  t.test_manifest = root + "/test/manifest.jsonl";
  return t;
}

TrainConfig ToyTrainConfig(const ToySetup &t, const ToyRunSettings &s, Scenario scenario,
                           const std::string &run_dir) {
  TrainConfig c;
  c.scenario = scenario;
  c.seed = s.seed;
  c.model.seed = s.seed;
  c.model.se_hidden = c.model.si_hidden = s.hidden;
  c.batch.batch_size = s.batch;
  c.manifest = t.train_manifest;
  c.run_dir = run_dir;
  c.max_epochs = s.stage1_epochs;
  c.stage1_lr = s.stage1_lr;
  return c;
}

// Both stages with their own epoch budgets (stage 2 is the expensive one).
TrainResult TrainToy(const ToySetup &t, const ToyRunSettings &s, Scenario scenario, const std::string &run_dir) {
  TrainConfig c1 = ToyTrainConfig(t, s, scenario, run_dir);
  c1.only_stage = 1;
  TrainResult r1 = TrainScenario(c1);
  TrainConfig c2 = c1;
  c2.only_stage = 2;
  c2.max_epochs = s.stage2_epochs;
  c2.stage1_checkpoint = run_dir + "/stage1.ckpt";
  TrainResult r2 = TrainScenario(c2);
  r2.records.insert(r2.records.begin(), r1.records.begin(), r1.records.end());
  return r2;
}

// ---- 5: TST contract -------------------------------------------------------

void TstContract(Outcome &o, const std::string &work) {
  EarlyStopper stopper(5);
  const std::vector<double> dev = {2.0, 1.5, 1.2, 1.3, 1.25, 1.21, 1.4, 1.22, 0.5};
  int stopped = 0;
  for (size_t i = 0; i < dev.size() && !stopped; ++i)
    if (stopper.Update(dev[i])) stopped = static_cast<int>(i) + 1;

  ToyRunSettings s;
  s.num_utterances = 12;
  s.duration_s = 0.5;
  s.hidden = 8;
  const ToySetup t = BuildToy(work + "/tst", s);
  TrainConfig c = ToyTrainConfig(t, s, Scenario::kSiseMultiTask, work + "/tst/run");
  c.max_epochs = 4;
  c.only_stage = 1;
  const SiseModel initial(c.model);
  const TrainResult r = TrainScenario(c);
  const bool frozen = r.model->ParameterDigest("backbone.") == initial.ParameterDigest("backbone.");
  const bool heads_moved = r.model->ParameterDigest("se.") != initial.ParameterDigest("se.");
  const RunRecord &rec = r.records.front();
  const bool restored = LoadCheckpoint(rec.best_checkpoint).ParameterDigest() == r.model->ParameterDigest();
  int argmin = 1;
  for (const EpochRecord &e : rec.epochs)
    if (e.dev_loss < rec.epochs[argmin - 1].dev_loss) argmin = e.epoch;

  TrainConfig c2 = c;
  c2.only_stage = 2;
  c2.max_epochs = 1;
  c2.stage1_checkpoint = c.run_dir + "/stage1.ckpt";
  c2.run_dir = work + "/tst/run2";
  const TrainResult r2 = TrainScenario(c2);
  const bool unfrozen = r2.model->ParameterDigest("backbone.") != initial.ParameterDigest("backbone.");

  o.detail << "stage-1 backbone digest " << (frozen ? "unchanged" : "CHANGED") << " (heads "
           << (heads_moved ? "updated" : "unchanged") << "), stage 2 backbone " << (unfrozen ? "updated" : "unchanged")
           << "; restored epoch " << rec.best_epoch << " = argmin dev epoch " << argmin << ", digest "
           << (restored ? "equal" : "DIFFERENT") << "; synthetic sequence stopped at epoch " << stopped
           << " (best " << stopper.best_epoch() << ")";
  o.Check(frozen && heads_moved, "stage-1 freeze");
  o.Check(unfrozen, "stage-2 unfreeze");
  o.Check(restored && rec.best_epoch == argmin, "restore best");
  o.Check(stopped == 8 && stopper.best_epoch() == 3, "patience 5");
}

// ---- 6 + 8: toy end-to-end and determinism ----------------------------------

struct EndToEnd {
  std::vector<ReportCell> cells;
  std::string run_dir;
};

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

EndToEnd ToyEndToEnd(Outcome &o, const std::string &work, const ToyRunSettings &s) {
  const auto start = Clock::now();
  const ToySetup t = BuildToy(work + "/e2e", s);
  const TrainResult mt = TrainToy(t, s, Scenario::kSiseMultiTask, work + "/e2e/sise-m");
  const TrainResult si = TrainToy(t, s, Scenario::kSiOnly, work + "/e2e/si-o");
  const CorpusManifest test = ReadManifest(t.test_manifest);
  EvaluationOptions eo;
  eo.scenario_label = "sise-m";
  const EvaluationResult em = EvaluateModel(*mt.model, test, eo);
  eo.scenario_label = "si-o";
  eo.score_se = false;
  const EvaluationResult es = EvaluateModel(*si.model, test, eo);
  const double elapsed = Seconds(start);

  auto avg_all = [](const EvaluationResult &r, const std::string &noise) {
    for (const ReportCell &c : r.cells)
      if (c.noise == noise && c.snr_db && c.metrics.count("avg_all")) return c.metrics.at("avg_all");
    return -1.0;
  };
  o.detail << "toy corpus " << s.num_utterances << " x " << s.duration_s << " s, 0 dB test;";
  // The targets apply to the stationary additive noise; babble is reported
  // alongside for reference.
  for (const std::string noise : {"nonbabble", "babble"}) {
    std::vector<double> gain;
    int better = 0, pairs = 0;
    for (const UtteranceScore &u : em.utterances) {
      if (u.noise != noise) continue;
      gain.push_back(u.output_snr_db - u.input_snr_db);
      better += u.stoi_enhanced > u.stoi_noisy;
      ++pairs;
    }
    const double ppmc_m = avg_all(em, noise), ppmc_o = avg_all(es, noise);
    const double med = Median(gain), frac = static_cast<double>(better) / pairs;
    o.detail << " " << noise << ": (a) PPMC " << Fmt(ppmc_m, 3) << ", (b) median SNR gain " << Fmt(med, 2)
             << " dB, (c) STOI improved " << better << "/" << pairs << ", (d) SI-O PPMC " << Fmt(ppmc_o, 3) << ";";
    if (noise != "nonbabble") continue;
    o.Check(ppmc_m >= 0.80, "(a)");
    o.Check(med >= 5.0, "(b)");
    o.Check(frac >= 0.90, "(c)");
    o.Check(ppmc_m >= ppmc_o, "(d)");
  }
  o.detail << " " << Fmt(elapsed / 60.0, 1) << " min";
  o.Check(elapsed <= 15 * 60.0, "15 min budget");
  EndToEnd e;
  e.cells = em.cells;
  e.cells.insert(e.cells.end(), es.cells.begin(), es.cells.end());
  e.run_dir = work + "/e2e/sise-m";
  return e;
}

// Reruns corpus generation and SISE-M training with the same paths, so the
// two configurations are identical, after moving the first run aside.
void Determinism(Outcome &o, const std::string &work, const ToyRunSettings &s, const std::string &run) {
  const std::string first_run = run + "-first";
  fs::rename(run, first_run);
  const ToySetup t = BuildToy(work + "/e2e", s);
  TrainToy(t, s, Scenario::kSiseMultiTask, run);
  int compared = 0, equal = 0;
  for (const char *f : {"metrics.jsonl", "stage1.ckpt", "stage2.ckpt", "best-stage1.ckpt", "best-stage2.ckpt"}) {
    if (!fs::exists(first_run + "/" + f) && !fs::exists(run + "/" + f)) continue;
    ++compared;
    const bool same = fs::exists(run + "/" + f) && fs::exists(first_run + "/" + f) &&
                      Sha256File(run + "/" + f) == Sha256File(first_run + "/" + f);
    equal += same;
    if (!same) o.detail << " " << f << " differs;";
  }
  o.detail << " " << equal << "/" << compared << " artifacts bitwise identical across two SISE-M runs";
  o.Check(compared >= 3 && equal == compared, "bitwise identity");
}

// ---- 7: report arithmetic ----------------------------------------------------

void ReportArithmetic(Outcome &o, const std::vector<ReportCell> &emitted) {
  std::ifstream in(kData + "/published-values.json");
  const nlohmann::json d = nlohmann::json::parse(in);
  std::vector<ReportCell> cells;
  for (const auto &row : d.at("ppmc")) {
    ReportCell c{row.at("scenario"), row.at("noise"), row.at("snr_db").get<double>(), {}, 0};
    c.metrics["avg_all"] = row.at("avg_all");
    cells.push_back(c);
  }
  for (const auto &row : d.at("quality")) {
    auto same = [&](const ReportCell &c) {
      return c.scenario == row.at("scenario") && c.noise == row.at("noise") &&
             *c.snr_db == row.at("snr_db");
    };
    auto it = std::find_if(cells.begin(), cells.end(), same);
    if (it == cells.end()) {
      cells.push_back({row.at("scenario"), row.at("noise"), row.at("snr_db").get<double>(), {}, 0});
      it = std::prev(cells.end());
    }
    it->metrics["pesq"] = row.at("pesq");
  }
  const auto &claim = d.at("claimed_percent");
  double babble = 0, nonbabble = 0;
  for (const ImprovementRow &r : RelativeImprovements(cells, "sise-m", "si-o", "avg_all"))
    (r.noise == "babble" ? babble : nonbabble) = r.percent;
  const double ppmc_noise = NoiseImprovement(cells, "sise-m", -5, "nonbabble", "babble", "avg_all").percent;
  const double pesq_noise = NoiseImprovement(cells, "sise-m", -5, "nonbabble", "babble", "pesq").percent;
  const double got[4] = {babble, nonbabble, ppmc_noise, pesq_noise};
  const double want[4] = {claim.at("sise_m_vs_si_o_babble"), claim.at("sise_m_vs_si_o_nonbabble"),
                          claim.at("nonbabble_vs_babble_ppmc"), claim.at("nonbabble_vs_babble_pesq")};
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(got[i] - want[i]));

  const ReportTable table = BuildGrid({"sise-m", "si-o"}, {"babble", "nonbabble"}, {0.0}, emitted);
  double avg_err = 0.0;
  int rows = 0;
  for (const ReportCell &c : table.rows) {
    if (!c.metrics.count("avg_all")) continue;
    double sum = 0.0;
    int n = 0;
    for (auto name : kTrackChannelNames) {
      if (!c.metrics.count(std::string(name))) continue;
      sum += c.metrics.at(std::string(name));
      ++n;
    }
    avg_err = std::max(avg_err, std::abs(c.metrics.at("avg_all") - sum / n));
    ++rows;
  }
  o.detail << "relative improvements " << Fmt(got[0], 2) << "% / " << Fmt(got[1], 2) << "% / " << Fmt(got[2], 2)
           << "% / " << Fmt(got[3], 2) << "% (max deviation " << Fmt(worst, 4) << " pp); avg_all recomputation over "
           << rows << " emitted rows max error " << avg_err;
  o.Check(worst <= 0.01, "published percentages");
  o.Check(rows > 0 && avg_err <= 1e-12, "avg_all column");
}

// ---- 9: STOI ----------------------------------------------------------------

void StoiCrossCheck(Outcome &o) {
  std::ifstream in(kData + "/stoi/reference.csv");
  std::string line;
  std::getline(in, line);
  double worst = 0.0;
  int pairs = 0;
  while (std::getline(in, line)) {
    const std::string name = line.substr(0, line.find(','));
    const double ref = std::stod(line.substr(line.rfind(',') + 1));
    const double got = Stoi(ReadWav(kData + "/stoi/" + name + "-clean.wav"),
                            ReadWav(kData + "/stoi/" + name + "-degraded.wav"));
    worst = std::max(worst, std::abs(got - ref));
    ++pairs;
  }
  bool monotone = true;
  for (uint64_t seed : {1, 2, 3, 4}) {
    const Waveform clean = SynthesizeToyUtterance(2.0, 900 + seed).wave;
    const std::vector<double> noise = oracle::RandomSignal(seed, clean.size());
    double prev = -1.0;
    for (double snr : {-10.0, -5.0, 0.0, 5.0, 10.0}) {
      const double g = std::sqrt(Energy(clean.samples) / Energy(noise) / std::pow(10.0, snr / 10.0));
      Waveform noisy = clean;
      for (size_t i = 0; i < noisy.size(); ++i) noisy.samples[i] += g * noise[i];
      const double v = Stoi(clean, noisy);
      monotone &= v >= prev;
      prev = v;
    }
  }
  o.detail << pairs << " reference pairs, max |native - reference| " << Fmt(worst, 6) << "; 5-point SNR ladder "
           << (monotone ? "monotone" : "NOT monotone");
  o.Check(pairs == 20 && worst <= 0.01, "reference agreement");
  o.Check(monotone, "monotonicity");
}

}  // namespace

int main(int argc, char **argv) {
  std::set<int> only;
  std::string work;
  bool keep = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string n; std::getline(ss, n, ',');) only.insert(std::stoi(n));
    } else if (a == "--work" && i + 1 < argc) {
      work = argv[++i];
    } else if (a == "--keep") {
      keep = true;
    } else {
      std::fprintf(stderr, "usage: acceptance [--only N[,M...]] [--work DIR] [--keep]\n");
      return 2;
    }
  }
  if (work.empty()) work = MakeTempDir("sise-acceptance");
  fs::create_directories(work);
  auto wanted = [&](int n) { return only.empty() || only.count(n); };

  const ToyRunSettings toy;
  EndToEnd e2e;
  int failures = 0;
  auto run = [&](int n, const char *name, const std::function<void(Outcome &)> &body) {
    if (!wanted(n)) return;
    Outcome o;
    try {
      body(o);
    } catch (const std::exception &ex) {
      o.pass = false;
      o.detail << " [exception: " << ex.what() << "]";
    }
    failures += !o.pass;
    std::printf("criterion %d (%s): %s: %s\n", n, name, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
    std::fflush(stdout);
  };

  run(1, "DSP kernel", DspKernel);
  run(2, "mixing precision", MixingPrecision);
  run(3, "loss oracles", LossOracles);
  run(4, "gradient checks", GradientChecks);
  run(5, "two-stage training contract", [&](Outcome &o) { TstContract(o, work); });
  if (wanted(6) || wanted(7) || wanted(8)) {
    run(6, "toy end-to-end", [&](Outcome &o) { e2e = ToyEndToEnd(o, work, toy); });
  }
  run(7, "report arithmetic", [&](Outcome &o) { ReportArithmetic(o, e2e.cells); });
  run(8, "determinism", [&](Outcome &o) {
    if (e2e.run_dir.empty()) throw Error(ErrorKind::kInvalidState, "needs the end-to-end run");
    Determinism(o, work, toy, e2e.run_dir);
  });
  run(9, "STOI cross-check", StoiCrossCheck);

  if (!keep) fs::remove_all(work);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
