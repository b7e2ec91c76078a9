// src/toy-corpus.cc

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

#include "sise/toy-corpus.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "sise/augment.h"
#include "sise/wav-io.h"

namespace sise {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr size_t kControlSpacing = 800;  // 50 ms
constexpr double kOutputGain = 0.12;

// Reflected random walk on control points, Catmull-Rom interpolated per
// sample and clamped to [lo, hi].
std::vector<double> SmoothWalk(std::mt19937_64 &rng, size_t len, double lo, double hi,
                               double step, double start_lo, double start_hi) {
  const size_t n_ctrl = len / kControlSpacing + 4;
  std::vector<double> ctrl(n_ctrl);
  std::normal_distribution<double> gauss(0.0, step);
  ctrl[0] = std::uniform_real_distribution<double>(start_lo, start_hi)(rng);
  for (size_t i = 1; i < n_ctrl; ++i) {
    double v = ctrl[i - 1] + gauss(rng);
    if (v > hi) v = 2 * hi - v;
    if (v < lo) v = 2 * lo - v;
    ctrl[i] = std::clamp(v, lo, hi);
  }
  std::vector<double> out(len);
  for (size_t n = 0; n < len; ++n) {
    const size_t seg = n / kControlSpacing + 1;
    const double u = static_cast<double>(n % kControlSpacing) / kControlSpacing;
    const double p0 = ctrl[seg - 1], p1 = ctrl[seg], p2 = ctrl[seg + 1], p3 = ctrl[seg + 2];
    const double u2 = u * u, u3 = u2 * u;
    const double v = 0.5 * (2 * p1 + (-p0 + p2) * u + (2 * p0 - 5 * p1 + 4 * p2 - p3) * u2 +
                            (-p0 + 3 * p1 - 3 * p2 + p3) * u3);
    out[n] = std::clamp(v, lo, hi);
  }
  return out;
}

// Band-pass biquad (constant 0 dB peak gain) with per-block coefficient
// updates so the centre frequency can glide.
class Resonator {
 public:
  double Process(double x, double fc, double bw, bool update) {
    if (update) {
      const double w0 = 2 * kPi * fc / kSampleRate;
      const double q = fc / bw;
      const double alpha = std::sin(w0) / (2 * q);
      const double a0 = 1 + alpha;
      b0_ = alpha / a0;
      b2_ = -alpha / a0;
      a1_ = -2 * std::cos(w0) / a0;
      a2_ = (1 - alpha) / a0;
    }
    const double y = b0_ * x + b2_ * x2_ - a1_ * y1_ - a2_ * y2_;
    x2_ = x1_;
    x1_ = x;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double b0_ = 0, b2_ = 0, a1_ = 0, a2_ = 0;
  double x1_ = 0, x2_ = 0, y1_ = 0, y2_ = 0;
};

}  // namespace

const std::array<std::pair<double, double>, kNumTrackChannels> &ToyChannelRanges() {
  static const std::array<std::pair<double, double>, kNumTrackChannels> ranges = {{
      {4.0, 14.0},    // LA
      {4.0, 10.0},    // LP
      {60.0, 100.0},  // TBCL
      {-1.0, 10.0},   // TBCD
      {20.0, 40.0},   // TTCL
      {1.0, 10.0},    // TTCD
      {0.1, 0.9},     // VEL
      {0.0, 1.0},     // Per
      {0.0, 1.0},     // Aper
      {80.0, 300.0},  // F0
  }};
  return ranges;
}

ArticulatoryTrack TrackFromLatents(const ToyLatents &z) {
  const size_t len = z.f0.size();
  const long frames = std::lround(static_cast<double>(len) / kSamplesPerTrackFrame);
  ArticulatoryTrack track;
  track.channels.resize(frames, kNumTrackChannels);
  for (long i = 0; i < frames; ++i) {
    const size_t n = std::min(len - 1, static_cast<size_t>((i + 0.5) * kSamplesPerTrackFrame));
    const double f1 = (z.formant1[n] - 300.0) / 600.0;
    const double f2 = (z.formant2[n] - 900.0) / 1500.0;
    const double a = (z.amplitude[n] - 0.15) / 0.85;
    const double v = z.voicing[n];
    auto row = track.channels.row(i);
    row(0) = 4.0 + 10.0 * f1;
    row(1) = 8.0 - 4.0 * f2 + 2.0 * a;
    row(2) = 60.0 + 40.0 * f2;
    row(3) = 2.0 + 8.0 * f1 - 3.0 * f2;
    row(4) = 20.0 + 15.0 * f2 + 5.0 * f1;
    row(5) = 1.0 + 6.0 * a + 3.0 * f1;
    row(6) = 0.1 + 0.8 * z.nasal[n];
    row(7) = v * a;
    row(8) = (1.0 - v) * a;
    row(9) = z.f0[n];
  }
  return track;
}

ToyUtterance SynthesizeToyUtterance(double duration_s, uint64_t seed) {
  Require(duration_s > 0.0, ErrorKind::kInvalidInput, "duration must be positive");
  const size_t len = static_cast<size_t>(std::lround(duration_s * kSampleRate));
  std::mt19937_64 rng(seed);
  ToyUtterance u;
  ToyLatents &z = u.latents;
  z.f0 = SmoothWalk(rng, len, 80.0, 300.0, 12.0, 100.0, 250.0);
  z.formant1 = SmoothWalk(rng, len, 300.0, 900.0, 70.0, 300.0, 900.0);
  z.formant2 = SmoothWalk(rng, len, 900.0, 2400.0, 150.0, 900.0, 2400.0);
  z.amplitude = SmoothWalk(rng, len, 0.35, 1.0, 0.12, 0.5, 1.0);
  z.voicing = SmoothWalk(rng, len, 0.0, 1.0, 0.2, 0.0, 1.0);
  z.nasal = SmoothWalk(rng, len, 0.0, 1.0, 0.15, 0.0, 1.0);

  std::normal_distribution<double> gauss(0.0, 1.0);
  Resonator r1, r2, rn, rn2, rh;
  std::vector<double> out(len);
  double phase = 0.0;
  for (size_t n = 0; n < len; ++n) {
    phase += 2 * kPi * z.f0[n] / kSampleRate;
    if (phase > 2 * kPi) phase -= 2 * kPi;
    // sum_h sin(h phase) / sqrt(h) up to 5 kHz via the Chebyshev recurrence
    const int harmonics = std::max(1, static_cast<int>(5000.0 / z.f0[n]));
    const double c2 = 2 * std::cos(phase);
    double s_prev = 0.0, s = std::sin(phase), harm = 0.0;
    for (int h = 1; h <= harmonics; ++h) {
      harm += s / std::sqrt(static_cast<double>(h));
      const double s_next = c2 * s - s_prev;
      s_prev = s;
      s = s_next;
    }
    const double noise = gauss(rng);
    const bool update = (n % 16) == 0;
    // Aspiration keeps the tract resonances audible in unvoiced stretches.
    const double ev = z.voicing[n] * harm * 0.5 + (1.0 - z.voicing[n]) * 0.3 * noise;
    const double voiced = r1.Process(ev, z.formant1[n], 160.0, update) +
                          r2.Process(ev, z.formant2[n], 220.0, update) +
                          z.nasal[n] * (1.5 * rn.Process(ev, 250.0, 150.0, update) +
                                        2.0 * rn2.Process(ev, 3000.0, 400.0, update));
    const double unvoiced = 0.6 * rh.Process((1.0 - z.voicing[n]) * noise, 4500.0, 2500.0, update);
    out[n] = kOutputGain * z.amplitude[n] * (voiced + unvoiced);
  }
  u.wave = Waveform(std::move(out));
  u.track = TrackFromLatents(z);
  return u;
}

Waveform SynthesizeToyNoise(double duration_s, uint64_t seed) {
  const size_t len = static_cast<size_t>(std::lround(duration_s * kSampleRate));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double lowpass = 0.3 + 0.5 * unif(rng);  // one-pole coefficient
  const double band_fc = 500.0 + 3000.0 * unif(rng);
  const double band_mix = 0.4 * unif(rng);
  const double am_rate = 0.5 + 1.5 * unif(rng);
  const double am_depth = 0.3 * unif(rng);
  const double am_phase = 2 * kPi * unif(rng);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Resonator band;
  double lp = 0.0;
  std::vector<double> out(len);
  for (size_t n = 0; n < len; ++n) {
    const double w = gauss(rng);
    lp = lowpass * lp + (1.0 - lowpass) * w;
    const double b = band.Process(w, band_fc, band_fc, n == 0);
    const double am = 1.0 + am_depth * std::sin(2 * kPi * am_rate * n / kSampleRate + am_phase);
    out[n] = 0.05 * am * ((1.0 - band_mix) * lp * 2.0 + band_mix * b);
  }
  return Waveform(std::move(out));
}

CorpusManifest GenerateToyCorpus(const ToyCorpusOptions &options, const std::string &root,
                                 ToyCorpusPaths *paths) {
  Require(options.num_utterances >= 10, ErrorKind::kInvalidInput,
          "toy corpus needs at least 10 utterances");
  const fs::path base(root);
  fs::create_directories(base / "clean");
  fs::create_directories(base / "tracks");

  const int n = options.num_utterances;
  const int n_test = std::max(1, static_cast<int>(std::lround(n * options.test_fraction)));
  const int n_dev = std::max(1, static_cast<int>(std::lround(n * options.dev_fraction)));
  const int n_train = n - n_test - n_dev;
  Require(n_train >= 1, ErrorKind::kInvalidInput, "split fractions leave no training data");

  CorpusManifest manifest;
  manifest.root = root;
  manifest.metadata.seed = options.seed;
  manifest.metadata.description = "synthetic toy articulatory corpus";
  for (int i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "toy%04d", i);
    const ToyUtterance u =
        SynthesizeToyUtterance(options.duration_s, DeriveSeed(options.seed, std::string("utt|") + id));
    const std::string wav_rel = std::string("clean/") + id + ".wav";
    const std::string track_rel = std::string("tracks/") + id + options.track_extension;
    WriteWav((base / wav_rel).string(), u.wave);
    WriteTrack((base / track_rel).string(), u.track);
    ManifestEntry e;
    e.utterance_id = id;
    e.split = i < n_train ? Split::kTrain : (i < n_train + n_dev ? Split::kDev : Split::kTest);
    e.clean_path = wav_rel;
    e.track_path = track_rel;
    e.duration_s = u.wave.DurationSeconds();
    manifest.entries.push_back(std::move(e));
  }
  const std::string manifest_path = (base / "manifest.jsonl").string();
  WriteManifest(manifest_path, manifest);

  ToyCorpusPaths p;
  p.manifest = manifest_path;
  if (options.write_noise_pools) {
    auto write_pool = [&](const std::string &name, int count, bool babble) {
      const fs::path dir = base / "noise" / name;
      fs::create_directories(dir);
      const fs::path list = base / "noise" / (name + ".list");
      std::ofstream out(list, std::ios::trunc);
      for (int i = 0; i < count; ++i) {
        const std::string tag = name + "|" + std::to_string(i);
        const Waveform w =
            babble ? SynthesizeToyUtterance(options.noise_duration_s,
                                            DeriveSeed(options.seed, "talker|" + tag)).wave
                   : SynthesizeToyNoise(options.noise_duration_s, DeriveSeed(options.seed, "noise|" + tag));
        const std::string file = name + "_" + std::to_string(i) + ".wav";
        WriteWav((dir / file).string(), w);
        out << name << "/" << file << "\n";
      }
      return list.string();
    };
    p.train_babble_list = write_pool("train_babble", options.babble_pool_size, true);
    p.test_babble_list = write_pool("test_babble", options.babble_pool_size, true);
    p.train_nonbabble_list = write_pool("train_nonbabble", options.nonbabble_pool_size, false);
    p.test_nonbabble_list = write_pool("test_nonbabble", options.nonbabble_pool_size, false);
  }
  if (paths) *paths = p;
  return manifest;
}

}  // namespace sise
