// src/augment.cc

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

#include "sise/augment.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "sise/wav-io.h"

namespace sise {

namespace fs = std::filesystem;

void SnrPolicy::Validate() const {
  if (kind == Kind::kUniformRange)
    Require(lo <= hi, ErrorKind::kInvalidInput, "snr range needs lo <= hi");
  else
    Require(!levels.empty(), ErrorKind::kInvalidInput, "fixed snr level list is empty");
}

double SnrPolicy::Sample(std::mt19937_64 &rng) const {
  if (kind == Kind::kUniformRange) return std::uniform_real_distribution<double>(lo, hi)(rng);
  return levels[std::uniform_int_distribution<size_t>(0, levels.size() - 1)(rng)];
}

uint64_t DeriveSeed(uint64_t base, std::string_view tag) {
  uint64_t h = 1469598103934665603ULL ^ base;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  h += 0x9E3779B97F4A7C15ULL;
  h = (h ^ (h >> 30)) * 0xBF58476D1CE4E5B9ULL;
  h = (h ^ (h >> 27)) * 0x94D049BB133111EBULL;
  return h ^ (h >> 31);
}

Waveform SynthBabble(std::span<const Waveform> pool, size_t target_len, uint64_t seed,
                     int *talker_count) {
  Require(pool.size() >= static_cast<size_t>(kMaxBabbleTalkers), ErrorKind::kInsufficientPool,
          "babble pool needs at least 20 utterances, got " + std::to_string(pool.size()));
  Require(target_len > 0, ErrorKind::kInvalidInput, "babble target length must be > 0");
  std::mt19937_64 rng(seed);
  const int k = std::uniform_int_distribution<int>(kMinBabbleTalkers, kMaxBabbleTalkers)(rng);
  std::vector<size_t> order(pool.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int i = 0; i < k; ++i) {
    const size_t j = std::uniform_int_distribution<size_t>(i, order.size() - 1)(rng);
    std::swap(order[i], order[j]);
  }
  std::vector<double> sum(target_len, 0.0);
  for (int i = 0; i < k; ++i) {
    const Waveform &talker = pool[order[i]];
    Require(!talker.empty(), ErrorKind::kDegenerateInput, "empty babble talker");
    const size_t n = talker.size();
    const size_t offset = std::uniform_int_distribution<size_t>(0, n - 1)(rng);
    std::vector<double> seg(target_len);
    for (size_t t = 0; t < target_len; ++t) seg[t] = talker.samples[(offset + t) % n];
    const double rms = Rms(seg);
    Require(rms > 0.0, ErrorKind::kDegenerateInput, "silent babble talker segment");
    for (size_t t = 0; t < target_len; ++t) sum[t] += seg[t] / rms;
  }
  const double rms = Rms(sum);
  Require(rms > 0.0, ErrorKind::kDegenerateInput, "babble sum is silent");
  for (double &v : sum) v /= rms;
  if (talker_count) *talker_count = k;
  return Waveform(std::move(sum));
}

Waveform FitNoiseLength(const Waveform &noise, size_t len, std::mt19937_64 &rng) {
  Require(!noise.empty(), ErrorKind::kDegenerateInput, "empty noise signal");
  std::vector<double> src = noise.samples;
  if (src.size() < len) {
    size_t fade = static_cast<size_t>(kCrossfadeSeconds * kSampleRate);
    fade = std::min(fade, src.size() / 4);
    std::vector<double> tiled = src;
    while (tiled.size() < len) {
      const size_t base = tiled.size() - fade;
      for (size_t i = 0; i < fade; ++i) {
        const double a = (i + 1.0) / (fade + 1.0);
        tiled[base + i] = (1.0 - a) * tiled[base + i] + a * src[i];
      }
      tiled.insert(tiled.end(), src.begin() + static_cast<long>(fade), src.end());
    }
    src.swap(tiled);
  }
  const size_t offset = std::uniform_int_distribution<size_t>(0, src.size() - len)(rng);
  return Waveform(std::vector<double>(src.begin() + static_cast<long>(offset),
                                      src.begin() + static_cast<long>(offset + len)));
}

MixResult MixAtSnr(const Waveform &clean, const Waveform &noise, double target_snr_db,
                   uint64_t seed) {
  Require(!clean.empty(), ErrorKind::kDegenerateInput, "empty clean signal");
  const double clean_energy = Energy(clean.samples);
  Require(clean_energy > 0.0, ErrorKind::kDegenerateInput, "clean signal has zero energy");
  std::mt19937_64 rng(seed);
  const Waveform fitted = FitNoiseLength(noise, clean.size(), rng);
  const double noise_energy = Energy(fitted.samples);
  Require(noise_energy > 0.0, ErrorKind::kDegenerateInput, "noise has zero energy");

  MixResult r;
  r.applied_scale = std::sqrt(clean_energy / (noise_energy * std::pow(10.0, target_snr_db / 10.0)));
  std::vector<double> mix(clean.size());
  double peak = 0.0;
  for (size_t i = 0; i < mix.size(); ++i) {
    mix[i] = clean.samples[i] + r.applied_scale * fitted.samples[i];
    peak = std::max(peak, std::abs(mix[i]));
  }
  if (peak > 1.0) {
    r.peak_gain = 1.0 / peak;
    for (double &v : mix) v *= r.peak_gain;
  }
  r.mixture = Waveform(std::move(mix));
  return r;
}

Waveform CombineNoises(const Waveform &babble, const Waveform &nonbabble) {
  Require(babble.size() == nonbabble.size(), ErrorKind::kInvalidInput,
          "combined noise components must have equal length");
  const double rb = Rms(babble.samples);
  const double rn = Rms(nonbabble.samples);
  Require(rb > 0.0 && rn > 0.0, ErrorKind::kDegenerateInput, "silent noise component");
  std::vector<double> out(babble.size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = babble.samples[i] / rb + nonbabble.samples[i] / rn;
  return Waveform(std::move(out));
}

double RemeasureSnr(const Waveform &clean, const Waveform &noisy, double mix_gain) {
  Require(clean.size() == noisy.size(), ErrorKind::kInvalidInput, "length mismatch");
  std::vector<double> scaled(clean.size()), residual(clean.size());
  for (size_t i = 0; i < clean.size(); ++i) {
    scaled[i] = mix_gain * clean.samples[i];
    residual[i] = noisy.samples[i] - scaled[i];
  }
  return MeasureSnr(scaled, residual);
}

std::vector<std::string> ReadPoolList(const std::string &path) {
  std::ifstream in(path);
  Require(static_cast<bool>(in), ErrorKind::kInsufficientPool, "cannot open pool list " + path);
  const fs::path dir = fs::path(path).parent_path();
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    fs::path p(line);
    out.push_back(p.is_absolute() ? p.string() : (dir / p).string());
  }
  return out;
}

void CheckPoolsDisjoint(std::span<const std::string> test_pool,
                        std::span<const std::string> train_pool) {
  std::set<std::string> train;
  for (const std::string &p : train_pool) train.insert(fs::weakly_canonical(p).string());
  for (const std::string &p : test_pool) {
    const std::string c = fs::weakly_canonical(p).string();
    Require(!train.count(c), ErrorKind::kContaminatedEvaluation,
            "test noise file also used for training: " + c);
  }
}

namespace {

std::vector<Waveform> LoadPool(const NoiseSpec &spec, size_t min_size) {
  Require(spec.source_pool.size() >= min_size, ErrorKind::kInsufficientPool,
          NoiseKindName(spec.kind) + " pool has " + std::to_string(spec.source_pool.size()) +
              " files, need at least " + std::to_string(min_size));
  std::set<std::string> distinct(spec.source_pool.begin(), spec.source_pool.end());
  Require(distinct.size() >= min_size, ErrorKind::kInsufficientPool,
          NoiseKindName(spec.kind) + " pool has too few distinct files");
  std::vector<Waveform> pool;
  pool.reserve(spec.source_pool.size());
  for (const std::string &path : spec.source_pool) {
    Require(fs::exists(path), ErrorKind::kInsufficientPool, "missing pool file " + path);
    pool.push_back(ReadWavAt16k(path));
  }
  return pool;
}

class VariantWriter {
 public:
  VariantWriter(const CorpusManifest &clean, const NoiseSpec &babble, const NoiseSpec &nonbabble,
                const AugmentOptions &options)
      : clean_(clean), babble_(babble), nonbabble_(nonbabble), options_(options),
        babble_pool_(LoadPool(babble, kMaxBabbleTalkers)),
        nonbabble_pool_(LoadPool(nonbabble, 1)) {
    Require(!options.output_root.empty(), ErrorKind::kInvalidInput, "output root is empty");
    fs::create_directories(options.output_root);
  }

  std::string Relative(const std::string &resolved) const {
    return fs::proximate(fs::absolute(resolved), fs::absolute(options_.output_root)).string();
  }

  ManifestEntry CleanCopy(const ManifestEntry &e) const {
    ManifestEntry c = e;
    c.clean_path = Relative(clean_.Resolve(e.clean_path));
    c.track_path = Relative(clean_.Resolve(e.track_path));
    return c;
  }

  ManifestEntry MakeVariant(const ManifestEntry &e, NoiseKind kind, double snr_db,
                            uint64_t seed) {
    const Waveform clean = ReadWavAt16k(clean_.Resolve(e.clean_path));
    const Waveform noise = MakeNoise(kind, clean.size(), seed);
    const MixResult mix = MixAtSnr(clean, noise, snr_db, DeriveSeed(seed, "mix"));
    std::ostringstream name;
    name << e.utterance_id << "__" << NoiseKindName(kind) << "_" << std::fixed
         << std::setprecision(2) << snr_db << "dB.wav";
    const fs::path dir = fs::path(options_.output_root) / "audio" / SplitName(e.split);
    fs::create_directories(dir);
    const fs::path out = dir / name.str();
    WriteWav(out.string(), mix.mixture);

    ManifestEntry v = CleanCopy(e);
    v.noisy_path = Relative(out.string());
    v.noise_kind = kind;
    v.snr_db = snr_db;
    v.mix_gain = mix.peak_gain;
    return v;
  }

 private:
  Waveform MakeNoise(NoiseKind kind, size_t len, uint64_t seed) const {
    auto pick_nonbabble = [&](uint64_t s) {
      std::mt19937_64 rng(s);
      const size_t idx = std::uniform_int_distribution<size_t>(0, nonbabble_pool_.size() - 1)(rng);
      return FitNoiseLength(nonbabble_pool_[idx], len, rng);
    };
    switch (kind) {
      case NoiseKind::kBabble:
        return SynthBabble(babble_pool_, len, DeriveSeed(seed, "babble"));
      case NoiseKind::kNonBabble:
        return pick_nonbabble(DeriveSeed(seed, "nonbabble"));
      case NoiseKind::kCombined:
        return CombineNoises(SynthBabble(babble_pool_, len, DeriveSeed(seed, "babble")),
                             pick_nonbabble(DeriveSeed(seed, "nonbabble")));
    }
    return {};
  }

  const CorpusManifest &clean_;
  const NoiseSpec &babble_;
  const NoiseSpec &nonbabble_;
  const AugmentOptions &options_;
  std::vector<Waveform> babble_pool_;
  std::vector<Waveform> nonbabble_pool_;
};

}  // namespace

CorpusManifest BuildTrainDev(const CorpusManifest &clean, const NoiseSpec &babble,
                             const NoiseSpec &nonbabble, const AugmentOptions &options) {
  babble.snr.Validate();
  nonbabble.snr.Validate();
  VariantWriter writer(clean, babble, nonbabble, options);
  CorpusManifest out;
  out.metadata = clean.metadata;
  out.metadata.seed = options.seed;
  out.metadata.description = "augmented train/dev corpus (babble, nonbabble, combined)";
  out.root = options.output_root;
  bool any = false;
  for (const ManifestEntry &e : clean.entries) {
    if (e.IsAugmented() || e.split == Split::kTest) continue;
    any = true;
    out.entries.push_back(writer.CleanCopy(e));
    for (NoiseKind kind : {NoiseKind::kBabble, NoiseKind::kNonBabble, NoiseKind::kCombined}) {
      const uint64_t seed =
          DeriveSeed(options.seed, e.utterance_id + "|" + SplitName(e.split) + "|" + NoiseKindName(kind));
      std::mt19937_64 rng(DeriveSeed(seed, "snr"));
      const SnrPolicy &policy = kind == NoiseKind::kNonBabble ? nonbabble.snr : babble.snr;
      out.entries.push_back(writer.MakeVariant(e, kind, policy.Sample(rng), seed));
    }
  }
  Require(any, ErrorKind::kInvalidInput, "input manifest has no clean train/dev entries");
  out.Validate();
  return out;
}

CorpusManifest BuildTest(const CorpusManifest &clean, const NoiseSpec &babble,
                         const NoiseSpec &nonbabble, std::span<const std::string> train_pools,
                         const AugmentOptions &options) {
  CheckPoolsDisjoint(babble.source_pool, train_pools);
  CheckPoolsDisjoint(nonbabble.source_pool, train_pools);
  for (const NoiseSpec *spec : {&babble, &nonbabble}) {
    Require(spec->snr.kind == SnrPolicy::Kind::kFixedLevels, ErrorKind::kInvalidInput,
            "test augmentation needs a fixed SNR level list");
    spec->snr.Validate();
  }
  VariantWriter writer(clean, babble, nonbabble, options);
  CorpusManifest out;
  out.metadata = clean.metadata;
  out.metadata.seed = options.seed;
  out.metadata.description = "augmented test corpus ({babble, nonbabble} x fixed SNR levels)";
  out.root = options.output_root;
  bool any = false;
  for (const ManifestEntry &e : clean.entries) {
    if (e.IsAugmented() || e.split != Split::kTest) continue;
    any = true;
    out.entries.push_back(writer.CleanCopy(e));
    for (const NoiseSpec *spec : {&babble, &nonbabble}) {
      for (double level : spec->snr.levels) {
        std::ostringstream tag;
        tag << e.utterance_id << "|test|" << NoiseKindName(spec->kind) << "|" << level;
        out.entries.push_back(
            writer.MakeVariant(e, spec->kind, level, DeriveSeed(options.seed, tag.str())));
      }
    }
  }
  Require(any, ErrorKind::kInvalidInput, "input manifest has no clean test entries");
  out.Validate();
  return out;
}

}  // namespace sise
