// sise/augment.h

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

#ifndef SISE_AUGMENT_H_
#define SISE_AUGMENT_H_

// Noisy-corpus construction: babble synthesis, SNR-exact mixing and the
// train/dev (random SNR, three conditions) and test (fixed SNR grid, two
// noise types, unseen noise) augmentation protocols.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sise/manifest.h"
#include "sise/signal.h"

namespace sise {

inline constexpr int kMinBabbleTalkers = 5;
inline constexpr int kMaxBabbleTalkers = 20;
inline constexpr double kCrossfadeSeconds = 0.05;

struct SnrPolicy {
  enum class Kind { kUniformRange, kFixedLevels };
  Kind kind = Kind::kUniformRange;
  double lo = 0.0;
  double hi = 10.0;
  std::vector<double> levels;

  static SnrPolicy Uniform(double lo, double hi) { return {Kind::kUniformRange, lo, hi, {}}; }
  static SnrPolicy Fixed(std::vector<double> levels) {
    return {Kind::kFixedLevels, 0.0, 0.0, std::move(levels)};
  }
  void Validate() const;
  double Sample(std::mt19937_64 &rng) const;
};

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kBabble;
  std::vector<std::string> source_pool;
  SnrPolicy snr;
  uint64_t seed = 0;
};

/// Mixes deterministic state from a base seed and a string tag (FNV-1a +
/// splitmix finalizer).
uint64_t DeriveSeed(uint64_t base, std::string_view tag);

/// Picks k ~ U{5..20} talkers without replacement, loops/crops each to
/// `target_len` from a seeded offset, equalizes their RMS, sums and
/// renormalizes to unit RMS.
Waveform SynthBabble(std::span<const Waveform> pool, size_t target_len, uint64_t seed,
                     int *talker_count = nullptr);

/// Crops (seeded offset) or tiles (50 ms linear crossfade) to `len` samples.
Waveform FitNoiseLength(const Waveform &noise, size_t len, std::mt19937_64 &rng);

struct MixResult {
  Waveform mixture;
  double applied_scale = 1.0;  // factor applied to the length-fitted noise
  double peak_gain = 1.0;      // applied to the whole mixture when |x| > 1
};

MixResult MixAtSnr(const Waveform &clean, const Waveform &noise, double target_snr_db,
                   uint64_t seed);

/// Equal-energy sum of babble and non-babble noise (each at unit RMS).
Waveform CombineNoises(const Waveform &babble, const Waveform &nonbabble);

/// Re-measures the SNR of a stored variant from its clean and noisy audio.
double RemeasureSnr(const Waveform &clean, const Waveform &noisy, double mix_gain);

/// Loads a pool list file: one audio path per line, relative paths resolved
/// against the list's directory.
std::vector<std::string> ReadPoolList(const std::string &path);

struct AugmentOptions {
  std::string output_root;  // audio goes to <root>/audio/<split>/
  uint64_t seed = 0;
};

/// Every clean train/dev utterance yields babble, non-babble and combined
/// variants at SNR drawn from each spec's policy; clean entries are kept.
CorpusManifest BuildTrainDev(const CorpusManifest &clean, const NoiseSpec &babble,
                             const NoiseSpec &nonbabble, const AugmentOptions &options);

/// Every clean test utterance yields {babble, nonbabble} x levels variants.
/// Throws ContaminatedEvaluation if a test pool file is also in `train_pools`.
CorpusManifest BuildTest(const CorpusManifest &clean, const NoiseSpec &babble,
                         const NoiseSpec &nonbabble, std::span<const std::string> train_pools,
                         const AugmentOptions &options);

/// Path-level disjointness check between two pools.
void CheckPoolsDisjoint(std::span<const std::string> test_pool,
                        std::span<const std::string> train_pool);

}  // namespace sise

#endif  // SISE_AUGMENT_H_
