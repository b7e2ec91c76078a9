// sise/toy-corpus.h

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

#ifndef SISE_TOY_CORPUS_H_
#define SISE_TOY_CORPUS_H_

// Synthetic articulatory corpus for desk-scale runs. Each utterance is a
// harmonic-plus-noise source shaped by time-varying resonators; its ten
// track channels are deterministic functions of the latent trajectories
// that drive the synthesis.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sise/manifest.h"
#include "sise/track.h"

namespace sise {

struct ToyLatents {
  // Per-sample trajectories at 16 kHz.
  std::vector<double> f0;        // Hz, [80, 300]
  std::vector<double> formant1;  // Hz, [300, 900]
  std::vector<double> formant2;  // Hz, [900, 2400]
  std::vector<double> amplitude; // [0.35, 1]
  std::vector<double> voicing;   // [0, 1]
  std::vector<double> nasal;     // [0, 1]
};

struct ToyUtterance {
  Waveform wave;
  ArticulatoryTrack track;
  ToyLatents latents;
};

/// Declared [min, max] range of each channel of a toy track.
const std::array<std::pair<double, double>, kNumTrackChannels> &ToyChannelRanges();

/// Synthesizes one utterance; deterministic in (seed, duration).
ToyUtterance SynthesizeToyUtterance(double duration_s, uint64_t seed);

/// Track of round(len / 320) frames sampled at frame centers.
ArticulatoryTrack TrackFromLatents(const ToyLatents &latents);

/// Stationary-ish coloured noise with slow amplitude modulation.
Waveform SynthesizeToyNoise(double duration_s, uint64_t seed);

struct ToyCorpusOptions {
  int num_utterances = 64;
  double duration_s = 1.0;
  uint64_t seed = 0;
  double dev_fraction = 0.125;
  double test_fraction = 0.25;
  std::string track_extension = ".csv";
  /// Also write disjoint train/test noise pools under <root>/noise/.
  bool write_noise_pools = true;
  int babble_pool_size = 24;
  int nonbabble_pool_size = 16;
  double noise_duration_s = 3.0;
};

struct ToyCorpusPaths {
  std::string manifest;
  std::string train_babble_list;
  std::string train_nonbabble_list;
  std::string test_babble_list;
  std::string test_nonbabble_list;
};

/// Writes audio, tracks, manifest.jsonl and (optionally) pool lists under
/// `root`; returns the manifest.
CorpusManifest GenerateToyCorpus(const ToyCorpusOptions &options, const std::string &root,
                                 ToyCorpusPaths *paths = nullptr);

}  // namespace sise

#endif  // SISE_TOY_CORPUS_H_
