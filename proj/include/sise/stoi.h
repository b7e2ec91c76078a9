// sise/stoi.h

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

#ifndef SISE_STOI_H_
#define SISE_STOI_H_

#include <span>

#include "sise/signal.h"

namespace sise {

/// Short-time objective intelligibility of `degraded` against `clean`:
/// 10 kHz analysis, 15 third-octave bands from 150 Hz, 384 ms segments,
/// clipped correlations, frames more than 40 dB below the loudest clean
/// frame removed first. Throws InvalidInput on a length mismatch or when
/// fewer than 30 frames survive silence removal. Result is clamped to [0, 1].
double Stoi(std::span<const double> clean, std::span<const double> degraded,
            int sample_rate = kSampleRate);

inline double Stoi(const Waveform &clean, const Waveform &degraded) {
  Require(clean.sample_rate == degraded.sample_rate, ErrorKind::kInvalidInput,
          "stoi: sample rates differ");
  return Stoi(clean.samples, degraded.samples, clean.sample_rate);
}

}  // namespace sise

#endif  // SISE_STOI_H_
