// sise/signal.h

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

#ifndef SISE_SIGNAL_H_
#define SISE_SIGNAL_H_

// Deterministic DSP kernel: STFT / ISTFT (with their adjoints, used by the
// training code), log1p magnitude compression, SNR arithmetic and
// band-limited resampling.

#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sise/common.h"

namespace sise {

struct Waveform {
  std::vector<double> samples;
  int sample_rate = kSampleRate;

  Waveform() = default;
  explicit Waveform(std::vector<double> s, int rate = kSampleRate)
      : samples(std::move(s)), sample_rate(rate) {}

  size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double DurationSeconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
  /// Throws InvalidInput on NaN/Inf or a non-positive rate.
  void Validate() const;
};

enum class WindowKind { kHannPeriodic, kHannSymmetric, kRectangular };

struct SpectrogramGeometry {
  int fft_size = 400;
  int hop = 160;
  WindowKind window = WindowKind::kHannPeriodic;

  int NumBins() const { return fft_size / 2 + 1; }
  /// Frames produced by centered (reflect-padded) framing.
  int NumFrames(size_t num_samples) const {
    return static_cast<int>(num_samples / hop) + 1;
  }
  std::vector<double> Window() const;
  /// Window-square overlap-add strictly positive at every offset.
  bool SatisfiesNola() const;
  void Validate() const;

  bool operator==(const SpectrogramGeometry &) const = default;

  /// fft 400 / hop 160 / periodic Hann: 201 bins at a 10 ms hop.
  static SpectrogramGeometry Canonical() { return {}; }
  static SpectrogramGeometry Make(int fft_size, int hop,
                                  WindowKind window = WindowKind::kHannPeriodic) {
    return {fft_size, hop, window};
  }
};

void to_json(nlohmann::json &j, const SpectrogramGeometry &g);
void from_json(const nlohmann::json &j, SpectrogramGeometry &g);

struct ComplexSpectrogram {
  ComplexMatrix values;  // frames x bins
  SpectrogramGeometry geometry;

  int NumFrames() const { return static_cast<int>(values.rows()); }
  int NumBins() const { return static_cast<int>(values.cols()); }
  Matrix Magnitude() const;
};

struct CompressedMagnitude {
  Matrix values;  // frames x bins, all >= 0
  SpectrogramGeometry geometry;
};

/// Centered STFT with reflection padding of fft_size/2 on both sides.
ComplexSpectrogram Stft(std::span<const double> wave,
                        const SpectrogramGeometry &geometry);
inline ComplexSpectrogram Stft(const Waveform &wave,
                               const SpectrogramGeometry &geometry) {
  return Stft(std::span<const double>(wave.samples), geometry);
}

/// Least-squares overlap-add inverse. `length` < 0 means (frames - 1) * hop.
Waveform Istft(const ComplexSpectrogram &spec, long length = -1);

/// Gradient of a real scalar w.r.t. the STFT input, given its gradient
/// w.r.t. the real and imaginary parts of every bin (packed as re + i*im).
std::vector<double> StftAdjoint(const ComplexMatrix &grad_spec,
                                const SpectrogramGeometry &geometry,
                                size_t num_samples);

/// Gradient w.r.t. the spectrogram (re + i*im) given the gradient w.r.t. the
/// ISTFT output of the given length.
ComplexMatrix IstftAdjoint(std::span<const double> grad_wave,
                           const SpectrogramGeometry &geometry, int num_frames);

/// log(1 + m) elementwise; InvalidInput on negative entries.
Matrix Compress(const Matrix &magnitude);
CompressedMagnitude Compress(const ComplexSpectrogram &spec);
/// exp(c) - 1 elementwise, clipped at 0.
Matrix Decompress(const Matrix &compressed);

/// 10 log10(sum clean^2 / sum noise^2).
double MeasureSnr(std::span<const double> clean, std::span<const double> noise);
inline double MeasureSnr(const Waveform &clean, const Waveform &noise) {
  return MeasureSnr(clean.samples, noise.samples);
}

double Energy(std::span<const double> x);
double Rms(std::span<const double> x);

/// Kaiser-windowed sinc polyphase resampler; output length
/// round(len * target / source).
Waveform Resample(const Waveform &wave, int target_rate);
/// Same filter, with an explicit output length.
Waveform Resample(const Waveform &wave, int target_rate, long output_length);

}  // namespace sise

#endif  // SISE_SIGNAL_H_
