// src/signal.cc

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

#include "sise/signal.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <nlohmann/json.hpp>
#include <unsupported/Eigen/FFT>

namespace sise {

namespace {

Eigen::FFT<double> &HalfSpectrumFft() {
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    return f;
  }();
  return fft;
}

// numpy-style "reflect" (edge sample not repeated).
inline size_t ReflectIndex(long i, long n) {
  if (n == 1) return 0;
  const long period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return static_cast<size_t>(i < n ? i : period - i);
}

std::vector<double> ReflectPad(std::span<const double> x, int pad) {
  const long n = static_cast<long>(x.size());
  std::vector<double> out(x.size() + 2 * static_cast<size_t>(pad));
  for (long i = 0; i < static_cast<long>(out.size()); ++i)
    out[i] = x[ReflectIndex(i - pad, n)];
  return out;
}

// Window-square overlap-add over a padded signal of `padded_len` samples.
std::vector<double> WindowSquareSum(const std::vector<double> &window, int hop,
                                    int num_frames, size_t padded_len) {
  std::vector<double> wsum(padded_len, 0.0);
  const int n = static_cast<int>(window.size());
  for (int t = 0; t < num_frames; ++t)
    for (int i = 0; i < n; ++i) {
      size_t pos = static_cast<size_t>(t) * hop + i;
      if (pos < padded_len) wsum[pos] += window[i] * window[i];
    }
  return wsum;
}

constexpr double kTinyWindowSum = 1e-11;

}  // namespace

void Waveform::Validate() const {
  Require(sample_rate > 0, ErrorKind::kInvalidInput, "sample rate must be positive");
  for (double v : samples)
    Require(std::isfinite(v), ErrorKind::kInvalidInput, "waveform has non-finite samples");
}

std::vector<double> SpectrogramGeometry::Window() const {
  std::vector<double> w(fft_size);
  const double pi = std::numbers::pi;
  for (int n = 0; n < fft_size; ++n) {
    switch (window) {
      case WindowKind::kHannPeriodic:
        w[n] = 0.5 - 0.5 * std::cos(2.0 * pi * n / fft_size);
        break;
      case WindowKind::kHannSymmetric:
        w[n] = fft_size == 1 ? 1.0 : 0.5 - 0.5 * std::cos(2.0 * pi * n / (fft_size - 1));
        break;
      case WindowKind::kRectangular:
        w[n] = 1.0;
        break;
    }
  }
  return w;
}

bool SpectrogramGeometry::SatisfiesNola() const {
  if (fft_size <= 0 || hop <= 0 || hop > fft_size) return false;
  const std::vector<double> w = Window();
  for (int offset = 0; offset < hop; ++offset) {
    double sum = 0.0;
    for (int i = offset; i < fft_size; i += hop) sum += w[i] * w[i];
    if (!(sum > kTinyWindowSum)) return false;
  }
  return true;
}

void SpectrogramGeometry::Validate() const {
  Require(fft_size >= 2 && fft_size % 2 == 0, ErrorKind::kInvalidGeometry,
          "fft_size must be even and >= 2");
  Require(hop >= 1 && hop <= fft_size, ErrorKind::kInvalidGeometry,
          "hop must lie in [1, fft_size]");
}

namespace {
const char *WindowName(WindowKind k) {
  switch (k) {
    case WindowKind::kHannPeriodic: return "hann_periodic";
    case WindowKind::kHannSymmetric: return "hann_symmetric";
    case WindowKind::kRectangular: return "rectangular";
  }
  return "unknown";
}
}  // namespace

void to_json(nlohmann::json &j, const SpectrogramGeometry &g) {
  j = nlohmann::json{{"fft_size", g.fft_size}, {"hop", g.hop},
                     {"window", WindowName(g.window)}};
}

void from_json(const nlohmann::json &j, SpectrogramGeometry &g) {
  g.fft_size = j.at("fft_size").get<int>();
  g.hop = j.at("hop").get<int>();
  const std::string w = j.value("window", std::string("hann_periodic"));
  if (w == "hann_periodic") g.window = WindowKind::kHannPeriodic;
  else if (w == "hann_symmetric") g.window = WindowKind::kHannSymmetric;
  else if (w == "rectangular") g.window = WindowKind::kRectangular;
  else Fail(ErrorKind::kInvalidGeometry, "unknown window kind '" + w + "'");
}

Matrix ComplexSpectrogram::Magnitude() const { return values.cwiseAbs(); }

ComplexSpectrogram Stft(std::span<const double> wave,
                        const SpectrogramGeometry &geometry) {
  geometry.Validate();
  Require(!wave.empty(), ErrorKind::kInvalidInput, "stft of an empty waveform");
  const int n_fft = geometry.fft_size;
  const int pad = n_fft / 2;
  Require(wave.size() > static_cast<size_t>(pad), ErrorKind::kInvalidInput,
          "waveform shorter than half an analysis frame");
  const std::vector<double> padded = ReflectPad(wave, pad);
  const std::vector<double> window = geometry.Window();
  const int frames = geometry.NumFrames(wave.size());
  const int bins = geometry.NumBins();

  ComplexSpectrogram spec;
  spec.geometry = geometry;
  spec.values.resize(frames, bins);
  auto &fft = HalfSpectrumFft();
  std::vector<double> buf(n_fft);
  std::vector<Complex> out;
  for (int t = 0; t < frames; ++t) {
    const size_t start = static_cast<size_t>(t) * geometry.hop;
    for (int i = 0; i < n_fft; ++i) buf[i] = window[i] * padded[start + i];
    fft.fwd(out, buf);
    for (int k = 0; k < bins; ++k) spec.values(t, k) = out[k];
  }
  return spec;
}

Waveform Istft(const ComplexSpectrogram &spec, long length) {
  const SpectrogramGeometry &g = spec.geometry;
  g.Validate();
  Require(g.SatisfiesNola(), ErrorKind::kInvalidGeometry,
          "window/hop pair violates the NOLA condition");
  Require(spec.NumBins() == g.NumBins(), ErrorKind::kInvalidInput,
          "spectrogram bin count does not match its geometry");
  const int frames = spec.NumFrames();
  const int n_fft = g.fft_size;
  const int pad = n_fft / 2;
  if (length < 0) length = frames > 0 ? static_cast<long>(frames - 1) * g.hop : 0;
  if (frames == 0) return Waveform(std::vector<double>(length, 0.0));

  const size_t padded_len = static_cast<size_t>(frames - 1) * g.hop + n_fft;
  const std::vector<double> window = g.Window();
  std::vector<double> acc(padded_len, 0.0);
  auto &fft = HalfSpectrumFft();
  std::vector<Complex> half(g.NumBins());
  std::vector<double> frame;
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < g.NumBins(); ++k) half[k] = spec.values(t, k);
    fft.inv(frame, half, n_fft);
    const size_t start = static_cast<size_t>(t) * g.hop;
    for (int i = 0; i < n_fft; ++i) acc[start + i] += window[i] * frame[i];
  }
  const std::vector<double> wsum = WindowSquareSum(window, g.hop, frames, padded_len);
  std::vector<double> out(static_cast<size_t>(length), 0.0);
  for (long i = 0; i < length; ++i) {
    const size_t pos = static_cast<size_t>(i + pad);
    if (pos < padded_len && wsum[pos] > kTinyWindowSum) out[i] = acc[pos] / wsum[pos];
  }
  return Waveform(std::move(out));
}

std::vector<double> StftAdjoint(const ComplexMatrix &grad_spec,
                                const SpectrogramGeometry &geometry,
                                size_t num_samples) {
  const int n_fft = geometry.fft_size;
  const int pad = n_fft / 2;
  const int bins = geometry.NumBins();
  const int frames = static_cast<int>(grad_spec.rows());
  Require(grad_spec.cols() == bins, ErrorKind::kInvalidInput, "bin count mismatch");
  Require(frames == geometry.NumFrames(num_samples), ErrorKind::kInvalidInput,
          "frame count mismatch in stft adjoint");
  const std::vector<double> window = geometry.Window();
  std::vector<double> grad_padded(num_samples + 2 * static_cast<size_t>(pad), 0.0);
  auto &fft = HalfSpectrumFft();
  std::vector<Complex> half(bins);
  std::vector<double> frame;
  for (int t = 0; t < frames; ++t) {
    // sum_k Re(G_k e^{i theta}) over the one-sided bins == N * irfft(G')
    // with the interior bins halved.
    for (int k = 0; k < bins; ++k) {
      const bool edge = (k == 0 || k == bins - 1);
      half[k] = edge ? Complex(grad_spec(t, k).real(), 0.0) : 0.5 * grad_spec(t, k);
    }
    fft.inv(frame, half, n_fft);
    const size_t start = static_cast<size_t>(t) * geometry.hop;
    for (int i = 0; i < n_fft; ++i)
      grad_padded[start + i] += window[i] * frame[i] * n_fft;
  }
  std::vector<double> grad(num_samples, 0.0);
  const long n = static_cast<long>(num_samples);
  for (long i = 0; i < static_cast<long>(grad_padded.size()); ++i)
    grad[ReflectIndex(i - pad, n)] += grad_padded[i];
  return grad;
}

ComplexMatrix IstftAdjoint(std::span<const double> grad_wave,
                           const SpectrogramGeometry &geometry, int num_frames) {
  const int n_fft = geometry.fft_size;
  const int pad = n_fft / 2;
  const int bins = geometry.NumBins();
  ComplexMatrix grad(num_frames, bins);
  grad.setZero();
  if (num_frames == 0) return grad;
  const size_t padded_len = static_cast<size_t>(num_frames - 1) * geometry.hop + n_fft;
  const std::vector<double> window = geometry.Window();
  const std::vector<double> wsum =
      WindowSquareSum(window, geometry.hop, num_frames, padded_len);
  std::vector<double> grad_padded(padded_len, 0.0);
  for (size_t i = 0; i < grad_wave.size(); ++i) {
    const size_t pos = i + pad;
    if (pos < padded_len && wsum[pos] > kTinyWindowSum)
      grad_padded[pos] = grad_wave[i] / wsum[pos];
  }
  auto &fft = HalfSpectrumFft();
  std::vector<double> frame(n_fft);
  std::vector<Complex> out;
  for (int t = 0; t < num_frames; ++t) {
    const size_t start = static_cast<size_t>(t) * geometry.hop;
    for (int i = 0; i < n_fft; ++i) frame[i] = window[i] * grad_padded[start + i];
    fft.fwd(out, frame);
    for (int k = 0; k < bins; ++k) {
      const double c = (k == 0 || k == bins - 1) ? 1.0 : 2.0;
      grad(t, k) = out[k] * (c / n_fft);
    }
  }
  return grad;
}

Matrix Compress(const Matrix &magnitude) {
  Require((magnitude.array() >= 0.0).all(), ErrorKind::kInvalidInput,
          "compress expects a non-negative magnitude");
  return magnitude.unaryExpr([](double m) { return std::log1p(m); });
}

CompressedMagnitude Compress(const ComplexSpectrogram &spec) {
  return {Compress(spec.Magnitude()), spec.geometry};
}

Matrix Decompress(const Matrix &compressed) {
  return compressed.unaryExpr([](double c) { return std::max(0.0, std::expm1(c)); });
}

double Energy(std::span<const double> x) {
  return std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
}

double Rms(std::span<const double> x) {
  return x.empty() ? 0.0 : std::sqrt(Energy(x) / static_cast<double>(x.size()));
}

double MeasureSnr(std::span<const double> clean, std::span<const double> noise) {
  Require(clean.size() == noise.size(), ErrorKind::kInvalidInput,
          "measure_snr needs equal lengths");
  const double es = Energy(clean);
  const double en = Energy(noise);
  Require(en > 0.0, ErrorKind::kDegenerateInput, "noise has zero energy");
  Require(es > 0.0, ErrorKind::kDegenerateInput, "clean signal has zero energy");
  return 10.0 * std::log10(es / en);
}

namespace {

// Kaiser-windowed ideal low-pass for rational rate change up/down
// (same design as Octave's resample()).
std::vector<double> ResampleFilter(long up, long down) {
  const double stopband_cutoff = 1.0 / (2.0 * std::max(up, down));
  const double roll_off_width = stopband_cutoff / 10.0;
  const double rejection_db = 60.0;
  const long half = static_cast<long>(
      std::ceil((rejection_db - 8.0) / (28.714 * roll_off_width)));
  const double beta = 0.1102 * (rejection_db - 8.7);
  const long len = 2 * half + 1;
  std::vector<double> h(len);
  const double i0_beta = std::cyl_bessel_i(0.0, beta);
  double sum = 0.0;
  for (long n = 0; n < len; ++n) {
    const double t = static_cast<double>(n - half);
    const double x = 2.0 * stopband_cutoff * t;
    const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double r = 2.0 * n / (len - 1) - 1.0;
    const double kaiser = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    h[n] = kaiser * 2.0 * up * stopband_cutoff * sinc;
    sum += h[n];
  }
  for (double &v : h) v = v / sum * static_cast<double>(up);
  return h;
}

}  // namespace

Waveform Resample(const Waveform &wave, int target_rate) {
  Require(wave.sample_rate > 0 && target_rate > 0, ErrorKind::kInvalidInput,
          "sample rates must be positive");
  return Resample(wave, target_rate,
                  std::lround(static_cast<double>(wave.size()) * target_rate / wave.sample_rate));
}

Waveform Resample(const Waveform &wave, int target_rate, long n_out) {
  Require(wave.sample_rate > 0 && target_rate > 0, ErrorKind::kInvalidInput,
          "sample rates must be positive");
  if (wave.sample_rate == target_rate && n_out == static_cast<long>(wave.size())) return wave;
  const long g = std::gcd(static_cast<long>(wave.sample_rate), static_cast<long>(target_rate));
  const long up = target_rate / g;
  const long down = wave.sample_rate / g;
  const std::vector<double> h = ResampleFilter(up, down);
  const long half = (static_cast<long>(h.size()) - 1) / 2;
  const long n_in = static_cast<long>(wave.size());
  std::vector<double> out(static_cast<size_t>(std::max(0L, n_out)), 0.0);
  for (long m = 0; m < n_out; ++m) {
    // y[m] = sum_k x[k] h[m*down + half - k*up]
    const long c = m * down + half;
    long k_lo = c - 2 * half <= 0 ? 0 : (c - 2 * half + up - 1) / up;
    long k_hi = std::min(n_in - 1, c / up);
    double acc = 0.0;
    for (long k = k_lo; k <= k_hi; ++k) acc += wave.samples[k] * h[c - k * up];
    out[m] = acc;
  }
  return Waveform(std::move(out), target_rate);
}

}  // namespace sise
