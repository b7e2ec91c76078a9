// src/stoi.cc

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

#include "sise/stoi.h"

#include <cmath>
#include <limits>
#include <numbers>

#include <unsupported/Eigen/FFT>

namespace sise {

namespace {

constexpr int kRate = 10000;
constexpr int kFrame = 256;
constexpr int kHop = kFrame / 2;
constexpr int kFft = 512;
constexpr int kBands = 15;
constexpr double kMinBandHz = 150.0;
constexpr int kSegment = 30;
constexpr double kBetaDb = -15.0;
constexpr double kDynamicRangeDb = 40.0;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Hann of length kFrame without the zero endpoints of a kFrame+2 window.
const std::vector<double> &AnalysisWindow() {
  static const std::vector<double> w = [] {
    std::vector<double> v(kFrame);
    for (int i = 0; i < kFrame; ++i)
      v[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (i + 1) / (kFrame + 1));
    return v;
  }();
  return w;
}

// Rows are bands, columns FFT bins: 1 on [low, high) of each band edge
// snapped to the nearest bin.
const Matrix &ThirdOctaveBands() {
  static const Matrix obm = [] {
    const int bins = kFft / 2 + 1;
    Matrix m = Matrix::Zero(kBands, bins);
    auto nearest = [bins](double hz) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int k = 0; k < bins; ++k) {
        const double d = std::pow(static_cast<double>(k) * kRate / kFft - hz, 2);
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      return best;
    };
    for (int i = 0; i < kBands; ++i) {
      const int lo = nearest(kMinBandHz * std::pow(2.0, (2.0 * i - 1.0) / 6.0));
      const int hi = nearest(kMinBandHz * std::pow(2.0, (2.0 * i + 1.0) / 6.0));
      for (int k = lo; k < hi; ++k) m(i, k) = 1.0;
    }
    return m;
  }();
  return obm;
}

int NumFrames(size_t len) {
  return len > static_cast<size_t>(kFrame) ? static_cast<int>((len - kFrame + kHop - 1) / kHop) : 0;
}

void RemoveSilentFrames(std::vector<double> &x, std::vector<double> &y) {
  const auto &w = AnalysisWindow();
  const int frames = NumFrames(x.size());
  std::vector<double> energy(frames);
  double loudest = -std::numeric_limits<double>::infinity();
  for (int f = 0; f < frames; ++f) {
    double sq = 0.0;
    for (int i = 0; i < kFrame; ++i) sq += std::pow(w[i] * x[f * kHop + i], 2);
    energy[f] = 20.0 * std::log10(std::sqrt(sq) + kEps);
    loudest = std::max(loudest, energy[f]);
  }
  std::vector<int> keep;
  for (int f = 0; f < frames; ++f)
    if (loudest - kDynamicRangeDb - energy[f] < 0) keep.push_back(f);
  Require(!keep.empty(), ErrorKind::kInvalidInput, "stoi: no frames survive silence removal");
  const size_t out_len = (keep.size() - 1) * kHop + kFrame;
  std::vector<double> xs(out_len, 0.0), ys(out_len, 0.0);
  for (size_t j = 0; j < keep.size(); ++j) {
    const size_t src = static_cast<size_t>(keep[j]) * kHop, dst = j * kHop;
    for (int i = 0; i < kFrame; ++i) {
      xs[dst + i] += w[i] * x[src + i];
      ys[dst + i] += w[i] * y[src + i];
    }
  }
  x.swap(xs);
  y.swap(ys);
}

// Third-octave band envelopes, bands x frames.
Matrix BandEnvelopes(const std::vector<double> &x) {
  const auto &w = AnalysisWindow();
  const int frames = NumFrames(x.size());
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  Matrix power(kFft / 2 + 1, frames);
  std::vector<double> buf(kFft);
  std::vector<Complex> spec;
  for (int f = 0; f < frames; ++f) {
    std::fill(buf.begin(), buf.end(), 0.0);
    for (int i = 0; i < kFrame; ++i) buf[i] = w[i] * x[f * kHop + i];
    fft.fwd(spec, buf);
    for (int k = 0; k <= kFft / 2; ++k) power(k, f) = std::norm(spec[k]);
  }
  return (ThirdOctaveBands() * power).cwiseSqrt();
}

}  // namespace

double Stoi(std::span<const double> clean, std::span<const double> degraded, int sample_rate) {
  Require(clean.size() == degraded.size(), ErrorKind::kInvalidInput,
          "stoi: clean and degraded lengths differ");
  Require(sample_rate > 0, ErrorKind::kInvalidInput, "stoi: bad sample rate");
  std::vector<double> x(clean.begin(), clean.end()), y(degraded.begin(), degraded.end());
  if (sample_rate != kRate) {
    const long n_out = static_cast<long>(
        (static_cast<long long>(x.size()) * kRate + sample_rate - 1) / sample_rate);
    x = Resample(Waveform(std::move(x), sample_rate), kRate, n_out).samples;
    y = Resample(Waveform(std::move(y), sample_rate), kRate, n_out).samples;
  }
  Require(x.size() > static_cast<size_t>(kFrame), ErrorKind::kInvalidInput, "stoi: signal too short");
  RemoveSilentFrames(x, y);
  const Matrix xb = BandEnvelopes(x);
  const Matrix yb = BandEnvelopes(y);
  Require(xb.cols() >= kSegment, ErrorKind::kInvalidInput,
          "stoi: fewer than 30 frames (384 ms) remain after silence removal");

  const double clip = std::pow(10.0, -kBetaDb / 20.0);
  const int segments = static_cast<int>(xb.cols()) - kSegment + 1;
  double total = 0.0;
  for (int m = 0; m < segments; ++m) {
    for (int j = 0; j < kBands; ++j) {
      const Eigen::ArrayXd xs = xb.row(j).segment(m, kSegment).transpose().array();
      const Eigen::ArrayXd ys = yb.row(j).segment(m, kSegment).transpose().array();
      const double alpha = std::sqrt(xs.square().sum()) / (std::sqrt(ys.square().sum()) + kEps);
      Eigen::ArrayXd yp = (ys * alpha).min(xs * (1.0 + clip));
      yp -= yp.mean();
      Eigen::ArrayXd xc = xs - xs.mean();
      yp /= std::sqrt(yp.square().sum()) + kEps;
      xc /= std::sqrt(xc.square().sum()) + kEps;
      total += (yp * xc).sum();
    }
  }
  const double d = total / (static_cast<double>(segments) * kBands);
  return std::clamp(d, 0.0, 1.0);
}

}  // namespace sise
