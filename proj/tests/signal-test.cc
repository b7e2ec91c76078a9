// tests/signal-test.cc

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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "sise/signal.h"

namespace sise {
namespace {

constexpr double kPi = 3.14159265358979323846;

double MaxInteriorError(const std::vector<double> &a, const std::vector<double> &b, size_t margin) {
  double e = 0.0;
  for (size_t i = margin; i + margin < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

TEST(Geometry, CanonicalHas201Bins) {
  const SpectrogramGeometry g = SpectrogramGeometry::Canonical();
  EXPECT_EQ(g.NumBins(), 201);
  EXPECT_EQ(g.fft_size, 400);
  EXPECT_EQ(g.hop, 160);
  EXPECT_TRUE(g.SatisfiesNola());
}

TEST(Geometry, HopLongerThanWindowBreaksNola) {
  const SpectrogramGeometry g = SpectrogramGeometry::Make(256, 300);
  EXPECT_FALSE(g.SatisfiesNola());
  try {
    g.Validate();
    FAIL() << "expected InvalidGeometry";
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidGeometry);
  }
}

TEST(Stft, EmptyWaveformIsRejected) {
  std::vector<double> empty;
  EXPECT_THROW(Stft(std::span<const double>(empty), SpectrogramGeometry::Canonical()), Error);
}

TEST(Stft, ZeroInputGivesZeroSpectrum) {
  const std::vector<double> z(4000, 0.0);
  const ComplexSpectrogram s = Stft(z, SpectrogramGeometry::Canonical());
  EXPECT_EQ(s.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Stft, MatchesDirectDft) {
  const std::vector<double> x = oracle::RandomSignal(5, 3000);
  for (const auto &[fft, hop] : {std::pair{400, 160}, {256, 64}, {512, 128}}) {
    const ComplexSpectrogram s = Stft(x, SpectrogramGeometry::Make(fft, hop));
    const oracle::Spectrum ref = oracle::DirectStft(x, fft, hop);
    ASSERT_EQ(s.NumFrames(), static_cast<int>(ref.size()));
    double err = 0.0;
    for (int t = 0; t < s.NumFrames(); ++t)
      for (int k = 0; k < s.NumBins(); ++k) err = std::max(err, std::abs(s.values(t, k) - ref[t][k]));
    EXPECT_LT(err, 1e-9) << fft << "/" << hop;
  }
}

TEST(Stft, ImpulseAtFrameCenterIsFlat) {
  // Frame t starts at t*hop - fft/2 in the unpadded signal, so an impulse at
  // t*hop sits at window index fft/2 where the periodic Hann window is 1.
  std::vector<double> x(3200, 0.0);
  const int t = 10;
  x[t * 160] = 1.0;
  const ComplexSpectrogram s = Stft(x, SpectrogramGeometry::Canonical());
  for (int k = 0; k < s.NumBins(); ++k) EXPECT_NEAR(std::abs(s.values(t, k)), 1.0, 1e-12);
}

TEST(Stft, BinCenteredSinusoidPeaksAtItsBin) {
  const int k = 25;  // 1000 Hz
  std::vector<double> x(8000);
  for (size_t n = 0; n < x.size(); ++n) x[n] = std::cos(2 * kPi * k * 40.0 * n / 16000.0);
  const ComplexSpectrogram s = Stft(x, SpectrogramGeometry::Canonical());
  const Matrix mag = s.Magnitude();
  const int t = 20;
  long arg = 0;
  mag.row(t).maxCoeff(&arg);
  EXPECT_EQ(arg, k);
  // Periodic Hann: the bin-centered tone gives N/4 at the peak, N/8 at the
  // neighbours and nothing further out.
  EXPECT_NEAR(mag(t, k), 100.0, 1e-9);
  EXPECT_NEAR(mag(t, k - 1), 50.0, 1e-9);
  EXPECT_NEAR(mag(t, k + 1), 50.0, 1e-9);
  EXPECT_NEAR(mag(t, k + 3), 0.0, 1e-8);
}

TEST(Stft, ScalesLinearly) {
  const std::vector<double> x = oracle::RandomSignal(9, 2000);
  std::vector<double> y(x);
  for (double &v : y) v *= 2.5;
  const ComplexSpectrogram a = Stft(x, SpectrogramGeometry::Canonical());
  const ComplexSpectrogram b = Stft(y, SpectrogramGeometry::Canonical());
  EXPECT_LT((b.values - 2.5 * a.values).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Istft, RoundTripInteriorError) {
  for (uint64_t seed : {1, 2, 3}) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> x(16000 + 37 * seed);
    for (double &v : x) v = u(rng);
    const ComplexSpectrogram s = Stft(x, SpectrogramGeometry::Canonical());
    const Waveform y = Istft(s, static_cast<long>(x.size()));
    ASSERT_EQ(y.size(), x.size());
    EXPECT_LT(MaxInteriorError(x, y.samples, 400), 1e-6);
  }
}

TEST(Istft, ZeroSpectrumGivesZeroWave) {
  ComplexSpectrogram s;
  s.geometry = SpectrogramGeometry::Canonical();
  s.values = ComplexMatrix::Zero(11, 201);
  const Waveform y = Istft(s, 1600);
  for (double v : y.samples) EXPECT_EQ(v, 0.0);
}

TEST(Istft, NoiseEnergyPreserved) {
  const std::vector<double> x = oracle::RandomSignal(11, 16000);
  const Waveform y = Istft(Stft(x, SpectrogramGeometry::Canonical()), 16000);
  double ex = 0.0, ey = 0.0;
  for (size_t i = 400; i + 400 < x.size(); ++i) {
    ex += x[i] * x[i];
    ey += y.samples[i] * y.samples[i];
  }
  EXPECT_GE(ey / ex, 0.999);
  EXPECT_LE(ey / ex, 1.001);
}

TEST(Adjoints, DotProductIdentities) {
  // <Stft x, G> = <x, StftAdjoint G> under the real inner product
  // Re(sum conj(a) b); likewise for Istft.
  const SpectrogramGeometry g = SpectrogramGeometry::Canonical();
  const std::vector<double> x = oracle::RandomSignal(21, 2400);
  const ComplexSpectrogram s = Stft(x, g);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix gs(s.NumFrames(), s.NumBins());
  for (long i = 0; i < gs.size(); ++i) gs.data()[i] = {n(rng), n(rng)};
  const std::vector<double> adj = StftAdjoint(gs, g, x.size());
  double lhs = 0.0;
  for (long i = 0; i < gs.size(); ++i)
    lhs += s.values.data()[i].real() * gs.data()[i].real() + s.values.data()[i].imag() * gs.data()[i].imag();
  EXPECT_NEAR(lhs, oracle::Dot(x, adj), 1e-8 * std::abs(lhs));

  ComplexSpectrogram z{gs, g};
  const Waveform w = Istft(z, 2400);
  const std::vector<double> gw = oracle::RandomSignal(22, 2400);
  const ComplexMatrix adj2 = IstftAdjoint(gw, g, s.NumFrames());
  double rhs = 0.0;
  for (long i = 0; i < gs.size(); ++i)
    rhs += gs.data()[i].real() * adj2.data()[i].real() + gs.data()[i].imag() * adj2.data()[i].imag();
  const double lhs2 = oracle::Dot(w.samples, gw);
  EXPECT_NEAR(lhs2, rhs, 1e-8 * std::abs(lhs2));
}

TEST(Compress, KnownValues) {
  Matrix m(1, 2);
  m << 0.0, std::exp(1.0) - 1.0;
  const Matrix c = Compress(m);
  EXPECT_EQ(c(0, 0), 0.0);
  EXPECT_NEAR(c(0, 1), 1.0, 1e-15);
  Matrix one(1, 1);
  one << 1.0;
  EXPECT_NEAR(Decompress(one)(0, 0), 1.718281828459045, 1e-12);
}

TEST(Compress, InversePairWithinRelativeTolerance) {
  std::mt19937_64 rng(3);
  Matrix m(50, 40);
  for (long i = 0; i < m.size(); ++i) m.data()[i] = std::pow(10.0, std::uniform_real_distribution<double>(-6, 6)(rng));
  const Matrix back = Decompress(Compress(m));
  const Matrix again = Compress(Decompress(Compress(m)));
  for (long i = 0; i < m.size(); ++i) {
    EXPECT_LE(std::abs(back.data()[i] - m.data()[i]), 1e-6 * m.data()[i]);
    EXPECT_NEAR(again.data()[i], Compress(m).data()[i], 1e-9);
  }
}

TEST(Compress, NegativeInputRejected) {
  Matrix m(1, 1);
  m << -0.5;
  EXPECT_THROW(Compress(m), Error);
}

TEST(MeasureSnr, EnergyArithmetic) {
  const std::vector<double> a = oracle::RandomSignal(1, 1000);
  std::vector<double> b = oracle::RandomSignal(2, 1000);
  const double scale = std::sqrt(oracle::Dot(a, a) / oracle::Dot(b, b));
  for (double &v : b) v *= scale;
  EXPECT_NEAR(MeasureSnr(a, b), 0.0, 1e-12);
  std::vector<double> c(b);
  for (double &v : c) v /= std::sqrt(10.0);
  EXPECT_NEAR(MeasureSnr(a, c), 10.0, 1e-9);
  for (double gain : {0.3, 2.0, 17.0}) {
    std::vector<double> d(b);
    for (double &v : d) v *= gain;
    EXPECT_NEAR(MeasureSnr(a, d), MeasureSnr(a, b) - 20 * std::log10(gain), 1e-9);
  }
}

TEST(MeasureSnr, ZeroEnergyIsDegenerate) {
  const std::vector<double> z(100, 0.0), x = oracle::RandomSignal(3, 100);
  for (const auto &[c, n] : {std::pair{z, x}, {x, z}}) {
    try {
      MeasureSnr(c, n);
      FAIL();
    } catch (const Error &e) {
      EXPECT_EQ(e.kind(), ErrorKind::kDegenerateInput);
    }
  }
}

TEST(Resample, SameRateIsIdentity) {
  const Waveform w(oracle::RandomSignal(4, 1234));
  EXPECT_EQ(Resample(w, 16000).samples, w.samples);
}

TEST(Resample, LengthArithmetic) {
  const Waveform w(std::vector<double>(8000, 0.1), 8000);
  const Waveform up = Resample(w, 16000);
  EXPECT_EQ(up.size(), 16000u);
  EXPECT_EQ(up.sample_rate, 16000);
}

TEST(Resample, SinusoidKeepsItsFrequency) {
  const double f = 1234.5;
  std::vector<double> x(8000);
  for (size_t n = 0; n < x.size(); ++n) x[n] = std::sin(2 * kPi * f * n / 8000.0);
  const Waveform y = Resample(Waveform(x, 8000), 16000);
  // Hann-windowed DTFT magnitude on a 0.01 Hz grid around the tone.
  const size_t lo = 2000, hi = y.size() - 2000;
  double best_f = 0.0, best = -1.0;
  for (double g = f - 1.0; g <= f + 1.0; g += 0.01) {
    double re = 0.0, im = 0.0;
    for (size_t n = lo; n < hi; ++n) {
      const double w = 0.5 - 0.5 * std::cos(2 * kPi * (n - lo) / (hi - lo));
      re += w * y.samples[n] * std::cos(2 * kPi * g * n / 16000.0);
      im += w * y.samples[n] * std::sin(2 * kPi * g * n / 16000.0);
    }
    if (re * re + im * im > best) {
      best = re * re + im * im;
      best_f = g;
    }
  }
  EXPECT_NEAR(best_f, f, 0.1);
}

}  // namespace
}  // namespace sise
