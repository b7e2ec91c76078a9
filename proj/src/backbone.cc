// src/backbone.cc

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

#include "sise/backbone.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <unsupported/Eigen/FFT>

#include "sise/process.h"
#include "sise/wav-io.h"

namespace sise {

namespace fs = std::filesystem;

int NumFeatureFrames(size_t num_samples) {
  return std::max(1, static_cast<int>(std::lround(static_cast<double>(num_samples) /
                                                  kSamplesPerTrackFrame)));
}

void to_json(nlohmann::json &j, const ToyBackboneConfig &c) {
  j = {{"num_layers", c.num_layers}, {"dim", c.dim},       {"window", c.window},
       {"fft_size", c.fft_size},     {"min_hz", c.min_hz}, {"max_hz", c.max_hz},
       {"seed", c.seed}};
}

void from_json(const nlohmann::json &j, ToyBackboneConfig &c) {
  c.num_layers = j.value("num_layers", c.num_layers);
  c.dim = j.value("dim", c.dim);
  c.window = j.value("window", c.window);
  c.fft_size = j.value("fft_size", c.fft_size);
  c.min_hz = j.value("min_hz", c.min_hz);
  c.max_hz = j.value("max_hz", c.max_hz);
  c.seed = j.value("seed", c.seed);
}

namespace {

struct ToyCache : BackboneCache {
  std::vector<Matrix> hidden;  // h_0 .. h_{L-1}
  std::vector<Matrix> act;     // tanh terms, index l for layer l (l >= 1)
};

Matrix TriangularBands(const ToyBackboneConfig &c) {
  const int bins = c.fft_size / 2 + 1;
  const double bin_hz = static_cast<double>(kSampleRate) / c.fft_size;
  std::vector<double> edges(c.dim + 2);
  for (int i = 0; i < c.dim + 2; ++i)
    edges[i] = c.min_hz * std::pow(c.max_hz / c.min_hz, static_cast<double>(i) / (c.dim + 1));
  Matrix bands = Matrix::Zero(bins, c.dim);
  for (int j = 0; j < c.dim; ++j) {
    const double lo = edges[j], mid = edges[j + 1], hi = edges[j + 2];
    double total = 0.0;
    for (int k = 0; k < bins; ++k) {
      const double f = k * bin_hz;
      double w = 0.0;
      if (f > lo && f <= mid) w = (f - lo) / (mid - lo);
      else if (f > mid && f < hi) w = (hi - f) / (hi - mid);
      bands(k, j) = w;
      total += w;
    }
    if (total == 0.0) bands(std::min(bins - 1, static_cast<int>(std::lround(mid / bin_hz))), j) = 1.0;
  }
  return bands;
}

}  // namespace

ToyBackbone::ToyBackbone(ToyBackboneConfig config) : config_(config) {
  Require(config_.num_layers >= 1 && config_.dim >= 1, ErrorKind::kInvalidInput,
          "toy backbone needs at least one layer and one dimension");
  bands_ = TriangularBands(config_);
  std::mt19937_64 rng(config_.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int l = 1; l < config_.num_layers; ++l) {
    Matrix g(config_.dim, config_.dim);
    for (long i = 0; i < g.size(); ++i) g.data()[i] = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    Parameter p("backbone.q" + std::to_string(l), config_.dim, config_.dim);
    p.value = q;
    projections_.push_back(std::move(p));
  }
}

nlohmann::json ToyBackbone::Config() const {
  nlohmann::json j = config_;
  j["kind"] = "toy";
  return j;
}

Matrix ToyBackbone::Filterbank(const Waveform &wave) const {
  Require(wave.sample_rate == kSampleRate, ErrorKind::kInvalidInput,
          "backbone expects 16 kHz audio, got " + std::to_string(wave.sample_rate));
  Require(!wave.empty(), ErrorKind::kInvalidInput, "empty waveform");
  const int frames = NumFeatureFrames(wave.size());
  const int win = config_.window;
  std::vector<double> window(win);
  for (int n = 0; n < win; ++n) window[n] = 0.5 - 0.5 * std::cos(2.0 * M_PI * n / win);
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    return f;
  }();
  std::vector<double> buf(config_.fft_size, 0.0);
  std::vector<Complex> spec;
  Matrix power(frames, config_.fft_size / 2 + 1);
  const long len = static_cast<long>(wave.size());
  for (int i = 0; i < frames; ++i) {
    const long start = static_cast<long>(i) * kSamplesPerTrackFrame + kSamplesPerTrackFrame / 2 - win / 2;
    std::fill(buf.begin(), buf.end(), 0.0);
    for (int n = 0; n < win; ++n) {
      const long pos = start + n;
      if (pos >= 0 && pos < len) buf[n] = window[n] * wave.samples[pos];
    }
    fft.fwd(spec, buf);
    for (int k = 0; k < power.cols(); ++k) power(i, k) = std::norm(spec[k]);
  }
  Matrix energies = power * bands_;
  return energies.unaryExpr([](double e) { return 0.25 * std::log(e + 1e-4); });
}

FeatureStack ToyBackbone::Extract(const Waveform &wave, std::unique_ptr<BackboneCache> *cache) const {
  FeatureStack stack;
  stack.layers.push_back(Filterbank(wave));
  auto c = std::make_unique<ToyCache>();
  c->act.emplace_back();
  for (int l = 1; l < config_.num_layers; ++l) {
    const Matrix &prev = stack.layers.back();
    Matrix a = (prev * projections_[l - 1].value).array().tanh().matrix();
    stack.layers.push_back(prev + 0.5 * a);
    if (cache) c->act.push_back(std::move(a));
  }
  if (cache) {
    c->hidden = stack.layers;
    *cache = std::move(c);
  }
  return stack;
}

void ToyBackbone::Backward(const BackboneCache &cache_base, const std::vector<Matrix> &grad_layers) {
  const auto &cache = dynamic_cast<const ToyCache &>(cache_base);
  const int L = config_.num_layers;
  Matrix g = grad_layers[L - 1];
  for (int l = L - 1; l >= 1; --l) {
    const Matrix &a = cache.act[l];
    const Matrix da = (0.5 * g.array() * (1.0 - a.array() * a.array())).matrix();
    projections_[l - 1].grad.noalias() += cache.hidden[l - 1].transpose() * da;
    Matrix prev = grad_layers[l - 1] + g;
    prev.noalias() += da * projections_[l - 1].value.transpose();
    g = std::move(prev);
  }
}

void ToyBackbone::CollectParameters(std::vector<Parameter *> &out) {
  for (Parameter &p : projections_) out.push_back(&p);
}

std::unique_ptr<FeatureProvider> ToyBackbone::Clone() const {
  return std::make_unique<ToyBackbone>(*this);
}

void to_json(nlohmann::json &j, const ExternalBackboneConfig &c) {
  j = {{"command", c.command}, {"num_layers", c.num_layers}, {"dim", c.dim},
       {"timeout_s", c.timeout_s}};
}

void from_json(const nlohmann::json &j, ExternalBackboneConfig &c) {
  c.command = j.value("command", c.command);
  c.num_layers = j.value("num_layers", c.num_layers);
  c.dim = j.value("dim", c.dim);
  c.timeout_s = j.value("timeout_s", c.timeout_s);
}

nlohmann::json ExternalBackbone::Config() const {
  nlohmann::json j = config_;
  j["kind"] = "external";
  return j;
}

FeatureStack ExternalBackbone::Extract(const Waveform &wave, std::unique_ptr<BackboneCache> *) const {
  Require(wave.sample_rate == kSampleRate, ErrorKind::kInvalidInput,
          "backbone expects 16 kHz audio, got " + std::to_string(wave.sample_rate));
  Require(!config_.command.empty(), ErrorKind::kInvalidState, "external backbone has no command");
  const std::string dir = MakeTempDir("sise-feat");
  const std::string wav = (fs::path(dir) / "in.wav").string();
  const std::string out = (fs::path(dir) / "feats.bin").string();
  WriteWav(wav, wave);
  const CommandResult r =
      RunCommand(FillTemplate(config_.command, {{"wav", wav}, {"out", out}}), config_.timeout_s);
  if (r.timed_out || r.exit_code != 0) {
    fs::remove_all(dir);
    Fail(ErrorKind::kInvalidState, "external backbone failed (exit " + std::to_string(r.exit_code) +
                                       (r.timed_out ? ", timed out" : "") + "): " + r.err);
  }
  FeatureStack stack = ReadFeatureStack(out);
  fs::remove_all(dir);
  Require(stack.NumLayers() == config_.num_layers && stack.Dim() == config_.dim,
          ErrorKind::kInvalidInput, "external backbone returned an unexpected stack shape");
  return stack;
}

std::unique_ptr<FeatureProvider> ExternalBackbone::Clone() const {
  return std::make_unique<ExternalBackbone>(*this);
}

FeatureStack ReadFeatureStack(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  Require(static_cast<bool>(in), ErrorKind::kIoError, "cannot open feature stack " + path);
  char magic[8];
  int32_t dims[3];
  in.read(magic, 8);
  in.read(reinterpret_cast<char *>(dims), sizeof(dims));
  Require(in && std::memcmp(magic, "SISEFEAT", 8) == 0, ErrorKind::kInvalidInput,
          path + " is not a feature stack file");
  Require(dims[0] > 0 && dims[1] >= 0 && dims[2] > 0, ErrorKind::kInvalidInput,
          path + ": bad stack dimensions");
  FeatureStack stack;
  std::vector<float> buf(static_cast<size_t>(dims[1]) * dims[2]);
  for (int l = 0; l < dims[0]; ++l) {
    in.read(reinterpret_cast<char *>(buf.data()), static_cast<std::streamsize>(buf.size() * 4));
    Require(static_cast<bool>(in), ErrorKind::kInvalidInput, path + ": truncated feature stack");
    Matrix m(dims[1], dims[2]);
    for (size_t i = 0; i < buf.size(); ++i) m.data()[i] = buf[i];
    stack.layers.push_back(std::move(m));
  }
  return stack;
}

void WriteFeatureStack(const std::string &path, const FeatureStack &stack) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(static_cast<bool>(out), ErrorKind::kIoError, "cannot write " + path);
  out.write("SISEFEAT", 8);
  const int32_t dims[3] = {stack.NumLayers(), stack.NumFrames(), stack.Dim()};
  out.write(reinterpret_cast<const char *>(dims), sizeof(dims));
  for (const Matrix &m : stack.layers)
    for (long i = 0; i < m.size(); ++i) {
      const float f = static_cast<float>(m.data()[i]);
      out.write(reinterpret_cast<const char *>(&f), 4);
    }
}

}  // namespace sise
