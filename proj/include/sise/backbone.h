// sise/backbone.h

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

#ifndef SISE_BACKBONE_H_
#define SISE_BACKBONE_H_

// SSL feature providers: per-layer hidden states at a 20 ms stride. The toy
// backbone stands in for a pretrained encoder at desk scale; the external
// backbone adapts any pretrained-model wrapper that writes a feature-stack
// file.

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sise/nnet.h"
#include "sise/signal.h"

namespace sise {

struct FeatureStack {
  std::vector<Matrix> layers;  // each frames x dim
  double frame_stride_s = 0.02;

  int NumLayers() const { return static_cast<int>(layers.size()); }
  int NumFrames() const { return layers.empty() ? 0 : static_cast<int>(layers[0].rows()); }
  int Dim() const { return layers.empty() ? 0 : static_cast<int>(layers[0].cols()); }
};

/// Frames of a 20 ms-stride stream for a waveform: round(len / 320), >= 1.
int NumFeatureFrames(size_t num_samples);

/// Opaque per-utterance state kept between Extract and Backward.
struct BackboneCache {
  virtual ~BackboneCache() = default;
};

class FeatureProvider {
 public:
  virtual ~FeatureProvider() = default;
  virtual std::string Kind() const = 0;
  virtual int NumLayers() const = 0;
  virtual int Dim() const = 0;
  virtual nlohmann::json Config() const = 0;
  /// Throws InvalidInput unless the wave is 16 kHz.
  virtual FeatureStack Extract(const Waveform &wave,
                               std::unique_ptr<BackboneCache> *cache = nullptr) const = 0;
  /// Accumulates parameter gradients from per-layer output gradients.
  virtual void Backward(const BackboneCache &, const std::vector<Matrix> &) {}
  virtual void CollectParameters(std::vector<Parameter *> &) {}
  virtual bool Trainable() const { return false; }
  virtual std::unique_ptr<FeatureProvider> Clone() const = 0;
};

struct ToyBackboneConfig {
  int num_layers = 4;
  int dim = 32;           // also the filterbank band count
  int window = 640;       // 40 ms analysis window
  int fft_size = 1024;
  double min_hz = 60.0;
  double max_hz = 7800.0;
  uint64_t seed = 17;
};

void to_json(nlohmann::json &j, const ToyBackboneConfig &c);
void from_json(const nlohmann::json &j, ToyBackboneConfig &c);

/// Layer 0: log filterbank (log-spaced triangular bands) at 20 ms stride.
/// Layer l > 0: h_l = h_{l-1} + 0.5 tanh(h_{l-1} Q_l), with Q_l initialized
/// to seeded orthonormal matrices. Q_l are the only backbone parameters.
class ToyBackbone : public FeatureProvider {
 public:
  explicit ToyBackbone(ToyBackboneConfig config);

  std::string Kind() const override { return "toy"; }
  int NumLayers() const override { return config_.num_layers; }
  int Dim() const override { return config_.dim; }
  nlohmann::json Config() const override;
  FeatureStack Extract(const Waveform &wave,
                       std::unique_ptr<BackboneCache> *cache = nullptr) const override;
  void Backward(const BackboneCache &cache, const std::vector<Matrix> &grad_layers) override;
  void CollectParameters(std::vector<Parameter *> &out) override;
  bool Trainable() const override { return true; }
  std::unique_ptr<FeatureProvider> Clone() const override;

  /// The raw log filterbank features (layer 0).
  Matrix Filterbank(const Waveform &wave) const;

 private:
  ToyBackboneConfig config_;
  Matrix bands_;  // fft bins x dim triangular weights
  std::vector<Parameter> projections_;
};

struct ExternalBackboneConfig {
  /// Command with {wav} and {out} placeholders; it must write a feature
  /// stack file (see ReadFeatureStack) to {out}.
  std::string command;
  int num_layers = 25;
  int dim = 1024;
  int timeout_s = 600;
};

void to_json(nlohmann::json &j, const ExternalBackboneConfig &c);
void from_json(const nlohmann::json &j, ExternalBackboneConfig &c);

/// Adapter for a pretrained encoder run out of process. Not trainable here.
class ExternalBackbone : public FeatureProvider {
 public:
  explicit ExternalBackbone(ExternalBackboneConfig config) : config_(std::move(config)) {}
  std::string Kind() const override { return "external"; }
  int NumLayers() const override { return config_.num_layers; }
  int Dim() const override { return config_.dim; }
  nlohmann::json Config() const override;
  FeatureStack Extract(const Waveform &wave,
                       std::unique_ptr<BackboneCache> *cache = nullptr) const override;
  std::unique_ptr<FeatureProvider> Clone() const override;

 private:
  ExternalBackboneConfig config_;
};

/// Feature stack file: "SISEFEAT" magic, int32 layers, frames, dim, then
/// float32 little-endian values, layer-major then frame-major.
FeatureStack ReadFeatureStack(const std::string &path);
void WriteFeatureStack(const std::string &path, const FeatureStack &stack);

}  // namespace sise

#endif  // SISE_BACKBONE_H_
