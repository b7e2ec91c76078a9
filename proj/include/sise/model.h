// sise/model.h

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

#ifndef SISE_MODEL_H_
#define SISE_MODEL_H_

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sise/backbone.h"
#include "sise/losses.h"
#include "sise/nnet.h"
#include "sise/signal.h"
#include "sise/track.h"

namespace sise {

inline constexpr int kTaskAChannels = 6;  // LA .. TTCD
inline constexpr int kTaskBChannels = 4;  // VEL, Per, Aper, F0

struct ModelConfig {
  std::string backbone = "toy";  // "toy" or "external"
  ToyBackboneConfig toy;
  ExternalBackboneConfig external;
  SpectrogramGeometry geometry = SpectrogramGeometry::Canonical();
  int se_hidden = 256;
  int se_layers = 2;
  int si_hidden = 256;
  int si_layers = 2;
  bool share_layer_weights = false;
  uint64_t seed = 0;

  void Validate() const;
  /// SHA-256 of the canonical JSON form.
  std::string Digest() const;
};

void to_json(nlohmann::json &j, const ModelConfig &c);
void from_json(const nlohmann::json &j, ModelConfig &c);

/// Softmax of a logit row vector.
RowVector LayerWeights(const Matrix &logits);

/// sum_l softmax(logits)_l * stack.layers[l]; throws InvalidInput on a
/// length mismatch.
Matrix WeightedSum(const FeatureStack &stack, const Matrix &logits);

/// Feature frame feeding STFT frame t: nearest-neighbour repetition by two,
/// holding the last feature frame when the STFT stream is longer.
inline int FeatureFrameForStftFrame(int t, int num_feature_frames) {
  return std::min(t / 2, num_feature_frames - 1);
}

/// Per-channel affine map between physical track units and the unit-variance
/// space the SI head predicts in.
struct TrackNormalizer {
  RowVector mean = RowVector::Zero(kNumTrackChannels);
  RowVector scale = RowVector::Ones(kNumTrackChannels);

  static TrackNormalizer Fit(const std::vector<Matrix> &tracks);
  Matrix Normalize(const Matrix &channels) const;
  Matrix Denormalize(const Matrix &normalized) const;
};

void to_json(nlohmann::json &j, const TrackNormalizer &n);
void from_json(const nlohmann::json &j, TrackNormalizer &n);

struct SeOutput {
  Waveform enhanced;
  Matrix mask;               // frames x bins, in (0, 1)
  CompressedMagnitude compressed_noisy;
};

/// A training batch; every waveform has the same length.
struct ModelBatch {
  std::vector<Waveform> input;   // what the model hears (noisy or clean)
  std::vector<Waveform> clean;   // SE reference, may be empty when SE is off
  std::vector<Matrix> targets;   // physical-unit tracks, frames x 10; may be empty
};

struct ForwardOptions {
  bool se = true;
  bool si = true;
  bool backward = false;  // accumulate parameter gradients
};

class SiseModel {
 public:
  explicit SiseModel(ModelConfig config);
  SiseModel(const SiseModel &other);
  SiseModel &operator=(const SiseModel &other);
  SiseModel(SiseModel &&) = default;
  SiseModel &operator=(SiseModel &&) = default;

  const ModelConfig &config() const { return config_; }
  const FeatureProvider &backbone() const { return *backbone_; }

  bool backbone_frozen() const { return backbone_frozen_; }
  void set_backbone_frozen(bool frozen) { backbone_frozen_ = frozen; }
  int stage() const { return stage_; }
  void set_stage(int stage) { stage_ = stage; }
  const TrackNormalizer &normalizer() const { return normalizer_; }
  void set_normalizer(const TrackNormalizer &n) { normalizer_ = n; }

  FeatureStack ExtractFeatures(const Waveform &wave) const;

  const Matrix &se_layer_logits() const { return se_logits_.value; }
  const Matrix &si_layer_logits() const;

  /// Enhancement path. `mask_override` (frames x bins) replaces the
  /// predicted mask when given.
  SeOutput Enhance(const Waveform &noisy, const Matrix *mask_override = nullptr) const;

  /// Inversion path; returns a 50 Hz track in physical units.
  ArticulatoryTrack Invert(const Waveform &wave) const;

  /// Forward pass over a batch with the losses of the selected heads; with
  /// options.backward it also accumulates gradients into every parameter
  /// that is not frozen.
  LossReport ForwardBackward(const ModelBatch &batch, const ForwardOptions &options,
                             const LossConfig &loss_config);

  /// Every parameter, backbone included, in a fixed order.
  std::vector<Parameter *> AllParameters();
  std::vector<const Parameter *> AllParameters() const;
  /// Parameters an optimizer step may touch given the frozen flag and the
  /// heads in use.
  std::vector<Parameter *> TrainableParameters(const ForwardOptions &heads);
  std::vector<Parameter *> BackboneParameters();
  void ZeroGrad();

  /// SHA-256 over names and values of parameters whose name starts with prefix.
  std::string ParameterDigest(const std::string &prefix = "") const;

  std::vector<Matrix> SnapshotValues() const;
  void RestoreValues(const std::vector<Matrix> &values);

 private:
  struct SeCache;
  Matrix SeMaskLogits(const std::vector<Matrix> &features, const std::vector<Matrix> &compressed,
                      int frames, SeCache *cache) const;
  void CollectAll(std::vector<Parameter *> &out);

  ModelConfig config_;
  std::unique_ptr<FeatureProvider> backbone_;
  Parameter se_logits_, si_logits_;
  BiGruStack se_rnn_;
  Linear se_out_, se_residual_;
  BiGruStack si_rnn_a_, si_rnn_b_;
  Linear si_out_a_, si_out_b_;
  bool backbone_frozen_ = true;
  int stage_ = 1;
  TrackNormalizer normalizer_;
};

std::unique_ptr<FeatureProvider> MakeBackbone(const ModelConfig &config);

}  // namespace sise

#endif  // SISE_MODEL_H_
