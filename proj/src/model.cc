// src/model.cc

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

#include "sise/model.h"

#include <cmath>

#include "sise/digest.h"

namespace sise {

void ModelConfig::Validate() const {
  Require(backbone == "toy" || backbone == "external", ErrorKind::kInvalidInput,
          "backbone must be 'toy' or 'external', got '" + backbone + "'");
  Require(se_hidden > 0 && se_layers > 0 && si_hidden > 0 && si_layers > 0,
          ErrorKind::kInvalidInput, "head sizes and depths must be positive");
  geometry.Validate();
}

std::string ModelConfig::Digest() const {
  const nlohmann::json j = *this;
  return Sha256Hex(j.dump());
}

void to_json(nlohmann::json &j, const ModelConfig &c) {
  j = {{"backbone", c.backbone},
       {"toy", c.toy},
       {"external", c.external},
       {"geometry", c.geometry},
       {"se_hidden", c.se_hidden},
       {"se_layers", c.se_layers},
       {"si_hidden", c.si_hidden},
       {"si_layers", c.si_layers},
       {"share_layer_weights", c.share_layer_weights},
       {"seed", c.seed}};
}

void from_json(const nlohmann::json &j, ModelConfig &c) {
  c.backbone = j.value("backbone", c.backbone);
  if (j.contains("toy")) c.toy = j.at("toy").get<ToyBackboneConfig>();
  if (j.contains("external")) c.external = j.at("external").get<ExternalBackboneConfig>();
  if (j.contains("geometry")) c.geometry = j.at("geometry").get<SpectrogramGeometry>();
  c.se_hidden = j.value("se_hidden", c.se_hidden);
  c.se_layers = j.value("se_layers", c.se_layers);
  c.si_hidden = j.value("si_hidden", c.si_hidden);
  c.si_layers = j.value("si_layers", c.si_layers);
  c.share_layer_weights = j.value("share_layer_weights", c.share_layer_weights);
  c.seed = j.value("seed", c.seed);
}

RowVector LayerWeights(const Matrix &logits) {
  const RowVector a = logits.row(0);
  const RowVector e = (a.array() - a.maxCoeff()).exp().matrix();
  return e / e.sum();
}

Matrix WeightedSum(const FeatureStack &stack, const Matrix &logits) {
  Require(logits.rows() == 1 && logits.cols() == stack.NumLayers(), ErrorKind::kInvalidInput,
          "layer weight count " + std::to_string(logits.cols()) + " does not match " +
              std::to_string(stack.NumLayers()) + " layers");
  const RowVector w = LayerWeights(logits);
  Matrix out = Matrix::Zero(stack.NumFrames(), stack.Dim());
  for (int l = 0; l < stack.NumLayers(); ++l) out += w[l] * stack.layers[l];
  return out;
}

TrackNormalizer TrackNormalizer::Fit(const std::vector<Matrix> &tracks) {
  TrackNormalizer n;
  long count = 0;
  RowVector sum = RowVector::Zero(kNumTrackChannels);
  for (const Matrix &t : tracks) {
    sum += t.colwise().sum();
    count += t.rows();
  }
  Require(count >= 2, ErrorKind::kInvalidInput, "need at least two track frames to normalize");
  n.mean = sum / static_cast<double>(count);
  RowVector sq = RowVector::Zero(kNumTrackChannels);
  for (const Matrix &t : tracks) sq += (t.rowwise() - n.mean).array().square().matrix().colwise().sum();
  for (int c = 0; c < kNumTrackChannels; ++c) {
    const double sd = std::sqrt(sq[c] / static_cast<double>(count));
    n.scale[c] = sd > 1e-8 ? sd : 1.0;
  }
  return n;
}

Matrix TrackNormalizer::Normalize(const Matrix &channels) const {
  return ((channels.rowwise() - mean).array().rowwise() / scale.array()).matrix();
}

Matrix TrackNormalizer::Denormalize(const Matrix &normalized) const {
  return ((normalized.array().rowwise() * scale.array()).matrix().rowwise() + mean);
}

void to_json(nlohmann::json &j, const TrackNormalizer &n) {
  j = {{"mean", std::vector<double>(n.mean.data(), n.mean.data() + n.mean.size())},
       {"scale", std::vector<double>(n.scale.data(), n.scale.data() + n.scale.size())}};
}

void from_json(const nlohmann::json &j, TrackNormalizer &n) {
  const auto m = j.at("mean").get<std::vector<double>>();
  const auto s = j.at("scale").get<std::vector<double>>();
  Require(m.size() == kNumTrackChannels && s.size() == kNumTrackChannels,
          ErrorKind::kInvalidInput, "track normalizer needs 10 means and scales");
  for (int c = 0; c < kNumTrackChannels; ++c) {
    n.mean[c] = m[c];
    n.scale[c] = s[c];
  }
}

std::unique_ptr<FeatureProvider> MakeBackbone(const ModelConfig &config) {
  if (config.backbone == "external") return std::make_unique<ExternalBackbone>(config.external);
  return std::make_unique<ToyBackbone>(config.toy);
}

namespace {

Matrix SigmoidOf(const Matrix &x) { return x.unaryExpr([](double v) { return Sigmoid(v); }); }

// Unit-modulus phase factors of a spectrogram (1 where the bin is silent).
ComplexMatrix PhaseOf(const ComplexMatrix &s) {
  return s.unaryExpr([](const Complex &c) {
    const double m = std::abs(c);
    return m > 0.0 ? c / m : Complex(1.0, 0.0);
  });
}

Waveform Resynthesize(const ComplexMatrix &phase, const Matrix &compressed, const Matrix &mask,
                      const SpectrogramGeometry &geometry, size_t length) {
  ComplexSpectrogram out;
  out.geometry = geometry;
  const Matrix magnitude = (mask.array() * compressed.array()).unaryExpr(
      [](double c) { return std::expm1(c); });
  out.values = phase.array() * magnitude.cast<Complex>().array();
  return Istft(out, static_cast<long>(length));
}

void AddWeightedSumGrad(const std::vector<FeatureStack> &stacks, const std::vector<Matrix> &dfeat,
                        Parameter &logits, std::vector<std::vector<Matrix>> *dlayers) {
  const RowVector w = LayerWeights(logits.value);
  const int L = static_cast<int>(w.size());
  RowVector dw = RowVector::Zero(L);
  for (size_t b = 0; b < stacks.size(); ++b) {
    for (int l = 0; l < L; ++l) {
      dw[l] += (dfeat[b].array() * stacks[b].layers[l].array()).sum();
      if (dlayers) (*dlayers)[b][l] += w[l] * dfeat[b];
    }
  }
  const double mean = w.dot(dw);
  logits.grad.row(0) += (w.array() * (dw.array() - mean)).matrix();
}

}  // namespace

SiseModel::SiseModel(ModelConfig config) : config_(std::move(config)) {
  config_.Validate();
  backbone_ = MakeBackbone(config_);
  const int L = backbone_->NumLayers();
  const int D = backbone_->Dim();
  const int bins = config_.geometry.NumBins();
  se_logits_ = Parameter("se.layer_logits", 1, L);
  si_logits_ = Parameter("si.layer_logits", 1, L);
  se_rnn_ = BiGruStack("se.rnn", D + bins, config_.se_hidden, config_.se_layers);
  se_out_ = Linear("se.out", 2 * config_.se_hidden, bins);
  se_residual_ = Linear("se.residual", D, bins);
  si_rnn_a_ = BiGruStack("si.a.rnn", D, config_.si_hidden, config_.si_layers);
  si_out_a_ = Linear("si.a.out", 2 * config_.si_hidden, kTaskAChannels);
  si_rnn_b_ = BiGruStack("si.b.rnn", D, config_.si_hidden, config_.si_layers);
  si_out_b_ = Linear("si.b.out", 2 * config_.si_hidden, kTaskBChannels);

  std::mt19937_64 rng(config_.seed);
  se_rnn_.Init(rng);
  se_out_.Init(rng);
  se_residual_.Init(rng);
  si_rnn_a_.Init(rng);
  si_out_a_.Init(rng);
  si_rnn_b_.Init(rng);
  si_out_b_.Init(rng);
}

SiseModel::SiseModel(const SiseModel &other)
    : config_(other.config_),
      backbone_(other.backbone_->Clone()),
      se_logits_(other.se_logits_),
      si_logits_(other.si_logits_),
      se_rnn_(other.se_rnn_),
      se_out_(other.se_out_),
      se_residual_(other.se_residual_),
      si_rnn_a_(other.si_rnn_a_),
      si_rnn_b_(other.si_rnn_b_),
      si_out_a_(other.si_out_a_),
      si_out_b_(other.si_out_b_),
      backbone_frozen_(other.backbone_frozen_),
      stage_(other.stage_),
      normalizer_(other.normalizer_) {}

SiseModel &SiseModel::operator=(const SiseModel &other) {
  if (this != &other) {
    SiseModel copy(other);
    *this = std::move(copy);
  }
  return *this;
}

const Matrix &SiseModel::si_layer_logits() const {
  return config_.share_layer_weights ? se_logits_.value : si_logits_.value;
}

FeatureStack SiseModel::ExtractFeatures(const Waveform &wave) const {
  return backbone_->Extract(wave);
}

struct SiseModel::SeCache {
  BiGruStack::Cache rnn;
  Matrix input;   // (T*B) x (D + bins), time-major
  Matrix hidden;  // (T*B) x 2H
};

Matrix SiseModel::SeMaskLogits(const std::vector<Matrix> &features,
                               const std::vector<Matrix> &compressed, int frames,
                               SeCache *cache) const {
  const int B = static_cast<int>(features.size());
  const int D = backbone_->Dim();
  const int bins = config_.geometry.NumBins();
  Matrix x(static_cast<long>(frames) * B, D + bins);
  for (int t = 0; t < frames; ++t) {
    for (int b = 0; b < B; ++b) {
      const long row = static_cast<long>(t) * B + b;
      const int f = FeatureFrameForStftFrame(t, static_cast<int>(features[b].rows()));
      x.row(row).head(D) = features[b].row(f);
      x.row(row).tail(bins) = compressed[b].row(t);
    }
  }
  Matrix h = se_rnn_.Forward(x, B, cache ? &cache->rnn : nullptr);
  Matrix z = se_out_.Forward(h);
  z += se_residual_.Forward(x.leftCols(D));
  if (cache) {
    cache->input = std::move(x);
    cache->hidden = std::move(h);
  }
  return z;
}

SeOutput SiseModel::Enhance(const Waveform &noisy, const Matrix *mask_override) const {
  Require(noisy.sample_rate == kSampleRate, ErrorKind::kInvalidInput,
          "enhancement expects 16 kHz audio");
  Require(static_cast<long>(noisy.size()) > config_.geometry.fft_size / 2, ErrorKind::kInvalidInput,
          "input shorter than one STFT frame");
  const ComplexSpectrogram spec = Stft(noisy, config_.geometry);
  SeOutput out;
  out.compressed_noisy = Compress(spec);
  const Matrix &c = out.compressed_noisy.values;
  if (mask_override) {
    Require(mask_override->rows() == c.rows() && mask_override->cols() == c.cols(),
            ErrorKind::kInvalidInput, "mask override shape does not match the spectrogram");
    out.mask = *mask_override;
  } else {
    const Matrix feats = WeightedSum(ExtractFeatures(noisy), se_logits_.value);
    out.mask = SigmoidOf(SeMaskLogits({feats}, {c}, spec.NumFrames(), nullptr));
  }
  out.enhanced =
      Resynthesize(PhaseOf(spec.values), c, out.mask, config_.geometry, noisy.size());
  return out;
}

ArticulatoryTrack SiseModel::Invert(const Waveform &wave) const {
  const Matrix feats = WeightedSum(ExtractFeatures(wave), si_layer_logits());
  Matrix pred(feats.rows(), kNumTrackChannels);
  pred.leftCols(kTaskAChannels) = si_out_a_.Forward(si_rnn_a_.Forward(feats, 1, nullptr));
  pred.rightCols(kTaskBChannels) = si_out_b_.Forward(si_rnn_b_.Forward(feats, 1, nullptr));
  ArticulatoryTrack track;
  track.channels = normalizer_.Denormalize(pred);
  return track;
}

LossReport SiseModel::ForwardBackward(const ModelBatch &batch, const ForwardOptions &options,
                                      const LossConfig &loss_config) {
  const int B = static_cast<int>(batch.input.size());
  Require(B > 0, ErrorKind::kInvalidInput, "empty batch");
  const size_t n = batch.input[0].size();
  for (const Waveform &w : batch.input)
    Require(w.size() == n && w.sample_rate == kSampleRate, ErrorKind::kInvalidInput,
            "batch waveforms must share one length and the 16 kHz rate");
  const bool backbone_grad = options.backward && !backbone_frozen_ && backbone_->Trainable();
  const int L = backbone_->NumLayers();
  const int D = backbone_->Dim();

  std::vector<FeatureStack> stacks(B);
  std::vector<std::unique_ptr<BackboneCache>> bcache(B);
  for (int b = 0; b < B; ++b)
    stacks[b] = backbone_->Extract(batch.input[b], backbone_grad ? &bcache[b] : nullptr);
  const int F = stacks[0].NumFrames();
  std::vector<std::vector<Matrix>> dlayers;
  if (backbone_grad) dlayers.assign(B, std::vector<Matrix>(L, Matrix::Zero(F, D)));
  auto *dl = backbone_grad ? &dlayers : nullptr;

  LossReport report;
  if (options.se) {
    Require(static_cast<int>(batch.clean.size()) == B, ErrorKind::kInvalidInput,
            "SE loss needs a clean reference per input");
    const SpectrogramGeometry &geom = config_.geometry;
    const int bins = geom.NumBins();
    std::vector<Matrix> feats(B), comp(B);
    std::vector<ComplexMatrix> phase(B);
    for (int b = 0; b < B; ++b) {
      Require(batch.clean[b].size() == n, ErrorKind::kInvalidInput, "clean/input length mismatch");
      feats[b] = WeightedSum(stacks[b], se_logits_.value);
      const ComplexSpectrogram spec = Stft(batch.input[b], geom);
      comp[b] = Compress(spec.Magnitude());
      phase[b] = PhaseOf(spec.values);
    }
    const int T = static_cast<int>(comp[0].rows());
    SeCache cache;
    const Matrix z = SeMaskLogits(feats, comp, T, options.backward ? &cache : nullptr);
    const Matrix m = SigmoidOf(z);
    Matrix dz;
    if (options.backward) dz.resize(z.rows(), z.cols());
    double wsdr = 0.0, cms = 0.0, mrs = 0.0;
    for (int b = 0; b < B; ++b) {
      Matrix mask(T, bins);
      for (int t = 0; t < T; ++t) mask.row(t) = m.row(static_cast<long>(t) * B + b);
      const Waveform est = Resynthesize(phase[b], comp[b], mask, geom, n);
      std::vector<double> g1, g2, g3;
      const bool bw = options.backward;
      wsdr += WsdrLoss(batch.input[b].samples, batch.clean[b].samples, est.samples,
                       bw ? &g1 : nullptr);
      cms += CmsLoss(batch.clean[b].samples, est.samples, loss_config.geometry, bw ? &g2 : nullptr);
      mrs += MrsLoss(batch.clean[b].samples, est.samples, loss_config, bw ? &g3 : nullptr);
      if (!bw) continue;
      std::vector<double> g(n);
      for (size_t i = 0; i < n; ++i) g[i] = (g1[i] + g2[i] + g3[i]) / B;
      const ComplexMatrix dy = IstftAdjoint(g, geom, T);
      for (int t = 0; t < T; ++t) {
        const long row = static_cast<long>(t) * B + b;
        for (int k = 0; k < bins; ++k) {
          const double c = comp[b](t, k);
          const double mk = mask(t, k);
          const Complex u = phase[b](t, k);
          const double da = (std::conj(u) * dy(t, k)).real();
          dz(row, k) = da * std::exp(mk * c) * c * mk * (1.0 - mk);
        }
      }
    }
    report.wsdr = wsdr / B;
    report.cms = cms / B;
    report.mrs = mrs / B;
    if (options.backward) {
      const Matrix dh = se_out_.Backward(cache.hidden, dz);
      const Matrix dx = se_rnn_.Backward(cache.rnn, dh);
      const Matrix du = dx.leftCols(D) + se_residual_.Backward(cache.input.leftCols(D), dz);
      std::vector<Matrix> dfeat(B, Matrix::Zero(F, D));
      for (int t = 0; t < T; ++t)
        for (int b = 0; b < B; ++b)
          dfeat[b].row(FeatureFrameForStftFrame(t, F)) += du.row(static_cast<long>(t) * B + b);
      AddWeightedSumGrad(stacks, dfeat, se_logits_, dl);
    }
  }

  if (options.si) {
    Require(static_cast<int>(batch.targets.size()) == B, ErrorKind::kInvalidInput,
            "SI loss needs a target track per input");
    Parameter &logits = config_.share_layer_weights ? se_logits_ : si_logits_;
    Matrix x(static_cast<long>(F) * B, D);
    Matrix target(static_cast<long>(F) * B, kNumTrackChannels);
    for (int b = 0; b < B; ++b) {
      Require(batch.targets[b].rows() == F && batch.targets[b].cols() == kNumTrackChannels,
              ErrorKind::kInvalidInput, "target track frames do not match feature frames");
      const Matrix feats = WeightedSum(stacks[b], logits.value);
      const Matrix norm = normalizer_.Normalize(batch.targets[b]);
      for (int f = 0; f < F; ++f) {
        x.row(static_cast<long>(f) * B + b) = feats.row(f);
        target.row(static_cast<long>(f) * B + b) = norm.row(f);
      }
    }
    BiGruStack::Cache ca, cb;
    const Matrix ha = si_rnn_a_.Forward(x, B, options.backward ? &ca : nullptr);
    const Matrix hb = si_rnn_b_.Forward(x, B, options.backward ? &cb : nullptr);
    const Matrix ya = si_out_a_.Forward(ha);
    const Matrix yb = si_out_b_.Forward(hb);
    Matrix ga, gb;
    const SiTaskResult ra = SiTaskLoss(ya, target.leftCols(kTaskAChannels), loss_config,
                                       options.backward ? &ga : nullptr);
    const SiTaskResult rb = SiTaskLoss(yb, target.rightCols(kTaskBChannels), loss_config,
                                       options.backward ? &gb : nullptr);
    report.si_task_a = ra.loss;
    report.si_task_b = rb.loss;
    report.channel_pc = ra.pc;
    report.channel_pc.insert(report.channel_pc.end(), rb.pc.begin(), rb.pc.end());
    report.channel_rmse = ra.rmse;
    report.channel_rmse.insert(report.channel_rmse.end(), rb.rmse.begin(), rb.rmse.end());
    if (options.backward) {
      Matrix dx = si_rnn_a_.Backward(ca, si_out_a_.Backward(ha, ga));
      dx += si_rnn_b_.Backward(cb, si_out_b_.Backward(hb, gb));
      std::vector<Matrix> dfeat(B, Matrix(F, D));
      for (int f = 0; f < F; ++f)
        for (int b = 0; b < B; ++b) dfeat[b].row(f) = dx.row(static_cast<long>(f) * B + b);
      AddWeightedSumGrad(stacks, dfeat, logits, dl);
    }
  }

  report.total = 0.0;
  if (report.HasSe()) report.total += report.SeTotal();
  if (report.HasSi()) report.total += report.SiTotal();
  if (backbone_grad)
    for (int b = 0; b < B; ++b) backbone_->Backward(*bcache[b], dlayers[b]);
  return report;
}

void SiseModel::CollectAll(std::vector<Parameter *> &out) {
  out.push_back(&se_logits_);
  out.push_back(&si_logits_);
  se_rnn_.Collect(out);
  se_out_.Collect(out);
  se_residual_.Collect(out);
  si_rnn_a_.Collect(out);
  si_out_a_.Collect(out);
  si_rnn_b_.Collect(out);
  si_out_b_.Collect(out);
  backbone_->CollectParameters(out);
}

std::vector<Parameter *> SiseModel::AllParameters() {
  std::vector<Parameter *> out;
  CollectAll(out);
  return out;
}

std::vector<const Parameter *> SiseModel::AllParameters() const {
  std::vector<Parameter *> tmp;
  const_cast<SiseModel *>(this)->CollectAll(tmp);
  return {tmp.begin(), tmp.end()};
}

std::vector<Parameter *> SiseModel::BackboneParameters() {
  std::vector<Parameter *> out;
  backbone_->CollectParameters(out);
  return out;
}

std::vector<Parameter *> SiseModel::TrainableParameters(const ForwardOptions &heads) {
  std::vector<Parameter *> out;
  if (heads.se) {
    out.push_back(&se_logits_);
    se_rnn_.Collect(out);
    se_out_.Collect(out);
    se_residual_.Collect(out);
  }
  if (heads.si) {
    if (!config_.share_layer_weights) out.push_back(&si_logits_);
    else if (!heads.se) out.push_back(&se_logits_);
    si_rnn_a_.Collect(out);
    si_out_a_.Collect(out);
    si_rnn_b_.Collect(out);
    si_out_b_.Collect(out);
  }
  if (!backbone_frozen_) backbone_->CollectParameters(out);
  return out;
}

void SiseModel::ZeroGrad() {
  for (Parameter *p : AllParameters()) p->ZeroGrad();
}

std::string SiseModel::ParameterDigest(const std::string &prefix) const {
  Sha256 h;
  for (const Parameter *p : AllParameters()) {
    if (p->name.compare(0, prefix.size(), prefix) != 0) continue;
    h.Update(p->name);
    h.Update(std::span<const double>(p->value.data(), static_cast<size_t>(p->value.size())));
  }
  return h.Finish();
}

std::vector<Matrix> SiseModel::SnapshotValues() const {
  std::vector<Matrix> out;
  for (const Parameter *p : AllParameters()) out.push_back(p->value);
  return out;
}

void SiseModel::RestoreValues(const std::vector<Matrix> &values) {
  const std::vector<Parameter *> params = AllParameters();
  Require(values.size() == params.size(), ErrorKind::kInvalidState,
          "parameter snapshot does not match the model");
  for (size_t i = 0; i < params.size(); ++i) params[i]->value = values[i];
}

}  // namespace sise
