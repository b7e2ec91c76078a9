// src/trainer.cc

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

#include "sise/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "sise/augment.h"
#include "sise/checkpoint.h"
#include "sise/digest.h"
#include "sise/track.h"
#include "sise/wav-io.h"

namespace sise {

namespace fs = std::filesystem;

void TrainConfig::Validate() const {
  Require(stage1_lr > 0.0 && stage2_lr > 0.0 && stage2_lr < stage1_lr, ErrorKind::kInvalidInput,
          "learning rates must satisfy 0 < stage2_lr < stage1_lr");
  Require(patience >= 1, ErrorKind::kInvalidInput, "patience must be at least 1");
  Require(max_epochs >= 1, ErrorKind::kInvalidInput, "max_epochs must be at least 1");
  Require(batch.batch_size >= 1, ErrorKind::kInvalidInput, "batch_size must be at least 1");
  Require(only_stage >= 0 && only_stage <= 2, ErrorKind::kInvalidInput, "stage must be 1 or 2");
  model.Validate();
  loss.Validate();
}

std::string TrainConfig::Digest() const {
  nlohmann::json j = *this;
  j.erase("run_dir");
  return Sha256Hex(j.dump());
}

void to_json(nlohmann::json &j, const TrainConfig &c) {
  j = {{"scenario", ScenarioName(c.scenario)},
       {"stage1_lr", c.stage1_lr},
       {"stage2_lr", c.stage2_lr},
       {"optimizer",
        {{"beta1", c.optimizer.beta1},
         {"beta2", c.optimizer.beta2},
         {"eps", c.optimizer.eps},
         {"weight_decay", c.optimizer.weight_decay},
         {"grad_clip", c.optimizer.grad_clip}}},
       {"patience", c.patience},
       {"max_epochs", c.max_epochs},
       {"batch", {{"batch_size", c.batch.batch_size}, {"max_batch_seconds", c.batch.max_batch_seconds}}},
       {"seed", c.seed},
       {"only_stage", c.only_stage},
       {"manifest", c.manifest},
       {"run_dir", c.run_dir},
       {"stage1_checkpoint", c.stage1_checkpoint},
       {"se_base_checkpoint", c.se_base_checkpoint},
       {"cache_enhanced", c.cache_enhanced},
       {"model", c.model},
       {"loss", c.loss}};
}

void from_json(const nlohmann::json &j, TrainConfig &c) {
  if (j.contains("scenario")) c.scenario = ParseScenario(j.at("scenario").get<std::string>());
  c.stage1_lr = j.value("stage1_lr", c.stage1_lr);
  c.stage2_lr = j.value("stage2_lr", c.stage2_lr);
  if (j.contains("optimizer")) {
    const auto &o = j.at("optimizer");
    c.optimizer.beta1 = o.value("beta1", c.optimizer.beta1);
    c.optimizer.beta2 = o.value("beta2", c.optimizer.beta2);
    c.optimizer.eps = o.value("eps", c.optimizer.eps);
    c.optimizer.weight_decay = o.value("weight_decay", c.optimizer.weight_decay);
    c.optimizer.grad_clip = o.value("grad_clip", c.optimizer.grad_clip);
  }
  c.patience = j.value("patience", c.patience);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  if (j.contains("batch")) {
    c.batch.batch_size = j.at("batch").value("batch_size", c.batch.batch_size);
    c.batch.max_batch_seconds = j.at("batch").value("max_batch_seconds", c.batch.max_batch_seconds);
  }
  c.seed = j.value("seed", c.seed);
  c.only_stage = j.value("only_stage", c.only_stage);
  c.manifest = j.value("manifest", c.manifest);
  c.run_dir = j.value("run_dir", c.run_dir);
  c.stage1_checkpoint = j.value("stage1_checkpoint", c.stage1_checkpoint);
  c.se_base_checkpoint = j.value("se_base_checkpoint", c.se_base_checkpoint);
  c.cache_enhanced = j.value("cache_enhanced", c.cache_enhanced);
  if (j.contains("model")) c.model = j.at("model").get<ModelConfig>();
  if (j.contains("loss")) c.loss = j.at("loss").get<LossConfig>();
}

EarlyStopper::EarlyStopper(int patience) : patience_(patience) {
  Require(patience >= 1, ErrorKind::kInvalidInput, "patience must be at least 1");
}

bool EarlyStopper::Update(double dev_loss) {
  ++epochs_;
  improved_ = dev_loss < best_loss_;
  if (improved_) {
    best_loss_ = dev_loss;
    best_epoch_ = epochs_;
    stale_ = 0;
  } else {
    ++stale_;
  }
  return stale_ >= patience_;
}

void to_json(nlohmann::json &j, const RunRecord &r) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const EpochRecord &e : r.epochs)
    epochs.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"dev_loss", e.dev_loss}});
  j = {{"scenario", r.scenario},
       {"stage", r.stage},
       {"seed", r.seed},
       {"config_digest", r.config_digest},
       {"initial_dev_loss", r.initial_dev_loss},
       {"epochs", epochs},
       {"best_epoch", r.best_epoch},
       {"best_dev_loss", r.best_dev_loss},
       {"stopped_early", r.stopped_early},
       {"wall_clock_s", r.wall_clock_s},
       {"best_checkpoint", r.best_checkpoint}};
}

namespace {

Matrix FitTrackFrames(const Matrix &track, int frames, const std::string &key) {
  Require(std::abs(track.rows() - frames) <= 1, ErrorKind::kCorruptEntry,
          key + ": track has " + std::to_string(track.rows()) + " frames but the audio implies " +
              std::to_string(frames));
  Matrix out(frames, track.cols());
  for (int f = 0; f < frames; ++f) out.row(f) = track.row(std::min<long>(f, track.rows() - 1));
  return out;
}

}  // namespace

std::vector<TrainItem> LoadItems(const CorpusManifest &manifest, Split split, Scenario scenario) {
  const bool augmented = scenario != Scenario::kSiOnly;
  std::vector<TrainItem> items;
  for (const ManifestEntry &e : manifest.Select(split, true, augmented)) {
    TrainItem item;
    item.key = e.Key();
    item.clean = ReadWavAt16k(manifest.Resolve(e.clean_path));
    if (e.IsAugmented()) {
      item.input = ReadWavAt16k(manifest.Resolve(*e.noisy_path));
      Require(item.input.size() == item.clean.size(), ErrorKind::kCorruptEntry,
              item.key + ": noisy and clean audio lengths differ");
      for (double &s : item.clean.samples) s *= e.mix_gain;
    } else {
      item.input = item.clean;
    }
    const ArticulatoryTrack track = ReadTrack(manifest.Resolve(e.track_path));
    item.track = FitTrackFrames(track.channels, NumFeatureFrames(item.input.size()), item.key);
    items.push_back(std::move(item));
  }
  return items;
}

BatchIterator::BatchIterator(std::vector<double> durations_s, BatchPolicy policy, uint64_t seed)
    : durations_(std::move(durations_s)), policy_(policy), seed_(seed) {
  Require(policy_.batch_size >= 1, ErrorKind::kInvalidInput, "batch_size must be at least 1");
}

std::vector<std::vector<size_t>> BatchIterator::Epoch(int epoch, bool shuffle) const {
  std::vector<size_t> order(durations_.size());
  std::iota(order.begin(), order.end(), size_t{0});
  if (shuffle) {
    std::mt19937_64 rng(DeriveSeed(seed_, "epoch-" + std::to_string(epoch)));
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<std::vector<size_t>> batches;
  std::vector<size_t> current;
  double seconds = 0.0;
  for (size_t i : order) {
    const bool over_budget = policy_.max_batch_seconds > 0.0 && !current.empty() &&
                             seconds + durations_[i] > policy_.max_batch_seconds;
    if (static_cast<int>(current.size()) == policy_.batch_size || over_budget) {
      batches.push_back(std::move(current));
      current.clear();
      seconds = 0.0;
    }
    current.push_back(i);
    seconds += durations_[i];
  }
  if (!current.empty()) batches.push_back(std::move(current));
  return batches;
}

ModelBatch AssembleBatch(const std::vector<TrainItem> &items, const std::vector<size_t> &indices) {
  Require(!indices.empty(), ErrorKind::kInvalidInput, "empty batch");
  size_t len = items[indices[0]].input.size();
  for (size_t i : indices) len = std::min(len, items[i].input.size());
  const int frames = NumFeatureFrames(len);
  ModelBatch batch;
  for (size_t i : indices) {
    const TrainItem &it = items[i];
    batch.input.emplace_back(std::vector<double>(it.input.samples.begin(),
                                                 it.input.samples.begin() + len));
    batch.clean.emplace_back(std::vector<double>(it.clean.samples.begin(),
                                                 it.clean.samples.begin() + len));
    batch.targets.push_back(it.track.rows() >= frames ? Matrix(it.track.topRows(frames))
                                                      : FitTrackFrames(it.track, frames, it.key));
  }
  return batch;
}

MetricsLog::MetricsLog(const std::string &path) : path_(path) {}

void MetricsLog::Write(const nlohmann::json &record) {
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::app);
  Require(static_cast<bool>(out), ErrorKind::kIoError, "cannot append to " + path_);
  out << record.dump() << '\n';
}

namespace {

ForwardOptions HeadsFor(Scenario s) {
  ForwardOptions o;
  o.se = ScenarioTrainsSe(s);
  o.si = ScenarioTrainsSi(s);
  return o;
}

std::vector<double> Durations(const std::vector<TrainItem> &items) {
  std::vector<double> d;
  for (const TrainItem &it : items) d.push_back(it.input.DurationSeconds());
  return d;
}

}  // namespace

double EvaluateLoss(SiseModel &model, const std::vector<TrainItem> &items, const TrainConfig &config) {
  Require(!items.empty(), ErrorKind::kInvalidInput, "no dev items to evaluate");
  const BatchIterator it(Durations(items), config.batch, config.seed);
  const ForwardOptions heads = HeadsFor(config.scenario);
  double sum = 0.0;
  size_t count = 0;
  for (const auto &idx : it.Epoch(0, false)) {
    const LossReport r = model.ForwardBackward(AssembleBatch(items, idx), heads, config.loss);
    sum += ComposeTotal(r, config.scenario) * static_cast<double>(idx.size());
    count += idx.size();
  }
  return sum / static_cast<double>(count);
}

RunRecord RunStage(SiseModel &model, const TrainConfig &config, int stage, const StageData &data,
                   MetricsLog *log) {
  Require(stage == 1 || stage == 2, ErrorKind::kInvalidInput, "stage must be 1 or 2");
  Require(!data.train.empty(), ErrorKind::kInvalidInput, "no training items");
  const auto start = std::chrono::steady_clock::now();
  model.set_backbone_frozen(stage == 1);
  model.set_stage(stage);
  AdamWConfig opt = config.optimizer;
  opt.lr = stage == 1 ? config.stage1_lr : config.stage2_lr;
  AdamW optimizer(opt);
  const ForwardOptions heads = HeadsFor(config.scenario);
  ForwardOptions train_heads = heads;
  train_heads.backward = true;

  RunRecord rec;
  rec.scenario = ScenarioName(config.scenario);
  rec.stage = stage;
  rec.seed = config.seed;
  rec.config_digest = config.Digest();
  rec.initial_dev_loss = EvaluateLoss(model, data.dev, config);
  if (!config.run_dir.empty())
    rec.best_checkpoint = (fs::path(config.run_dir) / ("best-stage" + std::to_string(stage) + ".ckpt")).string();
  if (log)
    log->Write({{"event", "stage_start"}, {"stage", stage}, {"lr", opt.lr},
                {"dev_loss", rec.initial_dev_loss}});

  const BatchIterator batches(Durations(data.train), config.batch,
                              DeriveSeed(config.seed, "stage-" + std::to_string(stage)));
  EarlyStopper stopper(config.patience);
  std::vector<Matrix> best = model.SnapshotValues();
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    double train_sum = 0.0;
    size_t train_count = 0;
    int step = 0;
    for (const auto &idx : batches.Epoch(epoch - 1)) {
      model.ZeroGrad();
      const LossReport r = model.ForwardBackward(AssembleBatch(data.train, idx), train_heads, config.loss);
      optimizer.Step(model.TrainableParameters(heads));
      const double total = ComposeTotal(r, config.scenario);
      train_sum += total * static_cast<double>(idx.size());
      train_count += idx.size();
      if (log)
        log->Write({{"event", "step"}, {"stage", stage}, {"epoch", epoch}, {"step", step++},
                    {"batch", idx.size()}, {"loss", r}});
    }
    EpochRecord e{epoch, train_sum / static_cast<double>(train_count),
                  EvaluateLoss(model, data.dev, config)};
    rec.epochs.push_back(e);
    const bool stop = stopper.Update(e.dev_loss);
    if (stopper.improved()) {
      best = model.SnapshotValues();
      if (!rec.best_checkpoint.empty())
        SaveCheckpoint(model, rec.best_checkpoint, {{"epoch", epoch}, {"dev_loss", e.dev_loss}});
    }
    if (log)
      log->Write({{"event", "epoch"}, {"stage", stage}, {"epoch", epoch},
                  {"train_loss", e.train_loss}, {"dev_loss", e.dev_loss},
                  {"best_epoch", stopper.best_epoch()}});
    if (stop) {
      rec.stopped_early = true;
      break;
    }
  }
  model.RestoreValues(best);
  rec.best_epoch = stopper.best_epoch();
  rec.best_dev_loss = stopper.best_loss();
  rec.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (log)
    log->Write({{"event", "stage_end"}, {"stage", stage}, {"best_epoch", rec.best_epoch},
                {"best_dev_loss", rec.best_dev_loss}, {"epochs_run", rec.epochs.size()}});
  return rec;
}

void EnhanceInputs(const SiseModel &enhancer, std::vector<TrainItem> &items) {
  for (TrainItem &it : items) it.input = enhancer.Enhance(it.input).enhanced;
}

namespace {

// With an enhancer (SISE-P), every input becomes the frozen SE-Base output.
// Uncached runs recompute it at the start of each stage; cached runs once.
StageData PrepareData(const TrainConfig &config, const CorpusManifest &manifest,
                      const std::optional<SiseModel> &enhancer) {
  StageData data;
  data.train = LoadItems(manifest, Split::kTrain, config.scenario);
  data.dev = LoadItems(manifest, Split::kDev, config.scenario);
  Require(!data.train.empty(), ErrorKind::kInvalidInput, "manifest has no usable train entries");
  Require(!data.dev.empty(), ErrorKind::kInvalidInput, "manifest has no usable dev entries");
  if (enhancer) {
    EnhanceInputs(*enhancer, data.train);
    EnhanceInputs(*enhancer, data.dev);
  }
  return data;
}

}  // namespace

TrainResult TrainScenario(const TrainConfig &config) {
  config.Validate();
  const CorpusManifest manifest = ReadManifest(config.manifest);
  manifest.Validate();

  std::optional<SiseModel> enhancer;
  if (config.scenario == Scenario::kSisePipeline) {
    Require(!config.se_base_checkpoint.empty() && fs::exists(config.se_base_checkpoint),
            ErrorKind::kInvalidState, "SISE-P needs a trained SE-Base checkpoint (se_base_checkpoint)");
    enhancer.emplace(LoadCheckpoint(config.se_base_checkpoint));
  }

  std::optional<SiseModel> model;
  if (config.only_stage == 2) {
    Require(!config.stage1_checkpoint.empty() && fs::exists(config.stage1_checkpoint),
            ErrorKind::kInvalidState, "stage 2 needs a stage-1 checkpoint (stage1_checkpoint)");
    model.emplace(LoadCheckpoint(config.stage1_checkpoint, &config.model));
    Require(model->stage() == 1, ErrorKind::kInvalidState,
            config.stage1_checkpoint + " is not a stage-1 checkpoint");
  } else {
    model.emplace(config.model);
  }

  if (!config.run_dir.empty()) fs::create_directories(config.run_dir);
  MetricsLog log(config.run_dir.empty() ? "" : (fs::path(config.run_dir) / "metrics.jsonl").string());
  log.Write({{"event", "run_start"}, {"scenario", ScenarioName(config.scenario)},
             {"seed", config.seed}, {"config_digest", config.Digest()},
             {"manifest_digest", manifest.Digest()}});

  StageData data = PrepareData(config, manifest, config.cache_enhanced ? enhancer : std::nullopt);
  if (config.only_stage != 2) {
    std::vector<Matrix> tracks;
    for (const TrainItem &it : data.train) tracks.push_back(it.track);
    model->set_normalizer(TrackNormalizer::Fit(tracks));
  }

  TrainResult result;
  for (const TrainItem &it : data.train) result.train_keys.push_back(it.key);
  for (int stage = 1; stage <= 2; ++stage) {
    if (config.only_stage != 0 && config.only_stage != stage) continue;
    if (enhancer && !config.cache_enhanced) {
      data = PrepareData(config, manifest, enhancer);
    }
    result.records.push_back(RunStage(*model, config, stage, data, &log));
    if (!config.run_dir.empty()) {
      result.final_checkpoint =
          (fs::path(config.run_dir) / ("stage" + std::to_string(stage) + ".ckpt")).string();
      SaveCheckpoint(*model, result.final_checkpoint,
                     {{"scenario", ScenarioName(config.scenario)},
                      {"best_epoch", result.records.back().best_epoch}});
    }
  }
  if (!config.run_dir.empty()) {
    std::ofstream out(fs::path(config.run_dir) / "run_record.json");
    out << nlohmann::json(result.records).dump(2) << '\n';
  }
  result.model = std::move(model);
  return result;
}

}  // namespace sise
