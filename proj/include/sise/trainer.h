// sise/trainer.h

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

#ifndef SISE_TRAINER_H_
#define SISE_TRAINER_H_

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sise/losses.h"
#include "sise/manifest.h"
#include "sise/model.h"
#include "sise/nnet.h"

namespace sise {

struct BatchPolicy {
  int batch_size = 8;
  /// Upper bound on summed utterance duration per batch; 0 disables.
  double max_batch_seconds = 0.0;
};

struct TrainConfig {
  Scenario scenario = Scenario::kSiseMultiTask;
  double stage1_lr = 5e-4;
  double stage2_lr = 5e-5;
  AdamWConfig optimizer;  // lr is overwritten per stage
  int patience = 5;
  int max_epochs = 100;
  BatchPolicy batch;
  uint64_t seed = 0;
  /// 0 runs both stages; 1 or 2 runs only that stage.
  int only_stage = 0;
  std::string manifest;
  std::string run_dir;
  /// Stage-1 checkpoint used when only stage 2 runs.
  std::string stage1_checkpoint;
  /// Trained SE-Base checkpoint, the frozen front end of SISE-P.
  std::string se_base_checkpoint;
  /// Enhance SISE-P inputs once instead of on every epoch.
  bool cache_enhanced = false;
  ModelConfig model;
  LossConfig loss;

  void Validate() const;
  std::string Digest() const;
};

void to_json(nlohmann::json &j, const TrainConfig &c);
void from_json(const nlohmann::json &j, TrainConfig &c);

/// Patience-based stopping on a dev loss sequence, epochs counted from 1.
class EarlyStopper {
 public:
  explicit EarlyStopper(int patience);
  /// Records one epoch; returns true when training should stop.
  bool Update(double dev_loss);
  bool improved() const { return improved_; }
  int best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }
  int epochs() const { return epochs_; }

 private:
  int patience_;
  int epochs_ = 0;
  int best_epoch_ = 0;
  int stale_ = 0;
  bool improved_ = false;
  double best_loss_ = std::numeric_limits<double>::infinity();
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_loss = 0.0;
};

struct RunRecord {
  std::string scenario;
  int stage = 1;
  uint64_t seed = 0;
  std::string config_digest;
  double initial_dev_loss = 0.0;
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_dev_loss = 0.0;
  bool stopped_early = false;
  double wall_clock_s = 0.0;
  std::string best_checkpoint;
};

void to_json(nlohmann::json &j, const RunRecord &r);

/// One utterance ready for the model: `input` is what the model hears.
struct TrainItem {
  std::string key;
  Waveform input;
  Waveform clean;
  Matrix track;  // physical units, NumFeatureFrames(len) x 10
};

/// Reads the entries of `split` a scenario trains on. Clean-only scenarios
/// never open augmented entries. Throws CorruptEntry when a track and its
/// audio disagree by more than one frame.
std::vector<TrainItem> LoadItems(const CorpusManifest &manifest, Split split, Scenario scenario);

/// Seeded per-epoch shuffling into batches.
class BatchIterator {
 public:
  BatchIterator(std::vector<double> durations_s, BatchPolicy policy, uint64_t seed);
  /// Item indices of every batch of `epoch` (0-based), shuffled when
  /// `shuffle` is set.
  std::vector<std::vector<size_t>> Epoch(int epoch, bool shuffle = true) const;

 private:
  std::vector<double> durations_;
  BatchPolicy policy_;
  uint64_t seed_;
};

/// Builds a model batch from items, trimming every member to the shortest
/// one and slicing tracks to the matching 50 Hz frame count.
ModelBatch AssembleBatch(const std::vector<TrainItem> &items, const std::vector<size_t> &indices);

struct StageData {
  std::vector<TrainItem> train;
  std::vector<TrainItem> dev;
};

/// Appends one JSON object per line; never rewrites earlier lines.
class MetricsLog {
 public:
  MetricsLog() = default;
  explicit MetricsLog(const std::string &path);
  void Write(const nlohmann::json &record);
  const std::string &path() const { return path_; }

 private:
  std::string path_;
};

/// Mean scenario loss over the dev items in a fixed batch order.
double EvaluateLoss(SiseModel &model, const std::vector<TrainItem> &items, const TrainConfig &config);

/// One TST stage: stage 1 freezes the backbone at stage1_lr, stage 2 trains
/// everything at stage2_lr. Stops after `patience` epochs without dev
/// improvement and restores the best-epoch parameters.
RunRecord RunStage(SiseModel &model, const TrainConfig &config, int stage, const StageData &data,
                   MetricsLog *log);

struct TrainResult {
  std::optional<SiseModel> model;
  std::vector<RunRecord> records;
  std::string final_checkpoint;
  std::vector<std::string> train_keys;  // manifest keys the run read for training
};

TrainResult TrainScenario(const TrainConfig &config);

/// Replaces every input with the enhancement of a frozen SE model.
void EnhanceInputs(const SiseModel &enhancer, std::vector<TrainItem> &items);

}  // namespace sise

#endif  // SISE_TRAINER_H_
