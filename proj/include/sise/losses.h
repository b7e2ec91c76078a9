// sise/losses.h

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

#ifndef SISE_LOSSES_H_
#define SISE_LOSSES_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sise/signal.h"

namespace sise {

enum class Scenario { kSiOnly, kSeBase, kSisePipeline, kSiseMultiTask };

std::string ScenarioName(Scenario s);    // "si-o", "se-base", "sise-p", "sise-m"
Scenario ParseScenario(const std::string &s);  // case-insensitive; throws InvalidInput
bool ScenarioTrainsSe(Scenario s);
bool ScenarioTrainsSi(Scenario s);

struct LossConfig {
  double alpha_si = 0.2;
  std::vector<int> mrs_fft_sizes = {256, 512, 1024};
  double pc_epsilon = 1e-8;
  /// Use |Y - Y'| instead of |dRe| + |dIm| inside the multi-resolution term.
  bool mrs_modulus = false;
  SpectrogramGeometry geometry = SpectrogramGeometry::Canonical();

  void Validate() const;
};

void to_json(nlohmann::json &j, const LossConfig &c);
void from_json(const nlohmann::json &j, LossConfig &c);

/// Weighted SDR loss of an estimate `enhanced` of `clean` from `mixture`.
/// When `grad` is given it receives dL/d(enhanced).
double WsdrLoss(std::span<const double> mixture, std::span<const double> clean,
                std::span<const double> enhanced, std::vector<double> *grad = nullptr);

/// Mean |log1p|STFT(clean)| - log1p|STFT(enhanced)|| under `geometry`.
double CmsLoss(std::span<const double> clean, std::span<const double> enhanced,
               const SpectrogramGeometry &geometry, std::vector<double> *grad = nullptr);

/// Complex-spectrum L1 averaged over the configured FFT sizes (hop n/4, Hann).
double MrsLoss(std::span<const double> clean, std::span<const double> enhanced,
               const LossConfig &config, std::vector<double> *grad = nullptr);

struct SiTaskResult {
  double loss = 0.0;
  double pc_mean = 0.0;
  double rmse_mean = 0.0;
  std::vector<double> pc;    // per channel; 0 for a guarded (constant) channel
  std::vector<double> rmse;  // per channel
};

/// (1 - mean PC) + alpha * mean RMSE over the columns of pred/target
/// (frames x channels). `grad` receives dL/d(pred).
SiTaskResult SiTaskLoss(const Matrix &pred, const Matrix &target, const LossConfig &config,
                        Matrix *grad = nullptr);

struct LossReport {
  std::optional<double> wsdr, cms, mrs;
  std::optional<double> si_task_a, si_task_b;
  std::vector<double> channel_pc, channel_rmse;  // 10 entries when SI ran
  double total = 0.0;

  bool HasSe() const { return wsdr && cms && mrs; }
  bool HasSi() const { return si_task_a && si_task_b; }
  double SeTotal() const;
  double SiTotal() const;
};

void to_json(nlohmann::json &j, const LossReport &r);

/// Unweighted sum of the components the scenario trains; throws InvalidInput
/// when one is missing.
double ComposeTotal(const LossReport &report, Scenario scenario);

}  // namespace sise

#endif  // SISE_LOSSES_H_
