// sise/evaluate.h

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

#ifndef SISE_EVALUATE_H_
#define SISE_EVALUATE_H_

#include <string>
#include <vector>

#include "sise/external-scorer.h"
#include "sise/manifest.h"
#include "sise/model.h"
#include "sise/ppmc.h"
#include "sise/report.h"

namespace sise {

struct EvaluationOptions {
  std::string scenario_label;
  bool score_si = true;
  bool score_se = true;
  /// Also emit "noisy" rows scoring the unprocessed input (SE metrics only).
  bool noisy_baseline = false;
  PpmcMode ppmc_mode = PpmcMode::kCorpus;
  ExternalScorerConfig scorer;
  /// Where enhanced audio is written for the external scorer; a temporary
  /// directory when empty.
  std::string work_dir;
  Split split = Split::kTest;
};

/// Per-utterance outcome kept for acceptance-style summaries.
struct UtteranceScore {
  std::string key;
  std::string noise;
  double snr_db = 0.0;
  double input_snr_db = 0.0;     // noisy vs clean
  double output_snr_db = 0.0;    // enhanced vs clean
  double stoi_noisy = 0.0;
  double stoi_enhanced = 0.0;
};

struct EvaluationResult {
  std::vector<ReportCell> cells;
  std::vector<UtteranceScore> utterances;  // filled when SE is scored
};

/// Scores `model` on every condition of the split, grouped by (noise kind,
/// SNR); clean entries form a "clean" condition. With a `preprocessor`, the
/// SI path hears its enhancement of the input (SISE-P).
EvaluationResult EvaluateModel(const SiseModel &model, const CorpusManifest &manifest,
                               const EvaluationOptions &options,
                               const SiseModel *preprocessor = nullptr);

/// 10·log10(|clean|² / |estimate − clean|²).
double SignalToErrorDb(std::span<const double> clean, std::span<const double> estimate);

}  // namespace sise

#endif  // SISE_EVALUATE_H_
