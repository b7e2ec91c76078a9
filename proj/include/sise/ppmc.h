// sise/ppmc.h

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

#ifndef SISE_PPMC_H_
#define SISE_PPMC_H_

#include <array>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sise/common.h"
#include "sise/track.h"

namespace sise {

enum class PpmcMode { kCorpus, kPerUtterance };

std::string PpmcModeName(PpmcMode m);
PpmcMode ParsePpmcMode(const std::string &s);

/// Pearson correlation; sets *defined to false (and returns 0) when either
/// series is constant.
double Pearson(std::span<const double> a, std::span<const double> b, bool *defined);

struct PpmcReport {
  PpmcMode mode = PpmcMode::kCorpus;
  std::array<double, kNumTrackChannels> values{};  // meaningful where defined
  std::array<bool, kNumTrackChannels> defined{};
  /// Mean over the defined channels only.
  double avg_all = 0.0;
  int num_undefined = 0;
  std::vector<std::string> warnings;
};

/// Undefined channels serialize as null.
void to_json(nlohmann::json &j, const PpmcReport &r);

/// Correlates estimated and reference tracks (frames x 10 each, matched
/// pairwise). Corpus mode concatenates every utterance per channel;
/// per-utterance mode averages the per-utterance correlations.
PpmcReport ComputePpmc(const std::vector<Matrix> &estimates, const std::vector<Matrix> &references,
                       PpmcMode mode = PpmcMode::kCorpus);

}  // namespace sise

#endif  // SISE_PPMC_H_
