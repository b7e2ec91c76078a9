// sise/external-scorer.h

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

#ifndef SISE_EXTERNAL_SCORER_H_
#define SISE_EXTERNAL_SCORER_H_

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace sise {

/// A command template with {clean} and {degraded} placeholders. The command
/// prints either a JSON object or "key=value" / "key: value" lines; every
/// numeric field is kept, keys lower-cased.
struct ExternalScorerConfig {
  std::string command;
  int timeout_s = 120;

  bool Configured() const { return !command.empty(); }
};

struct ExternalScores {
  std::string status = "unavailable";  // "ok" or "unavailable"
  std::string provenance;              // "external" when status is ok
  std::map<std::string, double> values;
  std::string raw_output;
};

void to_json(nlohmann::json &j, const ExternalScores &s);

/// Parses scorer stdout; throws ScorerError when nothing numeric is found.
std::map<std::string, double> ParseScorerOutput(const std::string &text);

/// Status "unavailable" without a configured command. Throws ScorerError
/// with the captured stderr when the command fails, times out, or prints
/// nothing parseable.
ExternalScores RunExternalScorer(const ExternalScorerConfig &config, const std::string &clean_wav,
                                 const std::string &degraded_wav);

/// One record per (clean, degraded) pair, in input order.
std::vector<ExternalScores> RunExternalScorerBatch(
    const ExternalScorerConfig &config,
    const std::vector<std::pair<std::string, std::string>> &pairs);

/// SE metrics of one condition. External fields stay absent unless a scorer
/// produced them.
struct SeReport {
  std::optional<double> pesq, csig, cbak, covl;
  std::optional<double> stoi;
  std::string external_status = "unavailable";

  void MergeExternal(const ExternalScores &scores);
};

void to_json(nlohmann::json &j, const SeReport &r);

}  // namespace sise

#endif  // SISE_EXTERNAL_SCORER_H_
