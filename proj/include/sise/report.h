// sise/report.h

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

#ifndef SISE_REPORT_H_
#define SISE_REPORT_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sise/external-scorer.h"
#include "sise/ppmc.h"

namespace sise {

/// 100 * (new - base) / base; DegenerateInput when base is 0.
double RelativeImprovement(double new_value, double base_value);

/// Column order of emitted tables: the ten track channels, avg_all, then
/// the SE metrics.
const std::vector<std::string> &ReportColumns();

/// One (scenario, noise, SNR) condition. A clean condition has no SNR.
/// Metrics that were not measured are absent, never zero-filled.
struct ReportCell {
  std::string scenario;
  std::string noise;
  std::optional<double> snr_db;
  std::map<std::string, double> metrics;
  int utterances = 0;

  std::string Label() const;  // "scenario/noise/snr"
  void AddPpmc(const PpmcReport &ppmc);
  void AddSe(const SeReport &se);
};

void to_json(nlohmann::json &j, const ReportCell &c);
void from_json(const nlohmann::json &j, ReportCell &c);

struct ReportTable {
  std::vector<ReportCell> rows;
  std::vector<std::string> gaps;  // labels of requested cells with no data
};

/// Every scenario x noise x SNR combination in that nesting order. Cells not
/// found in `available` become metric-free rows listed in `gaps`.
/// Throws InvalidInput when the grid is empty.
ReportTable BuildGrid(const std::vector<std::string> &scenarios,
                      const std::vector<std::string> &noises, const std::vector<double> &snrs,
                      const std::vector<ReportCell> &available);

std::string TableToCsv(const ReportTable &table);
nlohmann::json TableToJson(const ReportTable &table);

struct ImprovementRow {
  std::string noise;
  std::optional<double> snr_db;
  std::string metric;
  double base = 0.0;
  double improved = 0.0;
  double percent = 0.0;
};

void to_json(nlohmann::json &j, const ImprovementRow &r);

/// Relative improvement of `new_scenario` over `base_scenario` on `metric`
/// for every condition where both rows carry the metric.
std::vector<ImprovementRow> RelativeImprovements(const std::vector<ReportCell> &cells,
                                                 const std::string &new_scenario,
                                                 const std::string &base_scenario,
                                                 const std::string &metric);

/// Relative improvement between two noise conditions of one scenario at one
/// SNR, e.g. non-babble over babble.
ImprovementRow NoiseImprovement(const std::vector<ReportCell> &cells, const std::string &scenario,
                                double snr_db, const std::string &new_noise,
                                const std::string &base_noise, const std::string &metric);

std::string ImprovementsToCsv(const std::vector<ImprovementRow> &rows);

}  // namespace sise

#endif  // SISE_REPORT_H_
