// src/report.cc

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

#include "sise/report.h"

#include <cmath>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sise/track.h"

namespace sise {

double RelativeImprovement(double new_value, double base_value) {
  Require(base_value != 0.0, ErrorKind::kDegenerateInput,
          "relative improvement is undefined for a zero baseline");
  return 100.0 * (new_value - base_value) / base_value;
}

const std::vector<std::string> &ReportColumns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c;
    for (auto name : kTrackChannelNames) c.emplace_back(name);
    for (const char *s : {"avg_all", "pesq", "csig", "cbak", "covl", "stoi"}) c.emplace_back(s);
    return c;
  }();
  return cols;
}

namespace {

std::string FormatSnr(const std::optional<double> &snr) {
  if (!snr) return "";
  std::ostringstream o;
  o << *snr;
  return o.str();
}

bool SameSnr(const std::optional<double> &a, const std::optional<double> &b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || std::abs(*a - *b) < 1e-9;
}

std::string FormatValue(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

const ReportCell *FindCell(const std::vector<ReportCell> &cells, const std::string &scenario,
                           const std::string &noise, const std::optional<double> &snr) {
  for (const ReportCell &c : cells)
    if (c.scenario == scenario && c.noise == noise && SameSnr(c.snr_db, snr)) return &c;
  return nullptr;
}

}  // namespace

std::string ReportCell::Label() const {
  return scenario + "/" + noise + "/" + (snr_db ? FormatSnr(snr_db) + "dB" : "clean");
}

void ReportCell::AddPpmc(const PpmcReport &ppmc) {
  for (int c = 0; c < kNumTrackChannels; ++c)
    if (ppmc.defined[c]) metrics[std::string(kTrackChannelNames[c])] = ppmc.values[c];
  if (ppmc.num_undefined < kNumTrackChannels) metrics["avg_all"] = ppmc.avg_all;
}

void ReportCell::AddSe(const SeReport &se) {
  auto put = [this](const char *k, const std::optional<double> &v) {
    if (v) metrics[k] = *v;
  };
  put("pesq", se.pesq);
  put("csig", se.csig);
  put("cbak", se.cbak);
  put("covl", se.covl);
  put("stoi", se.stoi);
}

void to_json(nlohmann::json &j, const ReportCell &c) {
  j = {{"scenario", c.scenario}, {"noise", c.noise}, {"metrics", c.metrics},
       {"utterances", c.utterances}};
  if (c.snr_db) j["snr_db"] = *c.snr_db;
  else j["snr_db"] = nullptr;
}

void from_json(const nlohmann::json &j, ReportCell &c) {
  c.scenario = j.at("scenario").get<std::string>();
  c.noise = j.at("noise").get<std::string>();
  if (j.contains("snr_db") && !j.at("snr_db").is_null()) c.snr_db = j.at("snr_db").get<double>();
  else c.snr_db.reset();
  c.metrics = j.value("metrics", std::map<std::string, double>{});
  c.utterances = j.value("utterances", 0);
}

ReportTable BuildGrid(const std::vector<std::string> &scenarios,
                      const std::vector<std::string> &noises, const std::vector<double> &snrs,
                      const std::vector<ReportCell> &available) {
  Require(!scenarios.empty() && !noises.empty(), ErrorKind::kInvalidInput,
          "report grid needs at least one scenario and one noise condition");
  std::vector<std::optional<double>> levels;
  for (double s : snrs) levels.emplace_back(s);
  if (levels.empty()) levels.emplace_back(std::nullopt);
  ReportTable table;
  for (const std::string &sc : scenarios) {
    for (const std::string &nz : noises) {
      for (const auto &snr : levels) {
        const ReportCell *found = FindCell(available, sc, nz, snr);
        if (found) {
          table.rows.push_back(*found);
        } else {
          ReportCell gap{sc, nz, snr, {}, 0};
          table.gaps.push_back(gap.Label());
          table.rows.push_back(std::move(gap));
        }
      }
    }
  }
  return table;
}

std::string TableToCsv(const ReportTable &table) {
  std::ostringstream o;
  o << "scenario,noise,snr_db";
  for (const std::string &c : ReportColumns()) o << ',' << c;
  o << ",utterances\n";
  for (const ReportCell &r : table.rows) {
    o << r.scenario << ',' << r.noise << ',' << FormatSnr(r.snr_db);
    for (const std::string &c : ReportColumns()) {
      o << ',';
      const auto it = r.metrics.find(c);
      if (it != r.metrics.end()) o << FormatValue(it->second);
    }
    o << ',' << r.utterances << '\n';
  }
  return o.str();
}

nlohmann::json TableToJson(const ReportTable &table) {
  return {{"columns", ReportColumns()}, {"rows", table.rows}, {"gaps", table.gaps}};
}

void to_json(nlohmann::json &j, const ImprovementRow &r) {
  j = {{"noise", r.noise}, {"metric", r.metric}, {"base", r.base},
       {"new", r.improved}, {"percent", r.percent}};
  if (r.snr_db) j["snr_db"] = *r.snr_db;
  else j["snr_db"] = nullptr;
}

std::vector<ImprovementRow> RelativeImprovements(const std::vector<ReportCell> &cells,
                                                 const std::string &new_scenario,
                                                 const std::string &base_scenario,
                                                 const std::string &metric) {
  std::vector<ImprovementRow> out;
  for (const ReportCell &n : cells) {
    if (n.scenario != new_scenario) continue;
    const ReportCell *b = FindCell(cells, base_scenario, n.noise, n.snr_db);
    if (!b) continue;
    const auto nv = n.metrics.find(metric), bv = b->metrics.find(metric);
    if (nv == n.metrics.end() || bv == b->metrics.end()) continue;
    out.push_back({n.noise, n.snr_db, metric, bv->second, nv->second,
                   RelativeImprovement(nv->second, bv->second)});
  }
  return out;
}

ImprovementRow NoiseImprovement(const std::vector<ReportCell> &cells, const std::string &scenario,
                                double snr_db, const std::string &new_noise,
                                const std::string &base_noise, const std::string &metric) {
  const ReportCell *n = FindCell(cells, scenario, new_noise, snr_db);
  const ReportCell *b = FindCell(cells, scenario, base_noise, snr_db);
  Require(n && b, ErrorKind::kInvalidInput, "noise comparison: missing cell for " + scenario);
  const auto nv = n->metrics.find(metric), bv = b->metrics.find(metric);
  Require(nv != n->metrics.end() && bv != b->metrics.end(), ErrorKind::kInvalidInput,
          "noise comparison: metric '" + metric + "' missing");
  return {new_noise + "/" + base_noise, snr_db, metric, bv->second, nv->second,
          RelativeImprovement(nv->second, bv->second)};
}

std::string ImprovementsToCsv(const std::vector<ImprovementRow> &rows) {
  std::ostringstream o;
  o << "noise,snr_db,metric,base,new,percent\n";
  for (const ImprovementRow &r : rows)
    o << r.noise << ',' << FormatSnr(r.snr_db) << ',' << r.metric << ',' << FormatValue(r.base)
      << ',' << FormatValue(r.improved) << ',' << std::fixed << std::setprecision(2) << r.percent
      << std::defaultfloat << '\n';
  return o.str();
}

}  // namespace sise
