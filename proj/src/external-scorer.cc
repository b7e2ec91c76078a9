// src/external-scorer.cc

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

#include "sise/external-scorer.h"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sise/common.h"
#include "sise/process.h"

namespace sise {

namespace {

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string Trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool ParseNumber(const std::string &s, double *out) {
  const std::string t = Trim(s);
  if (t.empty()) return false;
  char *end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) return false;
  *out = v;
  return true;
}

}  // namespace

std::map<std::string, double> ParseScorerOutput(const std::string &text) {
  std::map<std::string, double> values;
  const std::string trimmed = Trim(text);
  if (!trimmed.empty() && trimmed.front() == '{') {
    try {
      const auto j = nlohmann::json::parse(trimmed);
      for (const auto &[k, v] : j.items())
        if (v.is_number()) values[Lower(k)] = v.get<double>();
    } catch (const nlohmann::json::exception &e) {
      Fail(ErrorKind::kScorerError, std::string("scorer printed invalid JSON: ") + e.what());
    }
  } else {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      const auto pos = line.find_first_of("=:");
      if (pos == std::string::npos) continue;
      double v = 0.0;
      const std::string key = Lower(Trim(line.substr(0, pos)));
      if (!key.empty() && ParseNumber(line.substr(pos + 1), &v)) values[key] = v;
    }
  }
  Require(!values.empty(), ErrorKind::kScorerError,
          "scorer output has no numeric fields: '" + trimmed.substr(0, 200) + "'");
  return values;
}

ExternalScores RunExternalScorer(const ExternalScorerConfig &config, const std::string &clean_wav,
                                 const std::string &degraded_wav) {
  ExternalScores s;
  if (!config.Configured()) return s;
  const std::string cmd =
      FillTemplate(config.command, {{"clean", clean_wav}, {"degraded", degraded_wav}});
  const CommandResult r = RunCommand(cmd, config.timeout_s);
  if (r.timed_out)
    Fail(ErrorKind::kScorerError, "scorer timed out after " + std::to_string(config.timeout_s) +
                                      " s: " + cmd + "\nstderr: " + r.err);
  if (r.exit_code != 0)
    Fail(ErrorKind::kScorerError, "scorer exited with " + std::to_string(r.exit_code) + ": " + cmd +
                                      "\nstderr: " + r.err);
  s.values = ParseScorerOutput(r.out);
  s.raw_output = r.out;
  s.status = "ok";
  s.provenance = "external";
  return s;
}

std::vector<ExternalScores> RunExternalScorerBatch(
    const ExternalScorerConfig &config,
    const std::vector<std::pair<std::string, std::string>> &pairs) {
  std::vector<ExternalScores> out;
  out.reserve(pairs.size());
  for (const auto &[clean, degraded] : pairs) out.push_back(RunExternalScorer(config, clean, degraded));
  return out;
}

void to_json(nlohmann::json &j, const ExternalScores &s) {
  j = {{"status", s.status}, {"values", s.values}};
  if (!s.provenance.empty()) j["provenance"] = s.provenance;
  if (!s.raw_output.empty()) j["raw_output"] = s.raw_output;
}

void SeReport::MergeExternal(const ExternalScores &scores) {
  external_status = scores.status;
  if (scores.status != "ok") return;
  auto take = [&scores](const char *key, std::optional<double> &field) {
    const auto it = scores.values.find(key);
    if (it != scores.values.end()) field = it->second;
  };
  take("pesq", pesq);
  take("csig", csig);
  take("cbak", cbak);
  take("covl", covl);
}

void to_json(nlohmann::json &j, const SeReport &r) {
  j = nlohmann::json::object();
  nlohmann::json provenance = nlohmann::json::object();
  auto put = [&](const char *key, const std::optional<double> &v, const char *source) {
    if (!v) return;
    j[key] = *v;
    provenance[key] = source;
  };
  put("pesq", r.pesq, "external");
  put("csig", r.csig, "external");
  put("cbak", r.cbak, "external");
  put("covl", r.covl, "external");
  put("stoi", r.stoi, "native");
  j["external_status"] = r.external_status;
  j["provenance"] = provenance;
}

}  // namespace sise
