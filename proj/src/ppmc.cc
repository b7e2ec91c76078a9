// src/ppmc.cc

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

#include "sise/ppmc.h"

#include <cmath>

#include <nlohmann/json.hpp>

namespace sise {

std::string PpmcModeName(PpmcMode m) {
  return m == PpmcMode::kCorpus ? "corpus" : "per-utterance";
}

PpmcMode ParsePpmcMode(const std::string &s) {
  if (s == "corpus") return PpmcMode::kCorpus;
  if (s == "per-utterance" || s == "utterance") return PpmcMode::kPerUtterance;
  Fail(ErrorKind::kInvalidInput, "unknown PPMC mode '" + s + "'");
}

double Pearson(std::span<const double> a, std::span<const double> b, bool *defined) {
  Require(a.size() == b.size(), ErrorKind::kInvalidInput, "pearson: length mismatch");
  const size_t n = a.size();
  double ma = 0.0, mb = 0.0, peak_a = 0.0, peak_b = 0.0;
  for (size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
    peak_a = std::max(peak_a, std::abs(a[i]));
    peak_b = std::max(peak_b, std::abs(b[i]));
  }
  ma /= static_cast<double>(std::max<size_t>(n, 1));
  mb /= static_cast<double>(std::max<size_t>(n, 1));
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  // Variation below rounding noise of the values themselves counts as constant.
  const double tol_a = static_cast<double>(n) * std::pow(1e-12 * peak_a, 2);
  const double tol_b = static_cast<double>(n) * std::pow(1e-12 * peak_b, 2);
  const bool ok = n >= 2 && saa > tol_a && sbb > tol_b;
  if (defined) *defined = ok;
  if (!ok) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

void to_json(nlohmann::json &j, const PpmcReport &r) {
  nlohmann::json values = nlohmann::json::object();
  for (int c = 0; c < kNumTrackChannels; ++c) {
    const std::string name(kTrackChannelNames[c]);
    if (r.defined[c]) values[name] = r.values[c];
    else values[name] = nullptr;
  }
  j = {{"mode", PpmcModeName(r.mode)},
       {"values", values},
       {"avg_all", r.avg_all},
       {"num_undefined", r.num_undefined},
       {"warnings", r.warnings}};
}

PpmcReport ComputePpmc(const std::vector<Matrix> &estimates, const std::vector<Matrix> &references,
                       PpmcMode mode) {
  Require(estimates.size() == references.size() && !estimates.empty(), ErrorKind::kInvalidInput,
          "ppmc needs matched, non-empty utterance sets");
  for (size_t u = 0; u < estimates.size(); ++u)
    Require(estimates[u].rows() == references[u].rows() &&
                estimates[u].cols() == kNumTrackChannels && references[u].cols() == kNumTrackChannels,
            ErrorKind::kInvalidInput,
            "ppmc: utterance " + std::to_string(u) + " has mismatched frames or channels");

  PpmcReport r;
  r.mode = mode;
  for (int c = 0; c < kNumTrackChannels; ++c) {
    if (mode == PpmcMode::kCorpus) {
      std::vector<double> est, ref;
      for (size_t u = 0; u < estimates.size(); ++u) {
        for (long f = 0; f < estimates[u].rows(); ++f) {
          est.push_back(estimates[u](f, c));
          ref.push_back(references[u](f, c));
        }
      }
      bool ok = false;
      r.values[c] = Pearson(est, ref, &ok);
      r.defined[c] = ok;
    } else {
      double sum = 0.0;
      int count = 0;
      for (size_t u = 0; u < estimates.size(); ++u) {
        const Eigen::VectorXd e = estimates[u].col(c), g = references[u].col(c);
        bool ok = false;
        const double v = Pearson({e.data(), static_cast<size_t>(e.size())},
                                 {g.data(), static_cast<size_t>(g.size())}, &ok);
        if (ok) {
          sum += v;
          ++count;
        }
      }
      r.defined[c] = count > 0;
      r.values[c] = count > 0 ? sum / count : 0.0;
    }
  }
  double sum = 0.0;
  int count = 0;
  for (int c = 0; c < kNumTrackChannels; ++c) {
    if (r.defined[c]) {
      sum += r.values[c];
      ++count;
    } else {
      ++r.num_undefined;
      r.warnings.push_back(std::string(kTrackChannelNames[c]) +
                           ": constant series, PPMC undefined and excluded from avg_all");
    }
  }
  r.avg_all = count > 0 ? sum / count : 0.0;
  return r;
}

}  // namespace sise
