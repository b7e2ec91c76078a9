// src/losses.cc

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

#include "sise/losses.h"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <nlohmann/json.hpp>

namespace sise {

std::string ScenarioName(Scenario s) {
  switch (s) {
    case Scenario::kSiOnly: return "si-o";
    case Scenario::kSeBase: return "se-base";
    case Scenario::kSisePipeline: return "sise-p";
    case Scenario::kSiseMultiTask: return "sise-m";
  }
  return "?";
}

Scenario ParseScenario(const std::string &s) {
  std::string k = s;
  std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) {
    return c == '_' ? '-' : static_cast<char>(std::tolower(c));
  });
  for (Scenario v : {Scenario::kSiOnly, Scenario::kSeBase, Scenario::kSisePipeline,
                     Scenario::kSiseMultiTask})
    if (ScenarioName(v) == k) return v;
  Fail(ErrorKind::kInvalidInput, "unknown scenario '" + s + "' (expected si-o, se-base, sise-p, sise-m)");
}

bool ScenarioTrainsSe(Scenario s) {
  return s == Scenario::kSeBase || s == Scenario::kSiseMultiTask;
}

bool ScenarioTrainsSi(Scenario s) { return s != Scenario::kSeBase; }

void LossConfig::Validate() const {
  Require(alpha_si >= 0.0, ErrorKind::kInvalidInput, "alpha_si must be non-negative");
  Require(pc_epsilon > 0.0, ErrorKind::kInvalidInput, "pc_epsilon must be positive");
  Require(!mrs_fft_sizes.empty(), ErrorKind::kInvalidInput, "mrs_fft_sizes is empty");
  for (size_t i = 0; i < mrs_fft_sizes.size(); ++i) {
    const int n = mrs_fft_sizes[i];
    Require(n >= 4 && (n & (n - 1)) == 0, ErrorKind::kInvalidInput,
            "mrs fft sizes must be powers of two");
    Require(i == 0 || n > mrs_fft_sizes[i - 1], ErrorKind::kInvalidInput,
            "mrs fft sizes must be strictly increasing");
  }
  geometry.Validate();
}

void to_json(nlohmann::json &j, const LossConfig &c) {
  j = {{"alpha_si", c.alpha_si},
       {"mrs_fft_sizes", c.mrs_fft_sizes},
       {"pc_epsilon", c.pc_epsilon},
       {"mrs_modulus", c.mrs_modulus},
       {"geometry", c.geometry}};
}

void from_json(const nlohmann::json &j, LossConfig &c) {
  c.alpha_si = j.value("alpha_si", c.alpha_si);
  c.mrs_fft_sizes = j.value("mrs_fft_sizes", c.mrs_fft_sizes);
  c.pc_epsilon = j.value("pc_epsilon", c.pc_epsilon);
  c.mrs_modulus = j.value("mrs_modulus", c.mrs_modulus);
  if (j.contains("geometry")) c.geometry = j.at("geometry").get<SpectrogramGeometry>();
}

namespace {

void RequireSameLength(size_t a, size_t b, const char *what) {
  Require(a == b, ErrorKind::kInvalidInput,
          std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
              std::to_string(b) + ")");
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Negative cosine similarity, 0 when either side has no energy. Adds
// scale * d/dv into grad_v when requested.
double NegCosine(std::span<const double> u, std::span<const double> v, double scale,
                 std::vector<double> *grad_v) {
  const double uu = Dot(u, u), vv = Dot(v, v), uv = Dot(u, v);
  const double den = std::sqrt(uu * vv);
  if (!(den > 0.0)) return 0.0;
  if (grad_v) {
    const double a = -1.0 / den, b = uv / (den * vv);
    for (size_t i = 0; i < v.size(); ++i) (*grad_v)[i] += scale * (a * u[i] + b * v[i]);
  }
  return -uv / den;
}

}  // namespace

double WsdrLoss(std::span<const double> mixture, std::span<const double> clean,
                std::span<const double> enhanced, std::vector<double> *grad) {
  RequireSameLength(mixture.size(), clean.size(), "wsdr");
  RequireSameLength(clean.size(), enhanced.size(), "wsdr");
  const size_t n = clean.size();
  std::vector<double> noise(n), noise_est(n);
  for (size_t i = 0; i < n; ++i) {
    noise[i] = mixture[i] - clean[i];
    noise_est[i] = mixture[i] - enhanced[i];
  }
  const double ey = Dot(clean, clean), en = Dot(noise, noise);
  Require(ey + en > 0.0, ErrorKind::kDegenerateInput, "wsdr: clean and noise are both silent");
  const double rho = ey / (ey + en);

  std::vector<double> g_noise;
  if (grad) {
    grad->assign(n, 0.0);
    g_noise.assign(n, 0.0);
  }
  const double speech_term = NegCosine(clean, enhanced, rho, grad);
  const double noise_term = NegCosine(noise, noise_est, 1.0 - rho, grad ? &g_noise : nullptr);
  if (grad)
    for (size_t i = 0; i < n; ++i) (*grad)[i] -= g_noise[i];
  return noise_term + rho * (speech_term - noise_term);
}

double CmsLoss(std::span<const double> clean, std::span<const double> enhanced,
               const SpectrogramGeometry &geometry, std::vector<double> *grad) {
  RequireSameLength(clean.size(), enhanced.size(), "cms");
  const ComplexSpectrogram ref = Stft(clean, geometry);
  const ComplexSpectrogram est = Stft(enhanced, geometry);
  const double count = static_cast<double>(ref.values.size());
  double sum = 0.0;
  ComplexMatrix g;
  if (grad) g = ComplexMatrix::Zero(est.values.rows(), est.values.cols());
  for (long t = 0; t < ref.values.rows(); ++t) {
    for (long k = 0; k < ref.values.cols(); ++k) {
      const double ma = std::abs(ref.values(t, k)), mb = std::abs(est.values(t, k));
      const double d = std::log1p(mb) - std::log1p(ma);
      sum += std::abs(d);
      if (grad && mb > 0.0 && d != 0.0) {
        const double s = (d > 0 ? 1.0 : -1.0) / ((1.0 + mb) * mb * count);
        g(t, k) = s * est.values(t, k);
      }
    }
  }
  if (grad) *grad = StftAdjoint(g, geometry, enhanced.size());
  return sum / count;
}

double MrsLoss(std::span<const double> clean, std::span<const double> enhanced,
               const LossConfig &config, std::vector<double> *grad) {
  RequireSameLength(clean.size(), enhanced.size(), "mrs");
  const int largest = config.mrs_fft_sizes.empty() ? 0 : config.mrs_fft_sizes.back();
  Require(static_cast<long>(clean.size()) >= largest, ErrorKind::kInvalidInput,
          "mrs: signal shorter than the largest analysis window");
  if (grad) grad->assign(enhanced.size(), 0.0);
  const double sizes = static_cast<double>(config.mrs_fft_sizes.size());
  double total = 0.0;
  for (int n : config.mrs_fft_sizes) {
    const SpectrogramGeometry geom = SpectrogramGeometry::Make(n, n / 4, WindowKind::kHannPeriodic);
    const ComplexSpectrogram ref = Stft(clean, geom);
    const ComplexSpectrogram est = Stft(enhanced, geom);
    const double count = static_cast<double>(ref.values.size());
    ComplexMatrix g;
    if (grad) g = ComplexMatrix::Zero(est.values.rows(), est.values.cols());
    double sum = 0.0;
    for (long t = 0; t < ref.values.rows(); ++t) {
      for (long k = 0; k < ref.values.cols(); ++k) {
        const Complex d = est.values(t, k) - ref.values(t, k);
        if (config.mrs_modulus) {
          const double m = std::abs(d);
          sum += m;
          if (grad && m > 0.0) g(t, k) = d / (m * count * sizes);
        } else {
          sum += std::abs(d.real()) + std::abs(d.imag());
          if (grad) {
            const auto sgn = [](double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); };
            g(t, k) = Complex(sgn(d.real()), sgn(d.imag())) / (count * sizes);
          }
        }
      }
    }
    total += sum / count;
    if (grad) {
      const std::vector<double> gw = StftAdjoint(g, geom, enhanced.size());
      for (size_t i = 0; i < gw.size(); ++i) (*grad)[i] += gw[i];
    }
  }
  return total / sizes;
}

SiTaskResult SiTaskLoss(const Matrix &pred, const Matrix &target, const LossConfig &config,
                        Matrix *grad) {
  Require(pred.rows() == target.rows() && pred.cols() == target.cols(), ErrorKind::kInvalidInput,
          "si task loss: prediction and target shapes differ");
  Require(pred.rows() >= 2, ErrorKind::kInvalidInput, "si task loss needs at least 2 frames");
  Require(pred.cols() >= 1, ErrorKind::kInvalidInput, "si task loss needs at least 1 channel");
  const long frames = pred.rows();
  const long channels = pred.cols();
  const double inv_c = 1.0 / static_cast<double>(channels);
  SiTaskResult r;
  r.pc.resize(channels);
  r.rmse.resize(channels);
  if (grad) *grad = Matrix::Zero(frames, channels);
  for (long c = 0; c < channels; ++c) {
    const Eigen::ArrayXd p = pred.col(c).array();
    const Eigen::ArrayXd y = target.col(c).array();
    const Eigen::ArrayXd pc = p - p.mean();
    const Eigen::ArrayXd yc = y - y.mean();
    const double sxy = (pc * yc).sum(), sxx = (pc * pc).sum(), syy = (yc * yc).sum();
    const double den = std::sqrt(sxx * syy);
    const bool defined = den >= config.pc_epsilon;
    r.pc[c] = defined ? sxy / den : 0.0;
    const Eigen::ArrayXd diff = p - y;
    r.rmse[c] = std::sqrt(diff.square().mean());
    if (grad) {
      // d(-PC)/dp: mean-centering is absorbed because yc and pc sum to zero.
      if (defined) grad->col(c).array() -= inv_c * (yc / den - sxy * pc / (den * sxx));
      if (r.rmse[c] > 0.0)
        grad->col(c).array() += config.alpha_si * inv_c * diff / (frames * r.rmse[c]);
    }
  }
  for (long c = 0; c < channels; ++c) {
    r.pc_mean += r.pc[c];
    r.rmse_mean += r.rmse[c];
  }
  r.pc_mean *= inv_c;
  r.rmse_mean *= inv_c;
  r.loss = (1.0 - r.pc_mean) + config.alpha_si * r.rmse_mean;
  return r;
}

double LossReport::SeTotal() const {
  Require(HasSe(), ErrorKind::kInvalidInput, "loss report is missing an SE component");
  return *wsdr + *cms + *mrs;
}

double LossReport::SiTotal() const {
  Require(HasSi(), ErrorKind::kInvalidInput, "loss report is missing an SI task component");
  return *si_task_a + *si_task_b;
}

double ComposeTotal(const LossReport &report, Scenario scenario) {
  switch (scenario) {
    case Scenario::kSeBase: return report.SeTotal();
    case Scenario::kSiOnly:
    case Scenario::kSisePipeline: return report.SiTotal();
    case Scenario::kSiseMultiTask: return report.SeTotal() + report.SiTotal();
  }
  Fail(ErrorKind::kInvalidInput, "unknown scenario");
}

void to_json(nlohmann::json &j, const LossReport &r) {
  j = nlohmann::json::object();
  auto put = [&j](const char *key, const std::optional<double> &v) {
    if (v) j[key] = *v;
  };
  put("wsdr", r.wsdr);
  put("cms", r.cms);
  put("mrs", r.mrs);
  put("si_task_a", r.si_task_a);
  put("si_task_b", r.si_task_b);
  if (!r.channel_pc.empty()) j["channel_pc"] = r.channel_pc;
  if (!r.channel_rmse.empty()) j["channel_rmse"] = r.channel_rmse;
  j["total"] = r.total;
}

}  // namespace sise
