// sise/nnet.h

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

#ifndef SISE_NNET_H_
#define SISE_NNET_H_

// Minimal layers with explicit forward/backward passes. Sequences of a
// batch are packed time-major: row t * batch + b holds frame t of item b.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "sise/common.h"

namespace sise {

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, int rows, int cols)
      : name(std::move(n)), value(Matrix::Zero(rows, cols)), grad(Matrix::Zero(rows, cols)) {}
  void ZeroGrad() { grad.setZero(); }
  long size() const { return value.size(); }
};

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)).
void InitFanInUniform(Matrix &m, int fan_in, std::mt19937_64 &rng);

double Sigmoid(double x);

/// y = x W + b, W: in x out.
class Linear {
 public:
  Linear() = default;
  Linear(const std::string &name, int in, int out);

  void Init(std::mt19937_64 &rng);
  Matrix Forward(const Matrix &x) const;
  /// Accumulates parameter gradients; returns dL/dx.
  Matrix Backward(const Matrix &x, const Matrix &grad_out);
  void Collect(std::vector<Parameter *> &out) { out.push_back(&weight_); out.push_back(&bias_); }

  int in_dim() const { return static_cast<int>(weight_.value.rows()); }
  int out_dim() const { return static_cast<int>(weight_.value.cols()); }
  Parameter &weight() { return weight_; }
  Parameter &bias() { return bias_; }

 private:
  Parameter weight_;
  Parameter bias_;
};

/// Single-direction GRU (gate order r, z, n):
///   r = s(x Wxr + bxr + h Whr + bhr), z likewise,
///   n = tanh(x Wxn + bxn + r * (h Whn + bhn)), h' = (1 - z) n + z h.
class Gru {
 public:
  struct Cache {
    int steps = 0, batch = 0;
    Matrix input;             // (T*B) x in
    Matrix r, z, n, hn, h_prev;  // (T*B) x H
  };

  Gru() = default;
  Gru(const std::string &name, int in, int hidden, bool reverse);

  void Init(std::mt19937_64 &rng);
  Matrix Forward(const Matrix &x, int batch, Cache *cache) const;
  Matrix Backward(const Cache &cache, const Matrix &grad_out);
  void Collect(std::vector<Parameter *> &out);
  int hidden() const { return hidden_; }

 private:
  int hidden_ = 0;
  bool reverse_ = false;
  Parameter wx_, wh_, bx_, bh_;
};

/// Bidirectional GRU; output is [forward | backward], 2H wide.
class BiGru {
 public:
  struct Cache { Gru::Cache fwd, bwd; };

  BiGru() = default;
  BiGru(const std::string &name, int in, int hidden);
  void Init(std::mt19937_64 &rng);
  Matrix Forward(const Matrix &x, int batch, Cache *cache) const;
  Matrix Backward(const Cache &cache, const Matrix &grad_out);
  void Collect(std::vector<Parameter *> &out);

 private:
  Gru fwd_, bwd_;
};

/// Stack of bidirectional GRU layers.
class BiGruStack {
 public:
  using Cache = std::vector<BiGru::Cache>;

  BiGruStack() = default;
  BiGruStack(const std::string &name, int in, int hidden, int depth);
  void Init(std::mt19937_64 &rng);
  Matrix Forward(const Matrix &x, int batch, Cache *cache) const;
  Matrix Backward(const Cache &cache, const Matrix &grad_out);
  void Collect(std::vector<Parameter *> &out);
  int out_dim() const { return 2 * hidden_; }

 private:
  int hidden_ = 0;
  std::vector<BiGru> layers_;
};

struct AdamWConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
  double grad_clip = 0.0;  // global-norm clip; 0 disables
};

/// Decoupled weight decay Adam. State is keyed by parameter name.
class AdamW {
 public:
  explicit AdamW(AdamWConfig config) : config_(config) {}
  void Step(const std::vector<Parameter *> &params);
  void set_lr(double lr) { config_.lr = lr; }
  const AdamWConfig &config() const { return config_; }
  long steps() const { return step_; }

 private:
  struct Moments { Matrix m, v; };
  AdamWConfig config_;
  long step_ = 0;
  std::map<std::string, Moments> state_;
};

double GlobalGradNorm(const std::vector<Parameter *> &params);

}  // namespace sise

#endif  // SISE_NNET_H_
