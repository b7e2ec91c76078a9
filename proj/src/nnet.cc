// src/nnet.cc

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

#include "sise/nnet.h"

#include <cmath>

namespace sise {

void InitFanInUniform(Matrix &m, int fan_in, std::mt19937_64 &rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max(1, fan_in)));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (long i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
}

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

Matrix SigmoidOf(const Matrix &x) { return x.unaryExpr([](double v) { return Sigmoid(v); }); }

}  // namespace

Linear::Linear(const std::string &name, int in, int out)
    : weight_(name + ".weight", in, out), bias_(name + ".bias", 1, out) {}

void Linear::Init(std::mt19937_64 &rng) {
  InitFanInUniform(weight_.value, in_dim(), rng);
  InitFanInUniform(bias_.value, in_dim(), rng);
}

Matrix Linear::Forward(const Matrix &x) const {
  Matrix y = x * weight_.value;
  y.rowwise() += bias_.value.row(0);
  return y;
}

Matrix Linear::Backward(const Matrix &x, const Matrix &grad_out) {
  weight_.grad.noalias() += x.transpose() * grad_out;
  bias_.grad.row(0) += grad_out.colwise().sum();
  return grad_out * weight_.value.transpose();
}

Gru::Gru(const std::string &name, int in, int hidden, bool reverse)
    : hidden_(hidden), reverse_(reverse),
      wx_(name + ".wx", in, 3 * hidden), wh_(name + ".wh", hidden, 3 * hidden),
      bx_(name + ".bx", 1, 3 * hidden), bh_(name + ".bh", 1, 3 * hidden) {}

void Gru::Init(std::mt19937_64 &rng) {
  for (Parameter *p : {&wx_, &wh_, &bx_, &bh_}) InitFanInUniform(p->value, hidden_, rng);
}

void Gru::Collect(std::vector<Parameter *> &out) {
  for (Parameter *p : {&wx_, &wh_, &bx_, &bh_}) out.push_back(p);
}

Matrix Gru::Forward(const Matrix &x, int batch, Cache *cache) const {
  const int H = hidden_;
  const long rows = x.rows();
  const int steps = static_cast<int>(rows / batch);
  Matrix xp = x * wx_.value;
  xp.rowwise() += bx_.value.row(0);

  Matrix out(rows, H);
  if (cache) {
    cache->steps = steps;
    cache->batch = batch;
    cache->input = x;
    for (Matrix *m : {&cache->r, &cache->z, &cache->n, &cache->hn, &cache->h_prev}) m->resize(rows, H);
  }
  Matrix h = Matrix::Zero(batch, H);
  Matrix hp(batch, 3 * H);
  for (int s = 0; s < steps; ++s) {
    const int t = reverse_ ? steps - 1 - s : s;
    const long row = static_cast<long>(t) * batch;
    hp.noalias() = h * wh_.value;
    hp.rowwise() += bh_.value.row(0);
    auto xs = xp.middleRows(row, batch);
    const Matrix r = SigmoidOf(xs.leftCols(H) + hp.leftCols(H));
    const Matrix z = SigmoidOf(xs.middleCols(H, H) + hp.middleCols(H, H));
    const Matrix hn = hp.rightCols(H);
    const Matrix n = (xs.rightCols(H).array() + r.array() * hn.array()).tanh().matrix();
    if (cache) {
      cache->r.middleRows(row, batch) = r;
      cache->z.middleRows(row, batch) = z;
      cache->n.middleRows(row, batch) = n;
      cache->hn.middleRows(row, batch) = hn;
      cache->h_prev.middleRows(row, batch) = h;
    }
    h = ((1.0 - z.array()) * n.array() + z.array() * h.array()).matrix();
    out.middleRows(row, batch) = h;
  }
  return out;
}

Matrix Gru::Backward(const Cache &c, const Matrix &grad_out) {
  const int H = hidden_;
  const int batch = c.batch;
  const long rows = static_cast<long>(c.steps) * batch;
  Matrix dxp(rows, 3 * H);
  Matrix dh_next = Matrix::Zero(batch, H);
  Matrix dhp(batch, 3 * H);
  for (int s = c.steps - 1; s >= 0; --s) {
    const int t = reverse_ ? c.steps - 1 - s : s;
    const long row = static_cast<long>(t) * batch;
    const auto r = c.r.middleRows(row, batch).array();
    const auto z = c.z.middleRows(row, batch).array();
    const auto n = c.n.middleRows(row, batch).array();
    const auto hn = c.hn.middleRows(row, batch).array();
    const auto hprev = c.h_prev.middleRows(row, batch);

    const Eigen::ArrayXXd dh = grad_out.middleRows(row, batch).array() + dh_next.array();
    const Eigen::ArrayXXd dn_pre = dh * (1.0 - z) * (1.0 - n * n);
    const Eigen::ArrayXXd dz_pre = dh * (hprev.array() - n) * z * (1.0 - z);
    const Eigen::ArrayXXd dr_pre = dn_pre * hn * r * (1.0 - r);

    auto dx_rows = dxp.middleRows(row, batch);
    dx_rows.leftCols(H) = dr_pre.matrix();
    dx_rows.middleCols(H, H) = dz_pre.matrix();
    dx_rows.rightCols(H) = dn_pre.matrix();
    dhp.leftCols(H) = dr_pre.matrix();
    dhp.middleCols(H, H) = dz_pre.matrix();
    dhp.rightCols(H) = (dn_pre * r).matrix();

    wh_.grad.noalias() += hprev.transpose() * dhp;
    bh_.grad.row(0) += dhp.colwise().sum();
    dh_next = (dh * z).matrix();
    dh_next.noalias() += dhp * wh_.value.transpose();
  }
  wx_.grad.noalias() += c.input.transpose() * dxp;
  bx_.grad.row(0) += dxp.colwise().sum();
  return dxp * wx_.value.transpose();
}

BiGru::BiGru(const std::string &name, int in, int hidden)
    : fwd_(name + ".fwd", in, hidden, false), bwd_(name + ".bwd", in, hidden, true) {}

void BiGru::Init(std::mt19937_64 &rng) {
  fwd_.Init(rng);
  bwd_.Init(rng);
}

Matrix BiGru::Forward(const Matrix &x, int batch, Cache *cache) const {
  const Matrix f = fwd_.Forward(x, batch, cache ? &cache->fwd : nullptr);
  const Matrix b = bwd_.Forward(x, batch, cache ? &cache->bwd : nullptr);
  Matrix out(x.rows(), f.cols() + b.cols());
  out << f, b;
  return out;
}

Matrix BiGru::Backward(const Cache &cache, const Matrix &grad_out) {
  const long h = grad_out.cols() / 2;
  Matrix dx = fwd_.Backward(cache.fwd, grad_out.leftCols(h));
  dx += bwd_.Backward(cache.bwd, grad_out.rightCols(h));
  return dx;
}

void BiGru::Collect(std::vector<Parameter *> &out) {
  fwd_.Collect(out);
  bwd_.Collect(out);
}

BiGruStack::BiGruStack(const std::string &name, int in, int hidden, int depth) : hidden_(hidden) {
  for (int l = 0; l < depth; ++l)
    layers_.emplace_back(name + ".gru" + std::to_string(l), l == 0 ? in : 2 * hidden, hidden);
}

void BiGruStack::Init(std::mt19937_64 &rng) {
  for (BiGru &l : layers_) l.Init(rng);
}

Matrix BiGruStack::Forward(const Matrix &x, int batch, Cache *cache) const {
  if (cache) cache->assign(layers_.size(), {});
  Matrix h = x;
  for (size_t l = 0; l < layers_.size(); ++l)
    h = layers_[l].Forward(h, batch, cache ? &(*cache)[l] : nullptr);
  return h;
}

Matrix BiGruStack::Backward(const Cache &cache, const Matrix &grad_out) {
  Matrix g = grad_out;
  for (size_t l = layers_.size(); l-- > 0;) g = layers_[l].Backward(cache[l], g);
  return g;
}

void BiGruStack::Collect(std::vector<Parameter *> &out) {
  for (BiGru &l : layers_) l.Collect(out);
}

double GlobalGradNorm(const std::vector<Parameter *> &params) {
  double sq = 0.0;
  for (const Parameter *p : params) sq += p->grad.squaredNorm();
  return std::sqrt(sq);
}

void AdamW::Step(const std::vector<Parameter *> &params) {
  ++step_;
  double clip_scale = 1.0;
  if (config_.grad_clip > 0.0) {
    const double norm = GlobalGradNorm(params);
    if (norm > config_.grad_clip) clip_scale = config_.grad_clip / norm;
  }
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
  for (Parameter *p : params) {
    Moments &st = state_[p->name];
    if (st.m.size() == 0) {
      st.m = Matrix::Zero(p->value.rows(), p->value.cols());
      st.v = Matrix::Zero(p->value.rows(), p->value.cols());
    }
    const Matrix g = p->grad * clip_scale;
    st.m = config_.beta1 * st.m + (1.0 - config_.beta1) * g;
    st.v = config_.beta2 * st.v + (1.0 - config_.beta2) * g.cwiseAbs2();
    p->value *= (1.0 - config_.lr * config_.weight_decay);
    p->value.array() -= config_.lr * (st.m.array() / bc1) /
                        ((st.v.array() / bc2).sqrt() + config_.eps);
  }
}

}  // namespace sise
