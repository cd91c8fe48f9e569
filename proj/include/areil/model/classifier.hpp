// Copyright 2026 The AREIL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "areil/error.hpp"
#include "areil/model/grl.hpp"
#include "areil/model/losses.hpp"
#include "areil/numcore/matrix.hpp"
#include "areil/numcore/random.hpp"

namespace areil {

// Domain classifier: input -> affine -> ReLU -> affine -> logit of "domain y".
// Shapes: w1 (H x in), b1 (1 x H), w2 (H x 1), b2 (1 x 1).
struct ClassifierView {
  const DenseMatrix& w1;
  const DenseMatrix& b1;
  const DenseMatrix& w2;
  const DenseMatrix& b2;

  std::size_t input_width() const { return w1.cols(); }
  std::size_t hidden_width() const { return w1.rows(); }
};

struct ClassifierWeights {
  DenseMatrix w1, b1, w2, b2;

  ClassifierWeights() = default;
  ClassifierWeights(std::size_t input, std::size_t hidden)
      : w1(hidden, input), b1(1, hidden), w2(hidden, 1), b2(1, 1) {}

  // Weights uniform in +-0.5/sqrt(cols), biases zero.
  static ClassifierWeights random(std::size_t input, std::size_t hidden, Rng& rng) {
    ClassifierWeights w(input, hidden);
    w.w1 = DenseMatrix::uniform(hidden, input, 0.5 / std::sqrt(static_cast<double>(input)), rng);
    w.w2 = DenseMatrix::uniform(hidden, 1, 0.5, rng);
    return w;
  }

  ClassifierView view() const { return {w1, b1, w2, b2}; }
};

struct ClassifierGrads {
  DenseMatrix w1, b1, w2, b2;

  ClassifierGrads() = default;
  explicit ClassifierGrads(const ClassifierView& v)
      : w1(v.w1.rows(), v.w1.cols()), b1(1, v.b1.cols()), w2(v.w2.rows(), 1), b2(1, 1) {}
};

struct ClassifierActivations {
  DenseMatrix pre;     // B x H
  DenseMatrix hidden;  // B x H
  std::vector<double> logits;
};

inline ClassifierActivations classifier_forward(const ClassifierView& c, const DenseMatrix& input) {
  if (input.cols() != c.input_width()) {
    throw ShapeError("domain classifier expects width " + std::to_string(c.input_width()) + ", got " +
                     input.shape_string());
  }
  const std::size_t h = c.hidden_width();
  ClassifierActivations a{DenseMatrix(input.rows(), h), DenseMatrix(input.rows(), h),
                          std::vector<double>(input.rows())};
  for (std::size_t r = 0; r < input.rows(); ++r) {
    auto x = input.row(r);
    auto pre = a.pre.row(r);
    auto hid = a.hidden.row(r);
    double logit = c.b2(0, 0);
    for (std::size_t k = 0; k < h; ++k) {
      pre[k] = c.b1(0, k) + dot(c.w1.row(k), x);
      hid[k] = pre[k] > 0.0 ? pre[k] : 0.0;
      logit += hid[k] * c.w2(k, 0);
    }
    a.logits[r] = logit;
  }
  return a;
}

inline std::vector<double> domain_classify(const ClassifierView& c, const DenseMatrix& input) {
  return classifier_forward(c, input).logits;
}

// Accumulates weight gradients into `grads` and returns the input gradient.
inline DenseMatrix classifier_backward(const ClassifierView& c, const DenseMatrix& input,
                                       const ClassifierActivations& a, std::span<const double> d_logits,
                                       ClassifierGrads& grads) {
  const std::size_t h = c.hidden_width();
  DenseMatrix d_input(input.rows(), input.cols());
  std::vector<double> d_pre(h);
  for (std::size_t r = 0; r < input.rows(); ++r) {
    const double dl = d_logits[r];
    if (dl == 0.0) continue;
    grads.b2(0, 0) += dl;
    auto hid = a.hidden.row(r);
    auto pre = a.pre.row(r);
    for (std::size_t k = 0; k < h; ++k) {
      grads.w2(k, 0) += hid[k] * dl;
      d_pre[k] = pre[k] > 0.0 ? dl * c.w2(k, 0) : 0.0;
    }
    auto x = input.row(r);
    auto dx = d_input.row(r);
    for (std::size_t k = 0; k < h; ++k) {
      if (d_pre[k] == 0.0) continue;
      grads.b1(0, k) += d_pre[k];
      auto gw = grads.w1.row(k);
      auto w = c.w1.row(k);
      for (std::size_t j = 0; j < x.size(); ++j) {
        gw[j] += d_pre[k] * x[j];
        dx[j] += d_pre[k] * w[j];
      }
    }
  }
  return d_input;
}

struct ClassificationResult {
  double loss_specific = 0.0;
  double loss_shared = 0.0;
  double total() const { return loss_specific + loss_shared; }

  // Gradients of total() w.r.t. the inputs. The shared inputs carry the
  // reversed gradient when GrlMode::reverse is used.
  DenseMatrix d_shared_x, d_shared_y, d_specific_x, d_specific_y;
  ClassifierGrads grads;
};

// Specific embeddings are classified directly; shared embeddings go through
// the gradient reversal layer. Labels: 0 for domain x rows, 1 for domain y.
inline ClassificationResult classification_loss(const ClassifierView& c, const DenseMatrix& shared_x,
                                                const DenseMatrix& shared_y, const DenseMatrix& specific_x,
                                                const DenseMatrix& specific_y, double grl_lambda,
                                                GrlMode mode = GrlMode::reverse) {
  ClassificationResult res;
  res.grads = ClassifierGrads(c);

  auto term = [&](const DenseMatrix& input, double label, DenseMatrix& d_input) {
    const auto acts = classifier_forward(c, input);
    const auto bce = bce_with_logits(std::span<const double>(acts.logits), label);
    d_input = classifier_backward(c, input, acts, bce.d_logits, res.grads);
    return bce.loss;
  };

  res.loss_specific = term(specific_x, 0.0, res.d_specific_x) + term(specific_y, 1.0, res.d_specific_y);
  res.loss_shared = term(apply_grl(shared_x, grl_lambda), 0.0, res.d_shared_x) +
                    term(apply_grl(shared_y, grl_lambda), 1.0, res.d_shared_y);
  if (mode == GrlMode::reverse) {
    res.d_shared_x = grl_backward(res.d_shared_x, grl_lambda);
    res.d_shared_y = grl_backward(res.d_shared_y, grl_lambda);
  }
  return res;
}

}  // namespace areil
