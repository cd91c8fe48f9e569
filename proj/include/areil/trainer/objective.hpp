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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "areil/model/classifier.hpp"
#include "areil/model/losses.hpp"
#include "areil/model/model.hpp"
#include "areil/trainer/train_config.hpp"

namespace areil {

struct LabeledPair {
  std::uint32_t user = 0;
  std::uint32_t item = 0;
  double label = 0.0;
};

struct TrainBatch {
  std::array<std::vector<LabeledPair>, 2> rows;

  const std::vector<LabeledPair>& domain(Domain d) const { return rows[idx(d)]; }
  std::vector<LabeledPair>& domain(Domain d) { return rows[idx(d)]; }
};

struct LossBreakdown {
  double rec = 0.0;  // summed over both domains
  double cls = 0.0;  // specific + shared classification loss (before lambda1)
  double cls_specific = 0.0;
  double cls_shared = 0.0;
  double reg = 0.0;  // sum of squared trainable parameters (before lambda2)
  double total = 0.0;
  std::array<double, 2> rec_domain{0.0, 0.0};

  std::string describe() const {
    return fmt::format("L_rec={} (x={}, y={}) L_cls={} (specific={}, shared={}) L_reg={} L_total={}", rec,
                       rec_domain[0], rec_domain[1], cls, cls_specific, cls_shared, reg, total);
  }
};

struct ObjectiveOptions {
  double grl_lambda = 0.0;
  GrlMode grl_mode = GrlMode::reverse;
  bool compute_gradients = true;
};

inline BceResult recommendation_loss(std::span<const double> scores, std::span<const double> labels) {
  return bce_with_logits(scores, labels);
}

// Sum of squared entries over trainable parameters.
inline double regularization(const ParameterStore& store) {
  double total = 0.0;
  for (const auto& p : store)
    if (p.trainable) total += squared_norm(p.value);
  return total;
}

// Distinct users of a batch across both domains, ascending.
inline std::vector<std::uint32_t> batch_users(const TrainBatch& batch) {
  std::vector<std::uint32_t> users;
  for (const auto& rows : batch.rows)
    for (const auto& r : rows) users.push_back(r.user);
  std::sort(users.begin(), users.end());
  users.erase(std::unique(users.begin(), users.end()), users.end());
  return users;
}

// L_total = L_rec + lambda1 * L_cls + lambda2 * L_reg on one batch. With
// compute_gradients the analytic gradient is accumulated into the store.
// The classification loss covers the distinct users of the batch.
inline LossBreakdown evaluate_objective(ModelState& m, const DomainGraphs& graphs, const TrainBatch& batch,
                                        const ObjectiveOptions& opts = {}) {
  const ForwardCache cache = forward(m, graphs);
  const std::size_t full = m.config.full_width();
  const double lambda1 = m.config.lambda1;
  const double lambda2 = m.config.lambda2;
  LossBreakdown out;
  std::array<DomainUpstream, 2> up;

  for (Domain dom : kDomains) {
    const auto& rows = batch.domain(dom);
    const auto& f = cache.domain(dom);
    std::vector<double> scores(rows.size()), labels(rows.size());
    for (std::size_t b = 0; b < rows.size(); ++b) {
      scores[b] = dot(f.user_final.row(rows[b].user), f.item_out.row(rows[b].item));
      labels[b] = rows[b].label;
    }
    const auto bce = recommendation_loss(scores, labels);
    out.rec_domain[idx(dom)] = bce.loss;
    out.rec += bce.loss;
    if (!opts.compute_gradients) continue;
    auto& u = up[idx(dom)];
    u.d_user_final = DenseMatrix(m.num_users, full);
    u.d_item_out = DenseMatrix(m.num_items[idx(dom)], full);
    for (std::size_t b = 0; b < rows.size(); ++b) {
      const double g = bce.d_logits[b];
      auto du = u.d_user_final.row(rows[b].user);
      auto di = u.d_item_out.row(rows[b].item);
      auto uf = f.user_final.row(rows[b].user);
      auto it = f.item_out.row(rows[b].item);
      for (std::size_t j = 0; j < full; ++j) {
        du[j] += g * it[j];
        di[j] += g * uf[j];
      }
    }
  }

  const auto users = batch_users(batch);
  const std::span<const std::uint32_t> user_span(users);
  const auto& fx = cache.domain(Domain::x);
  const auto& fy = cache.domain(Domain::y);
  const auto cls = classification_loss(m.classifier(), gather_rows(fx.enhanced, user_span),
                                       gather_rows(fy.enhanced, user_span), gather_rows(fx.specific, user_span),
                                       gather_rows(fy.specific, user_span), opts.grl_lambda, opts.grl_mode);
  out.cls_specific = cls.loss_specific;
  out.cls_shared = cls.loss_shared;
  out.cls = cls.total();
  out.reg = regularization(m.params);
  out.total = out.rec + lambda1 * out.cls + lambda2 * out.reg;
  if (!std::isfinite(out.total)) throw NumericError("non-finite loss: " + out.describe());
  if (!opts.compute_gradients) return out;

  if (lambda1 != 0.0) {
    const std::array<const DenseMatrix*, 2> d_shared{&cls.d_shared_x, &cls.d_shared_y};
    const std::array<const DenseMatrix*, 2> d_specific{&cls.d_specific_x, &cls.d_specific_y};
    for (Domain dom : kDomains) {
      auto& u = up[idx(dom)];
      u.d_enhanced = DenseMatrix(m.num_users, m.config.shared_width());
      u.d_specific = DenseMatrix(m.num_users, m.config.shared_width());
      DenseMatrix sh = *d_shared[idx(dom)];
      DenseMatrix sp = *d_specific[idx(dom)];
      sh *= lambda1;
      sp *= lambda1;
      scatter_add_rows(u.d_enhanced, sh, user_span);
      scatter_add_rows(u.d_specific, sp, user_span);
    }
    auto& h = m.handles;
    add_scaled(m.params[h.cls_w1].grad, cls.grads.w1, lambda1);
    add_scaled(m.params[h.cls_b1].grad, cls.grads.b1, lambda1);
    add_scaled(m.params[h.cls_w2].grad, cls.grads.w2, lambda1);
    add_scaled(m.params[h.cls_b2].grad, cls.grads.b2, lambda1);
  }
  if (lambda2 != 0.0) {
    for (auto& p : m.params)
      if (p.trainable) add_scaled(p.grad, p.value, 2.0 * lambda2);
  }
  backward(m, graphs, cache, up);
  return out;
}

// Warm-up schedule for the reversal strength: 0 at progress 0, rising
// monotonically towards lambda_max.
inline double grl_lambda(double progress, double lambda_max) {
  const double p = std::clamp(progress, 0.0, 1.0);
  return lambda_max * (2.0 / (1.0 + std::exp(-10.0 * p)) - 1.0);
}

// Forward, backward and one Adam update on a batch.
inline LossBreakdown training_step(ModelState& m, const DomainGraphs& graphs, const TrainBatch& batch,
                                   const TrainConfig& cfg, double progress) {
  for (Domain d : kDomains) {
    if (batch.domain(d).empty())
      throw Error(std::string("training batch for domain ") + domain_tag(d) + " is empty");
  }
  m.params.zero_grad();
  ObjectiveOptions opts;
  opts.grl_lambda = grl_lambda(progress, m.config.grl_lambda_max);
  const LossBreakdown loss = evaluate_objective(m, graphs, batch, opts);
  adam_step(m.params, cfg.adam());
  return loss;
}

}  // namespace areil
