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

#include <array>
#include <chrono>
#include <functional>
#include <limits>
#include <vector>

#include "areil/corpus/manifest.hpp"
#include "areil/evalkit/evaluate.hpp"
#include "areil/log.hpp"
#include "areil/trainer/objective.hpp"
#include "areil/trainer/sampler.hpp"

namespace areil {

// Losses are means over the epoch's steps; grl_lambda is the value used on
// the epoch's last step.
struct EpochRecord {
  std::size_t epoch = 0;
  double rec = 0.0;
  double cls = 0.0;
  double reg = 0.0;
  double total = 0.0;
  double grl_lambda = 0.0;
  std::array<double, 2> val_recall{0.0, 0.0};
  std::array<double, 2> val_ndcg{0.0, 0.0};
  double metric = 0.0;
  double wall_seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_metric = -std::numeric_limits<double>::infinity();
  bool stopped_early = false;

  const EpochRecord& best() const {
    for (const auto& r : epochs)
      if (r.epoch == best_epoch) return r;
    throw Error("history has no record for best epoch " + std::to_string(best_epoch));
  }
};

// Tracks the best metric and how long it has gone without improving.
class EarlyStopper {
 public:
  explicit EarlyStopper(std::size_t patience) : patience_(patience) {}

  // Returns true when `metric` is a strict improvement.
  bool observe(std::size_t epoch, double metric) {
    if (metric > best_) {
      best_ = metric;
      best_epoch_ = epoch;
      stale_ = 0;
      return true;
    }
    ++stale_;
    return false;
  }

  bool should_stop() const noexcept { return stale_ >= patience_; }
  double best() const noexcept { return best_; }
  std::size_t best_epoch() const noexcept { return best_epoch_; }

 private:
  std::size_t patience_;
  double best_ = -std::numeric_limits<double>::infinity();
  std::size_t best_epoch_ = 0;
  std::size_t stale_ = 0;
};

struct FitHooks {
  std::function<void(const EpochRecord&)> on_epoch;
};

// Trains until validation NDCG (mean over domains) stops improving for
// `patience` epochs or max_epochs is reached, then restores the best
// parameters. Batches are drawn from Rng(cfg.seed).
inline TrainHistory fit(ModelState& m, const TrainingData& data, const TrainConfig& cfg, const FitHooks& hooks = {}) {
  cfg.validate();
  const auto& split = data.split;
  std::array<UserItemIndex, 2> train_index;
  for (Domain d : kDomains) train_index[idx(d)] = UserItemIndex(split.num_users, split.domain(d).train);

  Rng rng(cfg.seed);
  const std::size_t steps = epoch_steps(split, cfg.batch_size);
  const double total_steps = static_cast<double>(steps * cfg.max_epochs);
  std::size_t global_step = 0;

  TrainHistory history;
  EarlyStopper stopper(cfg.patience);
  std::vector<DenseMatrix> best_values;
  const auto snapshot = [&] {
    best_values.clear();
    for (const auto& p : m.params) best_values.push_back(p.value);
  };
  snapshot();

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const auto batches = make_epoch_batches(split, train_index, cfg.batch_size, cfg.negatives_per_positive, rng);
    EpochRecord rec;
    rec.epoch = epoch;
    for (const auto& batch : batches) {
      const double progress = static_cast<double>(global_step) / total_steps;
      const auto loss = training_step(m, data.graphs, batch, cfg, progress);
      rec.rec += loss.rec;
      rec.cls += loss.cls;
      rec.reg += loss.reg;
      rec.total += loss.total;
      rec.grl_lambda = grl_lambda(progress, m.config.grl_lambda_max);
      ++global_step;
    }
    const double n = static_cast<double>(batches.size());
    rec.rec /= n;
    rec.cls /= n;
    rec.reg /= n;
    rec.total /= n;

    const auto report = evaluate(m, data.graphs, split, SplitPart::validation, cfg.eval_k);
    for (Domain d : kDomains) {
      rec.val_recall[idx(d)] = report.domain(d).recall;
      rec.val_ndcg[idx(d)] = report.domain(d).ndcg;
    }
    rec.metric = report.mean_ndcg();
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (stopper.observe(epoch, rec.metric)) snapshot();
    history.epochs.push_back(rec);
    log::info("epoch {} L_total={:.6f} L_rec={:.6f} L_cls={:.6f} ndcg x={:.5f} y={:.5f}", epoch, rec.total,
              rec.rec, rec.cls, rec.val_ndcg[0], rec.val_ndcg[1]);
    if (hooks.on_epoch) hooks.on_epoch(rec);
    if (stopper.should_stop()) {
      history.stopped_early = epoch < cfg.max_epochs;
      break;
    }
  }

  std::size_t i = 0;
  for (auto& p : m.params) p.value = best_values[i++];
  history.best_epoch = stopper.best_epoch();
  history.best_metric = stopper.best();
  return history;
}

}  // namespace areil
