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

#include <cstdint>
#include <numeric>
#include <vector>

#include "areil/model/classifier.hpp"
#include "areil/model/model.hpp"
#include "areil/numcore/parameter_store.hpp"

namespace areil {

struct ProbeOptions {
  double train_fraction = 0.8;
  std::size_t epochs = 300;
  double learning_rate = 1e-2;
  std::uint64_t seed = 7;
};

struct ProbeResult {
  double acc_specific = 0.0;
  double acc_shared = 0.0;
};

// Trains a fresh classifier (full batch, Adam) to tell domain x rows from
// domain y rows of the same users, then reports accuracy on held-out users.
// A row is predicted as domain y when its logit is >= 0.
inline double probe_accuracy(const DenseMatrix& emb_x, const DenseMatrix& emb_y, std::size_t hidden,
                             const ProbeOptions& opts) {
  DenseMatrix::require_same_shape(emb_x, emb_y, "probe_accuracy");
  const std::size_t n = emb_x.rows();
  if (n < 2) throw EvaluationError("probe needs at least two users");
  Rng rng(opts.seed);
  std::vector<std::uint32_t> users(n);
  std::iota(users.begin(), users.end(), 0u);
  rng.shuffle(std::span<std::uint32_t>(users));
  const std::size_t n_train =
      std::clamp<std::size_t>(static_cast<std::size_t>(opts.train_fraction * static_cast<double>(n)), 1, n - 1);
  const std::span<const std::uint32_t> train_users(users.data(), n_train);
  const std::span<const std::uint32_t> test_users(users.data() + n_train, n - n_train);

  auto stack = [&](std::span<const std::uint32_t> ids) {
    const DenseMatrix x = gather_rows(emb_x, ids);
    const DenseMatrix y = gather_rows(emb_y, ids);
    DenseMatrix out(2 * ids.size(), emb_x.cols());
    for (std::size_t r = 0; r < ids.size(); ++r) {
      std::copy(x.row(r).begin(), x.row(r).end(), out.row(r).begin());
      std::copy(y.row(r).begin(), y.row(r).end(), out.row(ids.size() + r).begin());
    }
    return out;
  };
  const DenseMatrix train_in = stack(train_users);
  const DenseMatrix test_in = stack(test_users);
  std::vector<double> labels(train_in.rows(), 0.0);
  std::fill(labels.begin() + static_cast<std::ptrdiff_t>(n_train), labels.end(), 1.0);

  const auto init = ClassifierWeights::random(emb_x.cols(), hidden, rng);
  ParameterStore store;
  const auto w1 = store.add("w1", init.w1);
  const auto b1 = store.add("b1", init.b1);
  const auto w2 = store.add("w2", init.w2);
  const auto b2 = store.add("b2", init.b2);
  const AdamConfig adam{opts.learning_rate, 0.9, 0.999, 1e-8};
  for (std::size_t e = 0; e < opts.epochs; ++e) {
    const ClassifierView view{store[w1].value, store[b1].value, store[w2].value, store[b2].value};
    const auto acts = classifier_forward(view, train_in);
    const auto bce = bce_with_logits(std::span<const double>(acts.logits), std::span<const double>(labels));
    ClassifierGrads g(view);
    classifier_backward(view, train_in, acts, bce.d_logits, g);
    store[w1].grad = g.w1;
    store[b1].grad = g.b1;
    store[w2].grad = g.w2;
    store[b2].grad = g.b2;
    adam_step(store, adam);
  }

  const ClassifierView view{store[w1].value, store[b1].value, store[w2].value, store[b2].value};
  const auto logits = domain_classify(view, test_in);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < logits.size(); ++r) {
    const bool predicted_y = logits[r] >= 0.0;
    const bool is_y = r >= test_users.size();
    if (predicted_y == is_y) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(logits.size());
}

// Probes the specific parts and the enhanced shared parts (the shared
// representation the model scores with).
inline ProbeResult disentanglement_probe(const ModelState& m, const DomainGraphs& graphs,
                                         const ProbeOptions& opts = {}) {
  const auto cache = forward(m, graphs);
  const std::size_t hidden = m.config.hidden_width();
  ProbeResult r;
  r.acc_specific =
      probe_accuracy(cache.domain(Domain::x).specific, cache.domain(Domain::y).specific, hidden, opts);
  r.acc_shared =
      probe_accuracy(cache.domain(Domain::x).enhanced, cache.domain(Domain::y).enhanced, hidden, opts);
  return r;
}

}  // namespace areil
