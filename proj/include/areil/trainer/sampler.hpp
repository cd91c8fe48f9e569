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
#include <span>
#include <string>
#include <vector>

#include "areil/corpus/split.hpp"
#include "areil/error.hpp"
#include "areil/numcore/random.hpp"
#include "areil/trainer/objective.hpp"

namespace areil {

// For each positive, `n` items drawn uniformly and rejected while they are
// among the user's training positives. Returned rows carry label 0.
inline std::vector<LabeledPair> sample_negatives(const UserItemIndex& train, std::size_t num_items,
                                                 std::span<const Interaction> positives, std::size_t n,
                                                 Rng& rng) {
  std::vector<LabeledPair> out;
  out.reserve(positives.size() * n);
  for (const auto& pos : positives) {
    if (train.items(pos.user).size() >= num_items) {
      throw SamplingError("user " + std::to_string(pos.user) +
                          " has interacted with every item; no negative exists");
    }
    for (std::size_t k = 0; k < n; ++k) {
      std::uint32_t item;
      do {
        item = static_cast<std::uint32_t>(rng.index(num_items));
      } while (train.contains(pos.user, item));
      out.push_back({pos.user, item, 0.0});
    }
  }
  return out;
}

// Steps per epoch: set by the larger domain and batch_size, never more than the
// smaller domain has positives.
inline std::size_t epoch_steps(const SplitDataset& split, std::size_t batch_size) {
  const std::size_t a = split.domain(Domain::x).train.size();
  const std::size_t b = split.domain(Domain::y).train.size();
  const std::size_t largest = std::max(a, b);
  const std::size_t smallest = std::min(a, b);
  return std::clamp<std::size_t>((largest + batch_size - 1) / batch_size, 1, std::max<std::size_t>(1, smallest));
}

// One epoch of batches. Each domain's shuffled positives are cut into the same
// number of chunks (set by the larger domain and batch_size) so every step
// carries both domains and every positive is visited once.
inline std::vector<TrainBatch> make_epoch_batches(const SplitDataset& split,
                                                  const std::array<UserItemIndex, 2>& train_index,
                                                  std::size_t batch_size, std::size_t negatives, Rng& rng) {
  std::array<std::vector<Interaction>, 2> order;
  for (Domain d : kDomains) {
    order[idx(d)] = split.domain(d).train;
    rng.shuffle(std::span<Interaction>(order[idx(d)]));
  }
  const std::size_t steps = epoch_steps(split, batch_size);
  std::vector<TrainBatch> batches(steps);
  for (Domain d : kDomains) {
    const auto& list = order[idx(d)];
    for (std::size_t s = 0; s < steps; ++s) {
      const std::size_t lo = list.size() * s / steps;
      const std::size_t hi = list.size() * (s + 1) / steps;
      const std::span<const Interaction> chunk(list.data() + lo, hi - lo);
      auto& rows = batches[s].domain(d);
      rows.reserve(chunk.size() * (1 + negatives));
      for (const auto& it : chunk) rows.push_back({it.user, it.item, 1.0});
      auto neg = sample_negatives(train_index[idx(d)], split.num_items[idx(d)], chunk, negatives, rng);
      rows.insert(rows.end(), neg.begin(), neg.end());
    }
  }
  return batches;
}

}  // namespace areil
