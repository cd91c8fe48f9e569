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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "areil/corpus/dataset.hpp"
#include "areil/error.hpp"
#include "areil/log.hpp"
#include "areil/numcore/random.hpp"

namespace areil {

enum class SplitPart { train, validation, test };

inline const char* split_part_name(SplitPart p) {
  switch (p) {
    case SplitPart::train: return "train";
    case SplitPart::validation: return "validation";
    case SplitPart::test: return "test";
  }
  return "?";
}

struct DomainSplit {
  std::vector<Interaction> train;
  std::vector<Interaction> validation;
  std::vector<Interaction> test;
  std::size_t promoted = 0;  // interactions swapped into train for trainless users

  const std::vector<Interaction>& part(SplitPart p) const {
    switch (p) {
      case SplitPart::train: return train;
      case SplitPart::validation: return validation;
      case SplitPart::test: return test;
    }
    return train;
  }
  std::size_t total() const noexcept { return train.size() + validation.size() + test.size(); }
};

struct SplitDataset {
  std::array<DomainSplit, 2> domains;
  std::uint64_t seed = 0;
  std::size_t num_users = 0;
  std::array<std::size_t, 2> num_items{0, 0};

  const DomainSplit& domain(Domain d) const { return domains[idx(d)]; }
  DomainSplit& domain(Domain d) { return domains[idx(d)]; }
};

// Per-user sorted item lists, used for masking and rejection sampling.
class UserItemIndex {
 public:
  UserItemIndex() = default;
  UserItemIndex(std::size_t num_users, std::span<const Interaction> interactions)
      : items_(num_users) {
    for (const auto& it : interactions) items_.at(it.user).push_back(it.item);
    for (auto& list : items_) std::sort(list.begin(), list.end());
  }

  void add(std::span<const Interaction> interactions) {
    for (const auto& it : interactions) {
      auto& list = items_.at(it.user);
      list.insert(std::upper_bound(list.begin(), list.end(), it.item), it.item);
    }
  }

  std::size_t num_users() const noexcept { return items_.size(); }
  const std::vector<std::uint32_t>& items(std::size_t user) const { return items_[user]; }
  bool contains(std::size_t user, std::uint32_t item) const {
    const auto& list = items_[user];
    return std::binary_search(list.begin(), list.end(), item);
  }

 private:
  std::vector<std::vector<std::uint32_t>> items_;
};

namespace detail {

inline DomainSplit split_domain(const std::vector<Interaction>& interactions, std::size_t num_users,
                                Rng& rng) {
  std::vector<Interaction> order = interactions;
  rng.shuffle(std::span<Interaction>(order));
  const std::size_t n = order.size();
  const std::size_t n_train = n * 8 / 10;
  const std::size_t n_valid = n / 10;

  // Positions [0, n_train) are train, then validation, then test.
  std::vector<std::size_t> train_count(num_users, 0);
  for (std::size_t i = 0; i < n_train; ++i) ++train_count[order[i].user];

  DomainSplit out;
  // Trainless users: promote their lowest-item held-out interaction by swapping
  // it with a train interaction whose user keeps at least one other.
  std::vector<std::size_t> held_best(num_users, SIZE_MAX);
  for (std::size_t i = n_train; i < n; ++i) {
    const auto& it = order[i];
    if (train_count[it.user] != 0) continue;
    auto& best = held_best[it.user];
    if (best == SIZE_MAX || it.item < order[best].item) best = i;
  }
  std::size_t donor = n_train;
  for (std::size_t u = 0; u < num_users; ++u) {
    const std::size_t pos = held_best[u];
    if (pos == SIZE_MAX) continue;
    while (donor > 0 && train_count[order[donor - 1].user] < 2) --donor;
    if (donor == 0) {
      throw InputError("cannot give every user a training interaction: too few interactions");
    }
    --donor;
    --train_count[order[donor].user];
    ++train_count[u];
    std::swap(order[donor], order[pos]);
    ++out.promoted;
  }

  out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                        order.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid));
  out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid), order.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.validation.begin(), out.validation.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace detail

// Random 80/10/10 partition of each domain. Sizes are exact floors; users who
// would end up without training data get one held-out interaction swapped in.
inline SplitDataset split_holdout(const CrossDomainDataset& cds, std::uint64_t seed) {
  SplitDataset out;
  out.seed = seed;
  out.num_users = cds.num_users();
  Rng rng(seed);
  for (Domain d : kDomains) {
    const auto& ds = cds.domain(d);
    if (ds.interactions.size() < 10) {
      throw InputError(std::string("domain ") + domain_tag(d) + " has " +
                       std::to_string(ds.interactions.size()) +
                       " interactions; at least 10 are needed to split");
    }
    out.num_items[idx(d)] = ds.items.size();
    out.domain(d) = detail::split_domain(ds.interactions, out.num_users, rng);
    if (out.domain(d).promoted > 0) {
      log::info("split domain {}: moved {} interactions into train for trainless users",
                domain_tag(d), out.domain(d).promoted);
    }
  }
  return out;
}

}  // namespace areil
