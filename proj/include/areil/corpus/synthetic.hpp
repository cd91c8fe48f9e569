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
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "areil/corpus/dataset.hpp"
#include "areil/error.hpp"
#include "areil/numcore/random.hpp"

namespace areil {

// Two-domain implicit-feedback generator with planted user factors: one
// factor block shared by both domains and one private block per domain.
// Domain x is the dense domain; domain y gets `sparse_ratio` of its density.
struct SyntheticConfig {
  std::size_t num_users = 2000;
  std::size_t num_items = 500;  // per domain
  std::size_t shared_dim = 16;
  std::size_t specific_dim = 16;
  double dense_mean = 32.0;    // mean interactions per user in domain x
  double sparse_ratio = 0.25;  // domain y density relative to domain x
  double shared_weight = 0.5;  // variance share of the shared block in the affinity
  double temperature = 20.0;   // sharpness of the item choice distribution
  std::uint64_t seed = 1;
};

namespace detail {

inline std::vector<double> normal_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  std::vector<double> m(rows * cols);
  const double scale = 1.0 / std::sqrt(static_cast<double>(cols));
  for (auto& x : m) x = rng.normal() * scale;
  return m;
}

}  // namespace detail

inline CrossDomainDataset generate_planted(const SyntheticConfig& cfg) {
  if (cfg.num_users == 0 || cfg.num_items == 0) throw ConfigError("synthetic data needs users and items");
  Rng rng(cfg.seed);
  const std::size_t ns = cfg.shared_dim;
  const std::size_t np = cfg.specific_dim;
  const auto shared = detail::normal_matrix(cfg.num_users, ns, rng);

  std::vector<std::string> user_tokens(cfg.num_users);
  for (std::size_t u = 0; u < cfg.num_users; ++u) user_tokens[u] = fmt::format("u{:06d}", u);

  CrossDomainDataset out;
  out.shared_users = IdMap::from_tokens(user_tokens);
  const double ws = std::sqrt(cfg.shared_weight);
  const double wp = std::sqrt(1.0 - cfg.shared_weight);

  for (Domain d : kDomains) {
    const double mean = d == Domain::x ? cfg.dense_mean : cfg.dense_mean * cfg.sparse_ratio;
    const auto specific = detail::normal_matrix(cfg.num_users, np, rng);
    const auto item_shared = detail::normal_matrix(cfg.num_items, ns, rng);
    const auto item_specific = detail::normal_matrix(cfg.num_items, np, rng);

    DomainDataset& ds = out.domain(d);
    std::vector<std::string> item_tokens(cfg.num_items);
    for (std::size_t i = 0; i < cfg.num_items; ++i)
      item_tokens[i] = fmt::format("{}{:05d}", domain_tag(d), i);
    ds.users = out.shared_users;
    ds.items = IdMap::from_tokens(item_tokens);

    std::vector<std::pair<double, std::uint32_t>> keys(cfg.num_items);
    for (std::size_t u = 0; u < cfg.num_users; ++u) {
      // Per-user count uniform in [mean/2, 3*mean/2], at least one.
      const auto lo = static_cast<std::uint64_t>(std::max(1.0, std::floor(mean / 2.0)));
      const auto hi = static_cast<std::uint64_t>(std::max(1.0, std::floor(1.5 * mean)));
      const std::size_t count =
          std::min<std::size_t>(cfg.num_items, lo + rng.index(hi - lo + 1));
      // Gumbel top-k: sampling without replacement from softmax(temperature * affinity).
      for (std::size_t i = 0; i < cfg.num_items; ++i) {
        double a = 0.0;
        for (std::size_t k = 0; k < ns; ++k) a += ws * shared[u * ns + k] * item_shared[i * ns + k];
        for (std::size_t k = 0; k < np; ++k) a += wp * specific[u * np + k] * item_specific[i * np + k];
        double uni;
        do {
          uni = rng.unit();
        } while (uni <= 0.0);
        keys[i] = {cfg.temperature * a - std::log(-std::log(uni)), static_cast<std::uint32_t>(i)};
      }
      std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(count), keys.end(),
                        [](const auto& a, const auto& b) { return a.first > b.first; });
      for (std::size_t k = 0; k < count; ++k)
        ds.interactions.push_back({static_cast<std::uint32_t>(u), keys[k].second});
    }
    std::sort(ds.interactions.begin(), ds.interactions.end());

    // Items nobody picked are dropped so the dataset matches ingest output.
    std::vector<char> used(cfg.num_items, 0);
    for (const auto& it : ds.interactions) used[it.item] = 1;
    if (std::count(used.begin(), used.end(), 1) != static_cast<std::ptrdiff_t>(cfg.num_items)) {
      std::vector<std::string> kept;
      for (std::size_t i = 0; i < cfg.num_items; ++i)
        if (used[i]) kept.push_back(item_tokens[i]);
      IdMap remapped = IdMap::from_tokens(kept);
      for (auto& it : ds.interactions) it.item = remapped.index(item_tokens[it.item]);
      ds.items = std::move(remapped);
    }
    ds.stats = {ds.interactions.size(), ds.interactions.size(), ds.interactions.size()};
  }
  return out;
}

// Writes a domain as a "user,item,rating" log readable by ingest_interactions.
inline void write_raw_log(const DomainDataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path, "cannot write raw log");
  out << "# user,item,rating\n";
  for (const auto& it : ds.interactions)
    out << ds.users.token(it.user) << ',' << ds.items.token(it.item) << ",1\n";
  if (!out) throw IoError(path, "write failure");
}

}  // namespace areil
