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
#include <span>
#include <utility>
#include <vector>

namespace areil {

namespace detail {

// Higher score first; equal scores by ascending item index.
inline bool ranks_before(const std::pair<double, std::uint32_t>& a, const std::pair<double, std::uint32_t>& b) {
  if (a.first != b.first) return a.first > b.first;
  return a.second < b.second;
}

inline std::vector<std::pair<double, std::uint32_t>> candidates(std::span<const double> scores,
                                                                std::span<const std::uint32_t> mask) {
  std::vector<std::pair<double, std::uint32_t>> out;
  out.reserve(scores.size());
  auto m = mask.begin();
  for (std::uint32_t i = 0; i < scores.size(); ++i) {
    while (m != mask.end() && *m < i) ++m;
    if (m != mask.end() && *m == i) continue;
    out.emplace_back(scores[i], i);
  }
  return out;
}

}  // namespace detail

// Unmasked items by descending score, ties by ascending index. `mask` must be
// sorted ascending.
inline std::vector<std::uint32_t> rank_items(std::span<const double> scores, std::span<const std::uint32_t> mask) {
  auto cand = detail::candidates(scores, mask);
  std::sort(cand.begin(), cand.end(), detail::ranks_before);
  std::vector<std::uint32_t> out(cand.size());
  for (std::size_t i = 0; i < cand.size(); ++i) out[i] = cand[i].second;
  return out;
}

// First k entries of rank_items, computed with a partial sort.
inline std::vector<std::uint32_t> top_k_items(std::span<const double> scores, std::span<const std::uint32_t> mask,
                                              std::size_t k) {
  auto cand = detail::candidates(scores, mask);
  const std::size_t n = std::min(k, cand.size());
  std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(n), cand.end(), detail::ranks_before);
  std::vector<std::uint32_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = cand[i].second;
  return out;
}

// |top-k ∩ relevant| / |relevant|. `relevant` must be sorted and non-empty.
inline double recall_at_k(std::span<const std::uint32_t> ranked, std::span<const std::uint32_t> relevant,
                          std::size_t k) {
  if (relevant.empty()) return 0.0;
  const std::size_t n = std::min(k, ranked.size());
  std::size_t hits = 0;
  for (std::size_t p = 0; p < n; ++p)
    if (std::binary_search(relevant.begin(), relevant.end(), ranked[p])) ++hits;
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

// Binary-relevance NDCG with gain 1/log2(position + 1), positions from 1.
inline double ndcg_at_k(std::span<const std::uint32_t> ranked, std::span<const std::uint32_t> relevant,
                        std::size_t k) {
  if (relevant.empty()) return 0.0;
  const std::size_t n = std::min(k, ranked.size());
  double dcg = 0.0;
  for (std::size_t p = 0; p < n; ++p)
    if (std::binary_search(relevant.begin(), relevant.end(), ranked[p])) dcg += 1.0 / std::log2(p + 2.0);
  double idcg = 0.0;
  const std::size_t ideal = std::min(k, relevant.size());
  for (std::size_t p = 0; p < ideal; ++p) idcg += 1.0 / std::log2(p + 2.0);
  return dcg / idcg;
}

}  // namespace areil
