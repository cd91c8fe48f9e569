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
#include <string>
#include <vector>

#include "areil/corpus/dataset.hpp"
#include "areil/error.hpp"
#include "areil/numcore/sparse.hpp"

namespace areil {

// Symmetrically normalized user-item bipartite adjacency. Users occupy nodes
// [0, num_users), items occupy [num_users, num_users + num_items). The CSR
// values are the per-edge coefficients 1/sqrt(deg(u) * deg(i)).
struct DomainGraph {
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  CsrMatrix adjacency;

  std::size_t node_count() const noexcept { return num_users + num_items; }
  std::size_t num_edges() const noexcept { return adjacency.nnz() / 2; }
  std::span<const double> norm_coefficients() const noexcept { return adjacency.values; }
  std::size_t degree(std::size_t node) const { return adjacency.row_length(node); }
};

inline DomainGraph build_graph(std::span<const Interaction> train, std::size_t num_users,
                               std::size_t num_items) {
  const std::size_t n = num_users + num_items;
  std::vector<std::vector<std::uint32_t>> neighbors(n);
  for (const auto& it : train) {
    if (it.user >= num_users || it.item >= num_items) {
      throw GraphError("interaction (user " + std::to_string(it.user) + ", item " +
                       std::to_string(it.item) + ") out of range for " + std::to_string(num_users) +
                       " users and " + std::to_string(num_items) + " items");
    }
    neighbors[it.user].push_back(static_cast<std::uint32_t>(num_users + it.item));
    neighbors[num_users + it.item].push_back(it.user);
  }
  for (auto& list : neighbors) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }

  DomainGraph g;
  g.num_users = num_users;
  g.num_items = num_items;
  CsrMatrix& a = g.adjacency;
  a.rows = a.cols = n;
  a.row_ptr.assign(n + 1, 0);
  for (std::size_t r = 0; r < n; ++r) a.row_ptr[r + 1] = a.row_ptr[r] + neighbors[r].size();
  a.col_idx.reserve(a.row_ptr[n]);
  a.values.reserve(a.row_ptr[n]);
  for (std::size_t r = 0; r < n; ++r) {
    const double deg_r = static_cast<double>(neighbors[r].size());
    for (std::uint32_t c : neighbors[r]) {
      const double deg_c = static_cast<double>(neighbors[c].size());
      a.col_idx.push_back(c);
      a.values.push_back(1.0 / std::sqrt(deg_r * deg_c));
    }
  }
  return g;
}

}  // namespace areil
