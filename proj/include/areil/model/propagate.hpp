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
#include <cstddef>
#include <string>

#include "areil/corpus/graph.hpp"
#include "areil/error.hpp"
#include "areil/numcore/matrix.hpp"
#include "areil/numcore/sparse.hpp"

namespace areil {

inline DenseMatrix spmm(const DomainGraph& graph, const DenseMatrix& x) {
  return spmm(graph.adjacency, x);
}

// Node-level user/item representations with all layers concatenated.
struct Propagated {
  DenseMatrix users;  // |U| x (K+1)d
  DenseMatrix items;  // |V| x (K+1)d
};

namespace detail {

inline DenseMatrix stack_nodes(const DenseMatrix& users, const DenseMatrix& items) {
  DenseMatrix out(users.rows() + items.rows(), users.cols());
  std::copy(users.values().begin(), users.values().end(), out.values().begin());
  std::copy(items.values().begin(), items.values().end(),
            out.values().begin() + static_cast<std::ptrdiff_t>(users.size()));
  return out;
}

inline void write_block(DenseMatrix& dst, const DenseMatrix& block, std::size_t col_offset) {
  for (std::size_t r = 0; r < block.rows(); ++r) {
    auto from = block.row(r);
    std::copy(from.begin(), from.end(), dst.row(r).begin() + static_cast<std::ptrdiff_t>(col_offset));
  }
}

inline DenseMatrix read_block(const DenseMatrix& src, std::size_t row_offset, std::size_t rows,
                              std::size_t col_offset, std::size_t cols) {
  DenseMatrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    auto from = src.row(row_offset + r).subspan(col_offset, cols);
    std::copy(from.begin(), from.end(), out.row(r).begin());
  }
  return out;
}

}  // namespace detail

// Layer k+1 is the normalized adjacency applied to layer k; the output is
// layer 0 || layer 1 || ... || layer K along the feature axis.
inline Propagated propagate_and_concat(const DomainGraph& graph, const DenseMatrix& user_emb,
                                       const DenseMatrix& item_emb, std::size_t layers) {
  if (user_emb.rows() != graph.num_users || item_emb.rows() != graph.num_items ||
      user_emb.cols() != item_emb.cols()) {
    throw ShapeError("propagate: embeddings " + user_emb.shape_string() + " and " +
                     item_emb.shape_string() + " do not match a graph with " +
                     std::to_string(graph.num_users) + " users and " + std::to_string(graph.num_items) +
                     " items");
  }
  const std::size_t d = user_emb.cols();
  const std::size_t n = graph.node_count();
  DenseMatrix all(n, (layers + 1) * d);
  DenseMatrix current = detail::stack_nodes(user_emb, item_emb);
  DenseMatrix next;
  detail::write_block(all, current, 0);
  for (std::size_t k = 1; k <= layers; ++k) {
    spmm_into(graph.adjacency, current, next);
    std::swap(current, next);
    detail::write_block(all, current, k * d);
  }
  Propagated out;
  out.users = detail::read_block(all, 0, graph.num_users, 0, all.cols());
  out.items = detail::read_block(all, graph.num_users, graph.num_items, 0, all.cols());
  return out;
}

// Gradient of propagate_and_concat with respect to the layer-0 embeddings.
// The adjacency is symmetric, so the adjoint of each hop is the hop itself.
inline Propagated propagate_backward(const DomainGraph& graph, const DenseMatrix& d_users,
                                     const DenseMatrix& d_items, std::size_t layers) {
  const std::size_t width = d_users.cols();
  if (width % (layers + 1) != 0 || d_items.cols() != width || d_users.rows() != graph.num_users ||
      d_items.rows() != graph.num_items) {
    throw ShapeError("propagate_backward: gradients " + d_users.shape_string() + " and " +
                     d_items.shape_string() + " do not match the graph and layer count");
  }
  const std::size_t d = width / (layers + 1);
  const DenseMatrix d_all = detail::stack_nodes(d_users, d_items);
  DenseMatrix g = detail::read_block(d_all, 0, d_all.rows(), layers * d, d);
  DenseMatrix hop;
  for (std::size_t k = layers; k-- > 0;) {
    spmm_into(graph.adjacency, g, hop);
    g = detail::read_block(d_all, 0, d_all.rows(), k * d, d);
    g += hop;
  }
  Propagated out;
  out.users = detail::read_block(g, 0, graph.num_users, 0, d);
  out.items = detail::read_block(g, graph.num_users, graph.num_items, 0, d);
  return out;
}

}  // namespace areil
