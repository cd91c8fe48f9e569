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

#include "areil/error.hpp"
#include "areil/numcore/matrix.hpp"

namespace areil {

struct SplitEmbedding {
  DenseMatrix shared;
  DenseMatrix specific;
};

// Within each layer block of width `layer_width`, the first half goes to the
// shared part and the second half to the specific part, keeping layer order.
inline SplitEmbedding split_user_embedding(const DenseMatrix& user_out, std::size_t layer_width) {
  if (layer_width == 0 || layer_width % 2 != 0)
    throw ConfigError("layer width must be a positive even number, got " + std::to_string(layer_width));
  if (user_out.cols() % layer_width != 0)
    throw ShapeError("split: width " + std::to_string(user_out.cols()) + " is not a multiple of " +
                     std::to_string(layer_width));
  const std::size_t half = layer_width / 2;
  const std::size_t blocks = user_out.cols() / layer_width;
  SplitEmbedding out{DenseMatrix(user_out.rows(), blocks * half), DenseMatrix(user_out.rows(), blocks * half)};
  for (std::size_t r = 0; r < user_out.rows(); ++r) {
    auto src = user_out.row(r);
    auto sha = out.shared.row(r);
    auto spe = out.specific.row(r);
    for (std::size_t b = 0; b < blocks; ++b) {
      std::copy_n(src.begin() + b * layer_width, half, sha.begin() + b * half);
      std::copy_n(src.begin() + b * layer_width + half, half, spe.begin() + b * half);
    }
  }
  return out;
}

// Inverse of split_user_embedding (block-interleaved reassembly).
inline DenseMatrix merge_user_embedding(const DenseMatrix& shared, const DenseMatrix& specific,
                                        std::size_t layer_width) {
  if (layer_width == 0 || layer_width % 2 != 0)
    throw ConfigError("layer width must be a positive even number, got " + std::to_string(layer_width));
  DenseMatrix::require_same_shape(shared, specific, "merge_user_embedding");
  const std::size_t half = layer_width / 2;
  if (shared.cols() % half != 0) throw ShapeError("merge: width is not a multiple of the half layer");
  const std::size_t blocks = shared.cols() / half;
  DenseMatrix out(shared.rows(), blocks * layer_width);
  for (std::size_t r = 0; r < shared.rows(); ++r) {
    auto dst = out.row(r);
    auto sha = shared.row(r);
    auto spe = specific.row(r);
    for (std::size_t b = 0; b < blocks; ++b) {
      std::copy_n(sha.begin() + b * half, half, dst.begin() + b * layer_width);
      std::copy_n(spe.begin() + b * half, half, dst.begin() + b * layer_width + half);
    }
  }
  return out;
}

}  // namespace areil
