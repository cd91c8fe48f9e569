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

#include "areil/numcore/matrix.hpp"

namespace areil {

// Gradient reversal: identity forward, -lambda * upstream backward.
inline DenseMatrix apply_grl(const DenseMatrix& x, double /*lambda*/) { return x; }

inline DenseMatrix grl_backward(const DenseMatrix& upstream, double lambda) {
  DenseMatrix out = upstream;
  out *= -lambda;
  return out;
}

// How the shared branch's classifier gradient reaches the embeddings:
// `reverse` is the training behaviour; `identity` treats the layer as a plain
// identity so the total gradient is the true derivative of the loss (used for
// finite-difference verification and for instrumented comparisons).
enum class GrlMode { reverse, identity };

}  // namespace areil
