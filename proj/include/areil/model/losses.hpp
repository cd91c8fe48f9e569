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
#include <cstddef>
#include <span>
#include <vector>

#include "areil/error.hpp"

namespace areil {

inline constexpr double kProbClamp = 1e-12;

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct BceResult {
  double loss = 0.0;
  std::vector<double> d_logits;  // derivative of the mean loss w.r.t. each logit
};

// Mean binary cross-entropy of sigmoid(logits) against labels in {0, 1}.
// Probabilities are clamped to [1e-12, 1 - 1e-12] inside the logarithms.
inline BceResult bce_with_logits(std::span<const double> logits, std::span<const double> labels) {
  if (logits.size() != labels.size()) throw ShapeError("bce: logits and labels differ in length");
  BceResult r;
  r.d_logits.resize(logits.size());
  if (logits.empty()) return r;
  const double inv_n = 1.0 / static_cast<double>(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double p = sigmoid(logits[i]);
    const double pc = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
    const double y = labels[i];
    total -= y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc);
    r.d_logits[i] = (p - y) * inv_n;
  }
  r.loss = total * inv_n;
  return r;
}

// Same loss with one label for every row.
inline BceResult bce_with_logits(std::span<const double> logits, double label) {
  const std::vector<double> labels(logits.size(), label);
  return bce_with_logits(logits, std::span<const double>(labels));
}

}  // namespace areil
