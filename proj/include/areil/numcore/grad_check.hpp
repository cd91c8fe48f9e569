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
#include <functional>
#include <string>
#include <vector>

#include "areil/numcore/parameter_store.hpp"

namespace areil {

struct GradCheckEntry {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t row = 0;
  std::size_t col = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;

  const GradCheckEntry* worst() const {
    const GradCheckEntry* w = nullptr;
    for (const auto& e : entries)
      if (w == nullptr || e.max_rel_error > w->max_rel_error) w = &e;
    return w;
  }
  double max_rel_error() const {
    const auto* w = worst();
    return w ? w->max_rel_error : 0.0;
  }
};

// |a - n| / max(|a|, |n|, floor). The floor keeps near-zero gradients from
// being judged on finite-difference roundoff alone.
inline double relative_error(double analytic, double numeric, double floor = 1e-8) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

using ScalarLoss = std::function<double(const ParameterStore&)>;

// Compares the gradients already stored in `store` against central
// differences of `loss`. Every parameter value is restored bit-exactly.
inline GradCheckReport grad_check(const ScalarLoss& loss, ParameterStore& store, double epsilon,
                                  double floor = 1e-8) {
  GradCheckReport report;
  for (auto& p : store) {
    GradCheckEntry entry;
    entry.name = p.name;
    auto values = p.value.values();
    const auto grads = p.grad.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + epsilon;
      const double up = loss(store);
      values[i] = saved - epsilon;
      const double down = loss(store);
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double err = relative_error(grads[i], numeric, floor);
      if (err > entry.max_rel_error || i == 0) {
        entry.max_rel_error = err;
        entry.row = i / p.value.cols();
        entry.col = i % p.value.cols();
        entry.analytic = grads[i];
        entry.numeric = numeric;
      }
    }
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace areil
