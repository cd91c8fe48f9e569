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

#include <cstddef>
#include <cstdint>

#include "areil/error.hpp"
#include "areil/numcore/parameter_store.hpp"

namespace areil {

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 1024;
  std::size_t negatives_per_positive = 1;
  std::size_t max_epochs = 1000;
  std::size_t patience = 10;
  std::uint64_t seed = 2024;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t eval_k = 20;

  void validate() const {
    if (!(learning_rate >= 0.0)) throw ConfigError("learning_rate must be non-negative");
    if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
    if (negatives_per_positive == 0) throw ConfigError("negatives_per_positive must be at least 1");
    if (max_epochs == 0) throw ConfigError("max_epochs must be at least 1");
    if (patience == 0) throw ConfigError("patience must be at least 1");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
      throw ConfigError("adam betas must lie in [0, 1)");
    if (eval_k == 0) throw ConfigError("eval_k must be at least 1");
  }

  AdamConfig adam() const { return {learning_rate, beta1, beta2, eps}; }
};

}  // namespace areil
