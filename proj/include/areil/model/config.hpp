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
#include <cstddef>
#include <string>
#include <string_view>

#include "areil/corpus/dataset.hpp"
#include "areil/error.hpp"

namespace areil {

// Ablation variants. no_graph drops propagation (K = 0), no_arem disables the
// inter-domain fusion (gamma = 1), no_irlm disables the domain classifier
// (lambda1 = 0).
enum class Variant { full, no_graph, no_arem, no_irlm };

inline constexpr std::array<Variant, 4> kAllVariants{Variant::full, Variant::no_graph, Variant::no_arem,
                                                     Variant::no_irlm};

inline std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::full: return "full";
    case Variant::no_graph: return "no_graph";
    case Variant::no_arem: return "no_arem";
    case Variant::no_irlm: return "no_irlm";
  }
  return "?";
}

inline Variant parse_variant(std::string_view name) {
  for (Variant v : kAllVariants)
    if (variant_name(v) == name) return v;
  throw ConfigError("unknown variant '" + std::string(name) +
                    "' (valid: full, no_graph, no_arem, no_irlm)");
}

struct ModelConfig {
  std::size_t embed_dim = 64;
  std::size_t gcn_layers = 3;
  double gamma_s = 0.9;  // fusion weight kept by domain x's own shared part
  double gamma_t = 0.9;  // same for domain y
  double lambda1 = 0.1;
  double lambda2 = 0.01;
  double grl_lambda_max = 1.0;
  std::size_t classifier_hidden = 0;  // 0 selects half the shared width
  Variant variant = Variant::full;

  void validate() const {
    if (embed_dim == 0 || embed_dim % 2 != 0)
      throw ConfigError("embed_dim must be a positive even number, got " + std::to_string(embed_dim));
    for (double g : {gamma_s, gamma_t})
      if (!(g > 0.0 && g <= 1.0)) throw ConfigError("gamma must lie in (0, 1], got " + std::to_string(g));
    if (lambda1 < 0.0 || lambda2 < 0.0) throw ConfigError("lambda1 and lambda2 must be non-negative");
    if (grl_lambda_max < 0.0) throw ConfigError("grl_lambda_max must be non-negative");
  }

  // Copy with the variant's overrides applied.
  ModelConfig resolved() const {
    ModelConfig c = *this;
    switch (variant) {
      case Variant::no_graph: c.gcn_layers = 0; break;
      case Variant::no_arem: c.gamma_s = c.gamma_t = 1.0; break;
      case Variant::no_irlm: c.lambda1 = 0.0; break;
      case Variant::full: break;
    }
    c.validate();
    return c;
  }

  std::size_t full_width() const { return (gcn_layers + 1) * embed_dim; }
  std::size_t shared_width() const { return full_width() / 2; }
  std::size_t hidden_width() const {
    return classifier_hidden != 0 ? classifier_hidden : std::max<std::size_t>(1, shared_width() / 2);
  }
  double gamma(Domain d) const { return d == Domain::x ? gamma_s : gamma_t; }
};

}  // namespace areil
