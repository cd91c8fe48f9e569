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

#include <span>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "areil/evalkit/evaluate.hpp"
#include "areil/log.hpp"
#include "areil/trainer/fit.hpp"

namespace areil {

struct AblationResult {
  Variant variant = Variant::full;
  EvalReport report;
  TrainHistory history;
  ModelState model;
};

// Splits a comma-separated variant list; unknown names raise ConfigError.
inline std::vector<Variant> parse_variant_list(std::string_view text) {
  std::vector<Variant> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto name = detail::trim(text.substr(0, comma));
    if (!name.empty()) out.push_back(parse_variant(name));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (out.empty()) throw ConfigError("variant list is empty (valid: full, no_graph, no_arem, no_irlm)");
  return out;
}

// Trains and evaluates each variant from the same initialization seed and
// the same batch stream.
inline std::vector<AblationResult> run_ablation(const TrainingData& data, const ModelConfig& base,
                                                const TrainConfig& train, std::span<const Variant> variants,
                                                SplitPart part = SplitPart::test, RunInfo run = {}) {
  std::vector<AblationResult> results;
  for (Variant v : variants) {
    ModelConfig cfg = base;
    cfg.variant = v;
    AblationResult r;
    r.variant = v;
    r.model = init_model(cfg, data.num_users(), data.num_items(Domain::x), data.num_items(Domain::y), train.seed);
    log::info("ablation: training variant {}", variant_name(v));
    r.history = fit(r.model, data, train);
    run.variant = std::string(variant_name(v));
    run.seed = train.seed;
    r.report = evaluate(r.model, data.graphs, data.split, part, train.eval_k, run);
    results.push_back(std::move(r));
  }
  return results;
}

// Side-by-side table: one row per variant and domain.
inline std::string ablation_table(const std::vector<AblationResult>& results) {
  std::string out = EvalReport::summary_header() + "\tbest_epoch\n";
  for (const auto& r : results)
    for (const auto& row : r.report.summary_rows()) out += fmt::format("{}\t{}\n", row, r.history.best_epoch);
  return out;
}

}  // namespace areil
