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

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include <fmt/core.h>
#include <fmt/ostream.h>

#include "areil/cli/run_config.hpp"
#include "areil/corpus/dataset.hpp"
#include "areil/corpus/manifest.hpp"
#include "areil/corpus/split.hpp"
#include "areil/corpus/synthetic.hpp"
#include "areil/evalkit/ablation.hpp"
#include "areil/evalkit/evaluate.hpp"
#include "areil/evalkit/export.hpp"
#include "areil/evalkit/probe.hpp"
#include "areil/log.hpp"
#include "areil/trainer/checkpoint.hpp"
#include "areil/trainer/fit.hpp"

namespace areil::cli {

namespace fs = std::filesystem;

inline SplitPart parse_split(const std::string& s) {
  if (s == "validation") return SplitPart::validation;
  if (s == "test") return SplitPart::test;
  throw ConfigError("split must be validation or test, got '" + s + "'");
}

inline void write_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot write");
  out << text;
  if (!out) throw IoError(path.string(), "write failed");
}

inline fs::path default_checkpoint(const RunConfig& cfg) { return cfg.output_dir() / "model.ckpt"; }

inline RunInfo run_info(const RunConfig& cfg) {
  return {cfg.train.seed, std::string(variant_name(cfg.model.variant)), cfg.digest()};
}

inline TrainingData load_training_data(const RunConfig& cfg, PreparedData* keep = nullptr) {
  PreparedData prepared = read_prepared(cfg.prepared_dir());
  if (keep != nullptr) *keep = prepared;
  return make_training_data(std::move(prepared.split));
}

// Generates planted two-domain raw logs (raw_x, raw_y) from [synthetic].
inline void command_synth(const RunConfig& cfg, std::ostream& out) {
  if (cfg.data.raw_x.empty() || cfg.data.raw_y.empty())
    throw ConfigError("synth needs data.raw_x and data.raw_y as output paths");
  const auto cds = generate_planted(cfg.synthetic);
  for (Domain d : kDomains) {
    const fs::path p = cfg.resolve(d == Domain::x ? cfg.data.raw_x : cfg.data.raw_y);
    std::error_code ec;
    if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
    write_raw_log(cds.domain(d), p.string());
    fmt::print(out, "wrote {} ({} interactions)\n", p.string(), cds.domain(d).interactions.size());
  }
}

// ingest -> align -> split -> manifest.
inline std::string command_prepare(const RunConfig& cfg, std::ostream& out) {
  if (cfg.data.raw_x.empty() || cfg.data.raw_y.empty()) throw ConfigError("data.raw_x and data.raw_y are required");
  IngestOptions opts;
  opts.positive_threshold = cfg.data.positive_threshold;
  opts.delimiter = cfg.data.delimiter.at(0);
  const auto x = ingest_interactions(cfg.resolve(cfg.data.raw_x).string(), opts);
  const auto y = ingest_interactions(cfg.resolve(cfg.data.raw_y).string(), opts);
  const auto cds = align_overlapping_users(x, y);
  const auto split = split_holdout(cds, cfg.data.split_seed);
  const std::array<std::string, 2> names{cfg.data.name_x, cfg.data.name_y};
  const std::string digest = write_prepared(cfg.prepared_dir(), cds, split, names);
  out << stats_table(dataset_stats(cds, names));
  fmt::print(out, "{} users / {} {} items / {} {} interactions / {} {} items / {} {} interactions\n",
             cds.num_users(), cds.domain(Domain::x).items.size(), names[0],
             cds.domain(Domain::x).interactions.size(), names[0], cds.domain(Domain::y).items.size(), names[1],
             cds.domain(Domain::y).interactions.size(), names[1]);
  fmt::print(out, "manifest_digest: {}\n", digest);
  return digest;
}

// fit -> checkpoint + history + validation report.
inline EvalReport command_train(const RunConfig& cfg, std::ostream& out) {
  PreparedData prepared;
  const TrainingData data = load_training_data(cfg, &prepared);
  ModelState model = init_model(cfg.model, data.num_users(), data.num_items(Domain::x),
                                data.num_items(Domain::y), cfg.train.seed);
  const TrainHistory history = fit(model, data, cfg.train);
  const fs::path dir = cfg.output_dir();
  std::error_code ec;
  fs::create_directories(dir, ec);
  write_file(dir / "config.ini", fmt::format("; config_digest {}\n{}", cfg.digest(), cfg.to_ini()));
  save_checkpoint(model, cfg.train, history, default_checkpoint(cfg));
  EvalReport report = evaluate(model, data.graphs, data.split, SplitPart::validation, cfg.train.eval_k, run_info(cfg));
  report.domain_names = prepared.names;
  write_file(dir / "eval_validation.txt", report.to_text());
  fmt::print(out, "best_epoch: {}\nepochs_run: {}\n", history.best_epoch, history.epochs.size());
  out << report.to_text();
  return report;
}

inline EvalReport command_evaluate(const RunConfig& cfg, const fs::path& checkpoint, SplitPart part, std::size_t k,
                                   std::ostream& out) {
  const Checkpoint ck = load_checkpoint(checkpoint);
  PreparedData prepared;
  const TrainingData data = load_training_data(cfg, &prepared);
  RunInfo info = run_info(cfg);
  info.variant = std::string(variant_name(ck.model.config.variant));
  EvalReport report = evaluate(ck.model, data.graphs, data.split, part, k, info);
  report.domain_names = prepared.names;
  const fs::path dir = cfg.output_dir();
  const std::string stem = std::string("eval_") + split_part_name(part);
  write_file(dir / (stem + ".txt"), report.to_text());
  std::string tsv = EvalReport::summary_header() + "\n";
  for (const auto& row : report.summary_rows()) tsv += row + "\n";
  write_file(dir / (stem + ".tsv"), tsv);
  out << report.to_text();
  return report;
}

inline std::vector<AblationResult> command_ablate(const RunConfig& cfg, const std::string& variants,
                                                  SplitPart part, std::ostream& out) {
  const auto list = parse_variant_list(variants);
  PreparedData prepared;
  const TrainingData data = load_training_data(cfg, &prepared);
  TrainConfig train = cfg.train;
  train.eval_k = cfg.eval.k;
  auto results = run_ablation(data, cfg.model, train, list, part, run_info(cfg));
  for (auto& r : results) r.report.domain_names = prepared.names;
  const std::string table = ablation_table(results);
  write_file(cfg.output_dir() / "ablation.tsv", table);
  out << table;
  return results;
}

inline ExportPaths command_export(const RunConfig& cfg, const fs::path& checkpoint, std::ostream& out) {
  const Checkpoint ck = load_checkpoint(checkpoint);
  PreparedData prepared;
  const TrainingData data = load_training_data(cfg, &prepared);
  const auto paths = export_embeddings(ck.model, data.graphs, prepared.users, prepared.items, cfg.output_dir());
  fmt::print(out, "users: {}\nitems: {}\n", paths.users.string(), paths.items.string());
  return paths;
}

inline ProbeResult command_probe(const RunConfig& cfg, const fs::path& checkpoint, std::ostream& out) {
  const Checkpoint ck = load_checkpoint(checkpoint);
  const TrainingData data = load_training_data(cfg);
  ProbeOptions opts;
  opts.epochs = cfg.eval.probe_epochs;
  opts.learning_rate = cfg.eval.probe_learning_rate;
  opts.seed = cfg.train.seed;
  const auto r = disentanglement_probe(ck.model, data.graphs, opts);
  const std::string text = fmt::format("acc_specific: {}\nacc_shared: {}\nconfig_digest: {}\n", r.acc_specific,
                                       r.acc_shared, cfg.digest());
  write_file(cfg.output_dir() / "probe.txt", text);
  out << text;
  return r;
}

}  // namespace areil::cli
