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

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "areil/cli/commands.hpp"

namespace {

using namespace areil;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitCheckpoint = 3;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<std::size_t> k;
  std::optional<std::string> split;
  std::optional<std::string> variants;
  std::optional<std::string> out;
  std::optional<std::string> checkpoint;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "run configuration (INI)")->required();
  cmd->add_option("--seed", f.seed, "seed override");
  cmd->add_option("--threads", f.threads, "worker thread cap");
  cmd->add_option("--out", f.out, "output directory override");
  cmd->add_option("--set", f.overrides, "section.key=value override (repeatable)");
}

cli::RunConfig load_config(const Flags& f, const std::string& command) {
  auto cfg = cli::RunConfig::load(f.config);
  ConfigBinder b;
  cfg.bind(b);
  for (const auto& kv : f.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + kv + "'");
    b.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.seed) {
    if (command == "prepare")
      cfg.data.split_seed = *f.seed;
    else if (command == "synth")
      cfg.synthetic.seed = *f.seed;
    else
      cfg.train.seed = *f.seed;
  }
  if (f.threads) cfg.output.threads = *f.threads;
  if (f.out) cfg.output.dir = std::filesystem::absolute(*f.out).string();
  if (f.k) cfg.eval.k = *f.k;
  if (f.split) cfg.eval.split = *f.split;
  if (f.variants) cfg.eval.variants = *f.variants;
  cfg.validate();
#ifdef _OPENMP
  if (cfg.output.threads > 0) omp_set_num_threads(static_cast<int>(cfg.output.threads));
#endif
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-domain recommendation engine: prepare data, train, evaluate, ablate, export, probe"};
  app.require_subcommand(1);
  Flags f;

  auto* synth = app.add_subcommand("synth", "generate planted synthetic raw logs");
  auto* prepare = app.add_subcommand("prepare", "ingest, align and split raw logs");
  auto* train = app.add_subcommand("train", "train a model and write checkpoint + history");
  auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint");
  auto* ablate = app.add_subcommand("ablate", "train and compare ablation variants");
  auto* export_cmd = app.add_subcommand("export", "export user and item embeddings");
  auto* probe = app.add_subcommand("probe", "disentanglement probe on a checkpoint");
  for (auto* cmd : {synth, prepare, train, evaluate, ablate, export_cmd, probe}) add_common(cmd, f);
  for (auto* cmd : {evaluate, export_cmd, probe})
    cmd->add_option("--checkpoint", f.checkpoint, "checkpoint path (default <out>/model.ckpt)");
  for (auto* cmd : {evaluate, ablate}) {
    cmd->add_option("--split", f.split, "validation or test");
    cmd->add_option("--k", f.k, "cutoff K");
  }
  ablate->add_option("--variants", f.variants, "comma list of full,no_graph,no_arem,no_irlm");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    auto* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    const auto cfg = load_config(f, name);
    const auto checkpoint = f.checkpoint ? std::filesystem::path(*f.checkpoint) : cli::default_checkpoint(cfg);
    if (name == "synth") {
      cli::command_synth(cfg, std::cout);
    } else if (name == "prepare") {
      cli::command_prepare(cfg, std::cout);
    } else if (name == "train") {
      cli::command_train(cfg, std::cout);
    } else if (name == "evaluate") {
      cli::command_evaluate(cfg, checkpoint, cli::parse_split(cfg.eval.split), cfg.eval.k, std::cout);
    } else if (name == "ablate") {
      cli::command_ablate(cfg, cfg.eval.variants, cli::parse_split(cfg.eval.split), std::cout);
    } else if (name == "export") {
      cli::command_export(cfg, checkpoint, std::cout);
    } else if (name == "probe") {
      cli::command_probe(cfg, checkpoint, std::cout);
    }
  } catch (const CheckpointError& e) {
    log::error("checkpoint error: {}", e.what());
    return kExitCheckpoint;
  } catch (const InputError& e) {
    log::error("input error: {}", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    log::error("internal error: {}", e.what());
    return kExitInternal;
  }
  return kExitOk;
}
