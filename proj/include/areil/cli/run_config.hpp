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
#include <string>

#include "areil/config_io.hpp"
#include "areil/corpus/synthetic.hpp"
#include "areil/digest.hpp"
#include "areil/model/config.hpp"
#include "areil/trainer/train_config.hpp"

namespace areil::cli {

struct DataSection {
  std::string raw_x;
  std::string raw_y;
  std::string name_x = "x";
  std::string name_y = "y";
  std::string prepared = "prepared";
  double positive_threshold = 0.0;
  std::string delimiter = ",";
  std::uint64_t split_seed = 2024;
};

struct EvalSection {
  std::size_t k = 20;
  std::string split = "test";
  std::string variants = "full,no_graph,no_arem,no_irlm";
  std::size_t probe_epochs = 300;
  double probe_learning_rate = 1e-2;
};

struct OutputSection {
  std::string dir = "run";
  std::size_t threads = 0;  // 0 keeps the runtime default
};

// Every setting of a run. Relative paths resolve against `base_dir`, the
// directory holding the config file.
struct RunConfig {
  DataSection data;
  ModelConfig model;
  TrainConfig train;
  EvalSection eval;
  OutputSection output;
  SyntheticConfig synthetic;
  std::filesystem::path base_dir = ".";

  void bind(ConfigBinder& b) {
    b.bind("data", "raw_x", data.raw_x);
    b.bind("data", "raw_y", data.raw_y);
    b.bind("data", "name_x", data.name_x);
    b.bind("data", "name_y", data.name_y);
    b.bind("data", "prepared", data.prepared);
    b.bind("data", "positive_threshold", data.positive_threshold);
    b.bind("data", "delimiter", data.delimiter);
    b.bind("data", "split_seed", data.split_seed);
    bind_model_config(b, model);
    bind_train_config(b, train);
    b.bind("eval", "k", eval.k);
    b.bind("eval", "split", eval.split);
    b.bind("eval", "variants", eval.variants);
    b.bind("eval", "probe_epochs", eval.probe_epochs);
    b.bind("eval", "probe_learning_rate", eval.probe_learning_rate);
    b.bind("output", "dir", output.dir);
    b.bind("output", "threads", output.threads);
    b.bind("synthetic", "num_users", synthetic.num_users);
    b.bind("synthetic", "num_items", synthetic.num_items);
    b.bind("synthetic", "shared_dim", synthetic.shared_dim);
    b.bind("synthetic", "specific_dim", synthetic.specific_dim);
    b.bind("synthetic", "dense_mean", synthetic.dense_mean);
    b.bind("synthetic", "sparse_ratio", synthetic.sparse_ratio);
    b.bind("synthetic", "shared_weight", synthetic.shared_weight);
    b.bind("synthetic", "temperature", synthetic.temperature);
    b.bind("synthetic", "seed", synthetic.seed);
  }

  // Canonical text of every field, defaults included.
  std::string to_ini() const {
    RunConfig copy = *this;
    ConfigBinder b;
    copy.bind(b);
    return b.to_ini();
  }

  std::string digest() const { return fnv1a_hex(to_ini()); }

  void validate() const {
    model.validate();
    train.validate();
    if (eval.k == 0) throw ConfigError("eval.k must be at least 1");
    if (eval.split != "validation" && eval.split != "test")
      throw ConfigError("eval.split must be validation or test, got '" + eval.split + "'");
    if (data.delimiter.size() != 1) throw ConfigError("data.delimiter must be a single character");
  }

  std::filesystem::path resolve(const std::string& p) const {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  }
  std::filesystem::path prepared_dir() const { return resolve(data.prepared); }
  std::filesystem::path output_dir() const { return resolve(output.dir); }

  static RunConfig from_text(const std::string& text, const std::string& source) {
    RunConfig c;
    ConfigBinder b;
    c.bind(b);
    b.load_text(text, source);
    return c;
  }

  static RunConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string(), "cannot open config");
    RunConfig c;
    ConfigBinder b;
    c.bind(b);
    b.load(in, path.string());
    c.base_dir = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
    return c;
  }
};

}  // namespace areil::cli
