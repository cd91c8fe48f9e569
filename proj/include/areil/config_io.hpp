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

#include <charconv>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/core.h>

#include "areil/error.hpp"
#include "areil/model/config.hpp"
#include "areil/trainer/train_config.hpp"

namespace areil {

namespace detail {

template <typename T>
T parse_config_value(std::string_view text, const std::string& where) {
  if constexpr (std::is_same_v<T, std::string>) {
    return std::string(text);
  } else if constexpr (std::is_same_v<T, Variant>) {
    return parse_variant(text);
  } else if constexpr (std::is_same_v<T, bool>) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ConfigError(where + ": expected true or false, got '" + std::string(text) + "'");
  } else {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
      throw ConfigError(where + ": cannot parse '" + std::string(text) + "' as a number");
    return value;
  }
}

template <typename T>
std::string format_config_value(const T& value) {
  if constexpr (std::is_same_v<T, std::string>) {
    return value;
  } else if constexpr (std::is_same_v<T, Variant>) {
    return std::string(variant_name(value));
  } else if constexpr (std::is_same_v<T, bool>) {
    return value ? "true" : "false";
  } else {
    return fmt::format("{}", value);  // shortest round-trip form for reals
  }
}

}  // namespace detail

// Binds `section.key` names to fields of caller-owned structs so one table
// drives both parsing and serialization. Unknown sections and keys are errors.
class ConfigBinder {
 public:
  template <typename T>
  void bind(const std::string& section, const std::string& key, T& field) {
    Field f;
    f.section = section;
    f.key = key;
    f.set = [&field, section, key](std::string_view text) {
      field = detail::parse_config_value<T>(text, section + "." + key);
    };
    f.get = [&field] { return detail::format_config_value(field); };
    fields_.push_back(std::move(f));
  }

  void load(std::istream& in, const std::string& source) {
    boost::property_tree::ptree tree;
    try {
      boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ParseError(source, e.line(), e.message());
    }
    for (const auto& [section, body] : tree) {
      if (body.empty()) {
        if (!has_section(section))
          throw ConfigError(source + ": key '" + section + "' appears outside any section");
        continue;
      }
      if (!has_section(section)) throw ConfigError(source + ": unknown section [" + section + "]");
      for (const auto& [key, value] : body) {
        Field* f = find(section, key);
        if (f == nullptr) throw ConfigError(source + ": unknown key '" + key + "' in section [" + section + "]");
        f->set(value.data());
      }
    }
  }

  void load_text(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    load(in, source);
  }

  // Applies a single `section.key=value` override.
  void set(const std::string& dotted, const std::string& value) {
    const auto dot = dotted.find('.');
    Field* f = dot == std::string::npos ? nullptr : find(dotted.substr(0, dot), dotted.substr(dot + 1));
    if (f == nullptr) throw ConfigError("unknown config key '" + dotted + "'");
    f->set(value);
  }

  std::string to_ini() const {
    std::string out;
    std::string current;
    for (const auto& f : fields_) {
      if (f.section != current) {
        if (!current.empty()) out += '\n';
        out += "[" + f.section + "]\n";
        current = f.section;
      }
      out += f.key + " = " + f.get() + "\n";
    }
    return out;
  }

  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    for (const auto& f : fields_) out.push_back(f.section + "." + f.key);
    return out;
  }

 private:
  struct Field {
    std::string section;
    std::string key;
    std::function<void(std::string_view)> set;
    std::function<std::string()> get;
  };

  bool has_section(const std::string& section) const {
    for (const auto& f : fields_)
      if (f.section == section) return true;
    return false;
  }

  Field* find(const std::string& section, const std::string& key) {
    for (auto& f : fields_)
      if (f.section == section && f.key == key) return &f;
    return nullptr;
  }

  std::vector<Field> fields_;
};

inline void bind_model_config(ConfigBinder& b, ModelConfig& c) {
  b.bind("model", "variant", c.variant);
  b.bind("model", "embed_dim", c.embed_dim);
  b.bind("model", "gcn_layers", c.gcn_layers);
  b.bind("model", "gamma_s", c.gamma_s);
  b.bind("model", "gamma_t", c.gamma_t);
  b.bind("model", "lambda1", c.lambda1);
  b.bind("model", "lambda2", c.lambda2);
  b.bind("model", "grl_lambda_max", c.grl_lambda_max);
  b.bind("model", "classifier_hidden", c.classifier_hidden);
}

inline void bind_train_config(ConfigBinder& b, TrainConfig& c) {
  b.bind("train", "learning_rate", c.learning_rate);
  b.bind("train", "batch_size", c.batch_size);
  b.bind("train", "negatives_per_positive", c.negatives_per_positive);
  b.bind("train", "max_epochs", c.max_epochs);
  b.bind("train", "patience", c.patience);
  b.bind("train", "seed", c.seed);
  b.bind("train", "beta1", c.beta1);
  b.bind("train", "beta2", c.beta2);
  b.bind("train", "eps", c.eps);
  b.bind("train", "eval_k", c.eval_k);
}

// Model and training configuration as INI text, as stored in checkpoints.
inline std::string model_train_ini(ModelConfig model, TrainConfig train) {
  ConfigBinder b;
  bind_model_config(b, model);
  bind_train_config(b, train);
  return b.to_ini();
}

inline void parse_model_train_ini(const std::string& text, const std::string& source, ModelConfig& model,
                                  TrainConfig& train) {
  ConfigBinder b;
  bind_model_config(b, model);
  bind_train_config(b, train);
  b.load_text(text, source);
}

}  // namespace areil
