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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "areil/error.hpp"
#include "areil/numcore/matrix.hpp"

namespace areil {

// A named trainable array with its gradient buffer and Adam moments.
struct Parameter {
  std::string name;
  DenseMatrix value;
  DenseMatrix grad;
  DenseMatrix m;
  DenseMatrix v;
  // Frozen parameters are skipped by the optimizer and by regularization.
  bool trainable = true;

  Parameter(std::string n, DenseMatrix initial)
      : name(std::move(n)),
        value(std::move(initial)),
        grad(value.rows(), value.cols()),
        m(value.rows(), value.cols()),
        v(value.rows(), value.cols()) {}
};

// Insertion-ordered collection of parameters. Handles returned by add() are
// stable indices.
class ParameterStore {
 public:
  std::size_t add(const std::string& name, DenseMatrix initial) {
    if (index_.contains(name)) throw ConfigError("duplicate parameter name: " + name);
    index_.emplace(name, params_.size());
    params_.emplace_back(name, std::move(initial));
    return params_.size() - 1;
  }

  Parameter& operator[](std::size_t handle) { return params_.at(handle); }
  const Parameter& operator[](std::size_t handle) const { return params_.at(handle); }

  Parameter& at(const std::string& name) { return params_.at(handle_of(name)); }
  const Parameter& at(const std::string& name) const { return params_.at(handle_of(name)); }

  bool contains(const std::string& name) const { return index_.contains(name); }

  std::size_t handle_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("unknown parameter: " + name);
    return it->second;
  }

  std::size_t size() const noexcept { return params_.size(); }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  void zero_grad() {
    for (auto& p : params_) p.grad.set_zero();
  }

  std::uint64_t step_count = 0;

 private:
  std::vector<Parameter> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One bias-corrected Adam update over every trainable parameter, then zeroes
// all gradients. Gradients are validated before anything is modified.
inline void adam_step(ParameterStore& store, const AdamConfig& cfg) {
  for (const auto& p : store) {
    if (!p.trainable) continue;
    if (!p.grad.all_finite()) throw NumericError("non-finite gradient in parameter " + p.name);
  }
  const std::uint64_t t = store.step_count + 1;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (auto& p : store) {
    if (!p.trainable) continue;
    auto value = p.value.values();
    auto grad = p.grad.values();
    auto m = p.m.values();
    auto v = p.v.values();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = grad[i];
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      value[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
  }
  store.zero_grad();
  store.step_count = t;
}

}  // namespace areil
