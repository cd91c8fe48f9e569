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

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "areil/corpus/graph.hpp"
#include "areil/model/classifier.hpp"
#include "areil/model/config.hpp"
#include "areil/model/disentangle.hpp"
#include "areil/model/enhance.hpp"
#include "areil/model/propagate.hpp"
#include "areil/numcore/parameter_store.hpp"

namespace areil {

using DomainGraphs = std::array<DomainGraph, 2>;

// All trainable state of the two-domain model.
struct ModelState {
  ModelConfig config;  // already resolved for its variant
  std::size_t num_users = 0;
  std::array<std::size_t, 2> num_items{0, 0};
  ParameterStore params;

  struct Handles {
    std::array<std::size_t, 2> user{}, item{}, query{}, key{};
    std::size_t cls_w1 = 0, cls_b1 = 0, cls_w2 = 0, cls_b2 = 0;
  } handles;

  const DenseMatrix& user_emb(Domain d) const { return params[handles.user[idx(d)]].value; }
  const DenseMatrix& item_emb(Domain d) const { return params[handles.item[idx(d)]].value; }
  const DenseMatrix& query_weights(Domain d) const { return params[handles.query[idx(d)]].value; }
  const DenseMatrix& key_weights(Domain d) const { return params[handles.key[idx(d)]].value; }

  ClassifierView classifier() const {
    return {params[handles.cls_w1].value, params[handles.cls_b1].value, params[handles.cls_w2].value,
            params[handles.cls_b2].value};
  }
};

// Parameter names in insertion (and checkpoint) order.
inline std::vector<std::string> model_parameter_names() {
  return {"user_emb_x",   "user_emb_y",  "item_emb_x",   "item_emb_y",    "attn_query_x",  "attn_key_x",
          "attn_query_y", "attn_key_y",  "classifier_w1", "classifier_b1", "classifier_w2", "classifier_b2"};
}

// Inactive modules are frozen so neither the optimizer nor the
// regularizer touches them: the classifier when lambda1 = 0, a domain's
// attention weights when its gamma = 1.
inline void apply_trainable_flags(ModelState& m) {
  const bool classifier_on = m.config.lambda1 != 0.0;
  for (auto h : {m.handles.cls_w1, m.handles.cls_b1, m.handles.cls_w2, m.handles.cls_b2})
    m.params[h].trainable = classifier_on;
  for (Domain d : kDomains) {
    const bool attention_on = m.config.gamma(d) != 1.0;
    m.params[m.handles.query[idx(d)]].trainable = attention_on;
    m.params[m.handles.key[idx(d)]].trainable = attention_on;
  }
}

// Builds the parameter layout. `init` supplies each named matrix.
template <typename Init>
ModelState make_model(const ModelConfig& config, std::size_t num_users, std::size_t num_items_x,
                      std::size_t num_items_y, Init&& init) {
  ModelState m;
  m.config = config.resolved();
  m.num_users = num_users;
  m.num_items = {num_items_x, num_items_y};
  const std::size_t d = m.config.embed_dim;
  const std::size_t joint = m.config.full_width();  // 2 * shared width
  const std::size_t hidden = m.config.hidden_width();
  const std::size_t shared = m.config.shared_width();
  auto& p = m.params;
  auto& h = m.handles;
  h.user[0] = p.add("user_emb_x", init("user_emb_x", num_users, d));
  h.user[1] = p.add("user_emb_y", init("user_emb_y", num_users, d));
  h.item[0] = p.add("item_emb_x", init("item_emb_x", num_items_x, d));
  h.item[1] = p.add("item_emb_y", init("item_emb_y", num_items_y, d));
  h.query[0] = p.add("attn_query_x", init("attn_query_x", joint, joint));
  h.key[0] = p.add("attn_key_x", init("attn_key_x", joint, joint));
  h.query[1] = p.add("attn_query_y", init("attn_query_y", joint, joint));
  h.key[1] = p.add("attn_key_y", init("attn_key_y", joint, joint));
  h.cls_w1 = p.add("classifier_w1", init("classifier_w1", hidden, shared));
  h.cls_b1 = p.add("classifier_b1", init("classifier_b1", 1, hidden));
  h.cls_w2 = p.add("classifier_w2", init("classifier_w2", hidden, 1));
  h.cls_b2 = p.add("classifier_b2", init("classifier_b2", 1, 1));
  apply_trainable_flags(m);
  return m;
}

// Random initialization: matrices uniform in +-0.5/sqrt(cols), biases zero.
inline ModelState init_model(const ModelConfig& config, std::size_t num_users, std::size_t num_items_x,
                             std::size_t num_items_y, std::uint64_t seed) {
  Rng rng(seed);
  return make_model(config, num_users, num_items_x, num_items_y,
                    [&](const std::string& name, std::size_t rows, std::size_t cols) {
                      if (name == "classifier_b1" || name == "classifier_b2") return DenseMatrix(rows, cols);
                      return DenseMatrix::uniform(rows, cols, 0.5 / std::sqrt(static_cast<double>(cols)), rng);
                    });
}

struct DomainForward {
  DenseMatrix user_out;    // |U| x (K+1)d, propagated and concatenated
  DenseMatrix item_out;    // |V| x (K+1)d
  DenseMatrix shared;      // |U| x D'
  DenseMatrix specific;    // |U| x D'
  DenseMatrix enhanced;    // |U| x D', fused shared part
  DenseMatrix user_final;  // |U| x (K+1)d, enhanced and specific re-interleaved
  EnhanceCache enhance;
};

struct ForwardCache {
  std::array<DomainForward, 2> domains;
  const DomainForward& domain(Domain d) const { return domains[idx(d)]; }
  DomainForward& domain(Domain d) { return domains[idx(d)]; }
};

struct ForwardOptions {
  // Bypasses inter-domain fusion entirely (enhanced = shared). Only used to
  // check that gamma = 1 matches a model without the fusion code path.
  bool skip_enhancement = false;
};

inline void check_graphs(const ModelState& m, const DomainGraphs& graphs) {
  for (Domain d : kDomains) {
    const auto& g = graphs[idx(d)];
    if (g.num_users != m.num_users || g.num_items != m.num_items[idx(d)]) {
      throw ShapeError(std::string("graph for domain ") + domain_tag(d) + " has " +
                       std::to_string(g.num_users) + " users / " + std::to_string(g.num_items) +
                       " items; model expects " + std::to_string(m.num_users) + " / " +
                       std::to_string(m.num_items[idx(d)]));
    }
  }
}

// propagate -> split -> enhance -> reassemble, for both domains.
inline ForwardCache forward(const ModelState& m, const DomainGraphs& graphs, ForwardOptions opts = {}) {
  check_graphs(m, graphs);
  const std::size_t d = m.config.embed_dim;
  const std::size_t layers = m.config.gcn_layers;
  ForwardCache cache;
  for (Domain dom : kDomains) {
    auto& f = cache.domain(dom);
    auto prop = propagate_and_concat(graphs[idx(dom)], m.user_emb(dom), m.item_emb(dom), layers);
    f.user_out = std::move(prop.users);
    f.item_out = std::move(prop.items);
    auto split = split_user_embedding(f.user_out, d);
    f.shared = std::move(split.shared);
    f.specific = std::move(split.specific);
  }
  for (Domain dom : kDomains) {
    auto& f = cache.domain(dom);
    if (opts.skip_enhancement) {
      f.enhanced = f.shared;
    } else {
      auto res = inter_domain_enhance(f.shared, cache.domain(other(dom)).shared, m.query_weights(dom),
                                      m.key_weights(dom), m.config.gamma(dom));
      f.enhanced = std::move(res.enhanced);
      f.enhance = std::move(res.cache);
    }
    f.user_final = merge_user_embedding(f.enhanced, f.specific, d);
  }
  return cache;
}

// Upstream gradients for one domain. Any matrix may be left empty.
struct DomainUpstream {
  DenseMatrix d_user_final;  // |U| x (K+1)d
  DenseMatrix d_item_out;    // |V| x (K+1)d
  DenseMatrix d_enhanced;    // |U| x D'
  DenseMatrix d_specific;    // |U| x D'
};

// Pushes upstream gradients back to every embedding and attention parameter,
// accumulating into the store's gradient buffers.
inline void backward(ModelState& m, const DomainGraphs& graphs, const ForwardCache& cache,
                     std::array<DomainUpstream, 2>& up) {
  const std::size_t d = m.config.embed_dim;
  const std::size_t layers = m.config.gcn_layers;
  const std::size_t users = m.num_users;
  const std::size_t half = m.config.shared_width();

  std::array<DenseMatrix, 2> d_enh, d_spe, d_shared;
  for (Domain dom : kDomains) {
    const std::size_t i = idx(dom);
    d_enh[i] = DenseMatrix(users, half);
    d_spe[i] = DenseMatrix(users, half);
    d_shared[i] = DenseMatrix(users, half);
    if (!up[i].d_user_final.empty()) {
      auto parts = split_user_embedding(up[i].d_user_final, d);
      d_enh[i] += parts.shared;
      d_spe[i] += parts.specific;
    }
    if (!up[i].d_enhanced.empty()) d_enh[i] += up[i].d_enhanced;
    if (!up[i].d_specific.empty()) d_spe[i] += up[i].d_specific;
  }

  for (Domain dom : kDomains) {
    const std::size_t i = idx(dom);
    const auto& f = cache.domain(dom);
    const auto& f_other = cache.domain(other(dom));
    if (f.enhance.gate.empty()) {  // forward ran with skip_enhancement
      d_shared[i] += d_enh[i];
      continue;
    }
    auto g =enhance_backward(f.shared, f_other.shared, m.query_weights(dom), m.key_weights(dom),
                              m.config.gamma(dom), f.enhance, d_enh[i]);
    d_shared[i] += g.d_self;
    d_shared[idx(other(dom))] += g.d_other;
    m.params[m.handles.query[i]].grad += g.d_wq;
    m.params[m.handles.key[i]].grad += g.d_wk;
  }

  for (Domain dom : kDomains) {
    const std::size_t i = idx(dom);
    const DenseMatrix d_user_out = merge_user_embedding(d_shared[i], d_spe[i], d);
    DenseMatrix d_item_out = up[i].d_item_out.empty()
                                 ? DenseMatrix(m.num_items[i], m.config.full_width())
                                 : std::move(up[i].d_item_out);
    auto g = propagate_backward(graphs[i], d_user_out, d_item_out, layers);
    m.params[m.handles.user[i]].grad += g.users;
    m.params[m.handles.item[i]].grad += g.items;
  }
}

// Raw (pre-logistic) dot-product scores, one per row pair.
inline std::vector<double> predict_scores(const DenseMatrix& user_final, const DenseMatrix& item_final) {
  DenseMatrix::require_same_shape(user_final, item_final, "predict_scores");
  std::vector<double> scores(user_final.rows());
  for (std::size_t b = 0; b < scores.size(); ++b) scores[b] = dot(user_final.row(b), item_final.row(b));
  return scores;
}

}  // namespace areil
