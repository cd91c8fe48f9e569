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

// Inter-domain enhancement of shared user embeddings.
//
// With Z = [shared_self || shared_other] (|U| x 2D'), Q = Z Wq and K = Z Wk,
// the attention matrix is ATT = Q^T K (2D' x 2D'). Summing ATT over the query
// axis gives a feature distribution p over the 2D' key positions. The slice of
// p that covers the other domain's block gates the other domain's shared
// embedding:
//
//   gate     = D' * softmax(p[D'..2D'))
//   c        = shared_other (.) gate          (row-wise broadcast)
//   enhanced = gamma * shared_self + (1 - gamma) * c
//
// p never needs ATT explicitly: p = Wk^T Z^T (Z Wq 1). attention_matrix() and
// feature_distribution() build the explicit route for verification.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "areil/error.hpp"
#include "areil/numcore/matrix.hpp"

namespace areil {

// softmax(v) * len(v): mean value 1, so a constant input maps to all ones.
inline std::vector<double> scaled_softmax(std::span<const double> v) {
  std::vector<double> out(v.size());
  if (v.empty()) return out;
  const double peak = *std::max_element(v.begin(), v.end());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - peak);
    total += out[i];
  }
  const double scale = static_cast<double>(v.size()) / total;
  for (auto& x : out) x *= scale;
  return out;
}

inline DenseMatrix concat_columns(const DenseMatrix& left, const DenseMatrix& right) {
  if (left.rows() != right.rows())
    throw ShapeError("concat: " + left.shape_string() + " vs " + right.shape_string());
  DenseMatrix out(left.rows(), left.cols() + right.cols());
  for (std::size_t r = 0; r < left.rows(); ++r) {
    auto dst = out.row(r);
    std::copy(left.row(r).begin(), left.row(r).end(), dst.begin());
    std::copy(right.row(r).begin(), right.row(r).end(),
              dst.begin() + static_cast<std::ptrdiff_t>(left.cols()));
  }
  return out;
}

// Explicit Q^T K.
inline DenseMatrix attention_matrix(const DenseMatrix& shared_self, const DenseMatrix& shared_other,
                                    const DenseMatrix& wq, const DenseMatrix& wk) {
  const DenseMatrix z = concat_columns(shared_self, shared_other);
  return matmul_tn(matmul(z, wq), matmul(z, wk));
}

// Column sums of the attention matrix (summed over the query axis).
inline std::vector<double> feature_distribution(const DenseMatrix& att) {
  std::vector<double> p(att.cols(), 0.0);
  for (std::size_t i = 0; i < att.rows(); ++i) {
    auto row = att.row(i);
    for (std::size_t j = 0; j < p.size(); ++j) p[j] += row[j];
  }
  return p;
}

struct EnhanceCache {
  std::vector<double> query_rowsum;  // Wq 1, length 2D'
  std::vector<double> user_scores;   // s = Z Wq 1, length |U|
  std::vector<double> pooled;        // t = Z^T s, length 2D'
  std::vector<double> distribution;  // p, length 2D'
  std::vector<double> gate;          // length D'
};

struct EnhanceResult {
  DenseMatrix enhanced;
  EnhanceCache cache;
};

struct EnhanceGrads {
  DenseMatrix d_self;
  DenseMatrix d_other;
  DenseMatrix d_wq;
  DenseMatrix d_wk;
};

namespace detail {

inline void check_enhance_shapes(const DenseMatrix& self, const DenseMatrix& other, const DenseMatrix& wq,
                                 const DenseMatrix& wk, double gamma) {
  DenseMatrix::require_same_shape(self, other, "inter_domain_enhance");
  const std::size_t joint = 2 * self.cols();
  if (wq.rows() != joint || wq.cols() != joint || wk.rows() != joint || wk.cols() != joint) {
    throw ShapeError("inter_domain_enhance: attention weights " + wq.shape_string() + ", " +
                     wk.shape_string() + " must be " + std::to_string(joint) + "x" + std::to_string(joint));
  }
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw ConfigError("gamma must lie in (0, 1], got " + std::to_string(gamma));
}

}  // namespace detail

inline EnhanceResult inter_domain_enhance(const DenseMatrix& shared_self, const DenseMatrix& shared_other,
                                          const DenseMatrix& wq, const DenseMatrix& wk, double gamma) {
  detail::check_enhance_shapes(shared_self, shared_other, wq, wk, gamma);
  const std::size_t users = shared_self.rows();
  const std::size_t half = shared_self.cols();
  const std::size_t joint = 2 * half;

  EnhanceResult res;
  EnhanceCache& c = res.cache;
  c.query_rowsum.assign(joint, 0.0);
  for (std::size_t a = 0; a < joint; ++a) {
    for (double w : wq.row(a)) c.query_rowsum[a] += w;
  }
  c.user_scores.assign(users, 0.0);
  c.pooled.assign(joint, 0.0);
  for (std::size_t u = 0; u < users; ++u) {
    auto zs = shared_self.row(u);
    auto zo = shared_other.row(u);
    double s = 0.0;
    for (std::size_t a = 0; a < half; ++a) s += zs[a] * c.query_rowsum[a];
    for (std::size_t a = 0; a < half; ++a) s += zo[a] * c.query_rowsum[half + a];
    c.user_scores[u] = s;
    for (std::size_t a = 0; a < half; ++a) c.pooled[a] += zs[a] * s;
    for (std::size_t a = 0; a < half; ++a) c.pooled[half + a] += zo[a] * s;
  }
  c.distribution.assign(joint, 0.0);
  for (std::size_t a = 0; a < joint; ++a) {
    auto wrow = wk.row(a);
    for (std::size_t j = 0; j < joint; ++j) c.distribution[j] += wrow[j] * c.pooled[a];
  }
  c.gate = scaled_softmax(std::span<const double>(c.distribution).subspan(half));

  res.enhanced = DenseMatrix(users, half);
  for (std::size_t u = 0; u < users; ++u) {
    auto out = res.enhanced.row(u);
    auto zs = shared_self.row(u);
    auto zo = shared_other.row(u);
    for (std::size_t j = 0; j < half; ++j) out[j] = gamma * zs[j] + (1.0 - gamma) * zo[j] * c.gate[j];
  }
  return res;
}

inline EnhanceGrads enhance_backward(const DenseMatrix& shared_self, const DenseMatrix& shared_other,
                                     const DenseMatrix& wq, const DenseMatrix& wk, double gamma,
                                     const EnhanceCache& c, const DenseMatrix& d_enhanced) {
  detail::check_enhance_shapes(shared_self, shared_other, wq, wk, gamma);
  DenseMatrix::require_same_shape(shared_self, d_enhanced, "enhance_backward");
  const std::size_t users = shared_self.rows();
  const std::size_t half = shared_self.cols();
  const std::size_t joint = 2 * half;

  EnhanceGrads g{DenseMatrix(users, half), DenseMatrix(users, half), DenseMatrix(joint, joint),
                 DenseMatrix(joint, joint)};
  std::vector<double> d_gate(half, 0.0);
  for (std::size_t u = 0; u < users; ++u) {
    auto de = d_enhanced.row(u);
    auto zo = shared_other.row(u);
    auto ds = g.d_self.row(u);
    auto dother = g.d_other.row(u);
    for (std::size_t j = 0; j < half; ++j) {
      const double dc = (1.0 - gamma) * de[j];
      ds[j] = gamma * de[j];
      dother[j] = dc * c.gate[j];
      d_gate[j] += dc * zo[j];
    }
  }

  // gate = n * softmax(r): dr_j = gate_j * (d_gate_j - sum_k softmax_k d_gate_k)
  double weighted = 0.0;
  for (std::size_t j = 0; j < half; ++j) weighted += c.gate[j] * d_gate[j];
  weighted /= static_cast<double>(half);
  std::vector<double> d_dist(joint, 0.0);
  for (std::size_t j = 0; j < half; ++j) d_dist[half + j] = c.gate[j] * (d_gate[j] - weighted);

  // p = Wk^T t
  std::vector<double> d_pooled(joint, 0.0);
  for (std::size_t a = 0; a < joint; ++a) {
    auto wrow = wk.row(a);
    auto grow = g.d_wk.row(a);
    double acc = 0.0;
    for (std::size_t j = 0; j < joint; ++j) {
      grow[j] = c.pooled[a] * d_dist[j];
      acc += wrow[j] * d_dist[j];
    }
    d_pooled[a] = acc;
  }

  // t = Z^T s and s = Z q
  std::vector<double> d_rowsum(joint, 0.0);
  for (std::size_t u = 0; u < users; ++u) {
    auto zs = shared_self.row(u);
    auto zo = shared_other.row(u);
    double d_score = 0.0;
    for (std::size_t a = 0; a < half; ++a) d_score += zs[a] * d_pooled[a];
    for (std::size_t a = 0; a < half; ++a) d_score += zo[a] * d_pooled[half + a];
    const double s = c.user_scores[u];
    auto ds = g.d_self.row(u);
    auto dother = g.d_other.row(u);
    for (std::size_t a = 0; a < half; ++a) {
      ds[a] += s * d_pooled[a] + d_score * c.query_rowsum[a];
      dother[a] += s * d_pooled[half + a] + d_score * c.query_rowsum[half + a];
      d_rowsum[a] += zs[a] * d_score;
      d_rowsum[half + a] += zo[a] * d_score;
    }
  }
  for (std::size_t a = 0; a < joint; ++a) std::fill(g.d_wq.row(a).begin(), g.d_wq.row(a).end(), d_rowsum[a]);
  return g;
}

}  // namespace areil
