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

#include <cmath>
#include <cstring>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "areil/model/classifier.hpp"
#include "areil/model/disentangle.hpp"
#include "areil/model/enhance.hpp"
#include "areil/model/grl.hpp"
#include "areil/model/model.hpp"
#include "areil/model/propagate.hpp"
#include "support/oracles.hpp"

namespace areil {
namespace {

using testing::random_matrix;

TEST(Propagate, ZeroLayersIsIdentity) {
  Rng rng(1);
  const auto g = build_graph(testing::random_interactions(rng, 4, 5, 0.4), 4, 5);
  const auto eu = random_matrix(rng, 4, 6), ei = random_matrix(rng, 5, 6);
  const auto out = propagate_and_concat(g, eu, ei, 0);
  EXPECT_EQ(max_abs_diff(out.users, eu), 0.0);
  EXPECT_EQ(max_abs_diff(out.items, ei), 0.0);
}

TEST(Propagate, SingleEdgeOneLayer) {
  const auto g = build_graph(std::vector<Interaction>{{0, 0}}, 1, 1);
  const auto eu = DenseMatrix::from_rows({{0.5, -1.0}});
  const auto ei = DenseMatrix::from_rows({{3.0, 4.0}});
  const auto out = propagate_and_concat(g, eu, ei, 1);
  EXPECT_EQ(out.users.row(0)[0], 0.5);
  EXPECT_EQ(out.users.row(0)[1], -1.0);
  EXPECT_EQ(out.users.row(0)[2], 3.0);
  EXPECT_EQ(out.users.row(0)[3], 4.0);
}

TEST(Propagate, ToyGraphTwoLayersMatchesDenseOracle) {
  const std::vector<Interaction> edges{{0, 0}, {0, 1}, {1, 1}};
  const auto g = build_graph(edges, 2, 2);
  Rng rng(2);
  const auto eu = random_matrix(rng, 2, 4), ei = random_matrix(rng, 2, 4);
  const auto out = propagate_and_concat(g, eu, ei, 2);
  const auto [ou, oi] = testing::dense_propagate(edges, 2, 2, eu, ei, 2);
  EXPECT_LT(max_abs_diff(out.users, ou), 1e-15);
  EXPECT_LT(max_abs_diff(out.items, oi), 1e-15);
}

TEST(Propagate, ShapeMismatchThrows) {
  const auto g = build_graph(std::vector<Interaction>{{0, 0}}, 1, 1);
  EXPECT_THROW(propagate_and_concat(g, DenseMatrix(2, 2), DenseMatrix(1, 2), 1), ShapeError);
  EXPECT_THROW(propagate_and_concat(g, DenseMatrix(1, 2), DenseMatrix(1, 3), 1), ShapeError);
}

TEST(PropagateProperty, BackwardIsAdjointOfForward) {
  // <propagate(E), G> == <E, propagate_backward(G)> for random E and G.
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t users = 1 + rng.index(8), items = 1 + rng.index(8), d = 2 + rng.index(4), k = rng.index(4);
    const auto g = build_graph(testing::random_interactions(rng, users, items, 0.4), users, items);
    const auto eu = random_matrix(rng, users, d), ei = random_matrix(rng, items, d);
    const auto gu = random_matrix(rng, users, (k + 1) * d), gi = random_matrix(rng, items, (k + 1) * d);
    const auto fwd = propagate_and_concat(g, eu, ei, k);
    const auto bwd = propagate_backward(g, gu, gi, k);
    const double lhs = std::inner_product(fwd.users.values().begin(), fwd.users.values().end(), gu.values().begin(), 0.0) +
                       std::inner_product(fwd.items.values().begin(), fwd.items.values().end(), gi.values().begin(), 0.0);
    const double rhs = std::inner_product(eu.values().begin(), eu.values().end(), bwd.users.values().begin(), 0.0) +
                       std::inner_product(ei.values().begin(), ei.values().end(), bwd.items.values().begin(), 0.0);
    EXPECT_NEAR(lhs, rhs, 1e-12 * (1.0 + std::abs(lhs)));
  }
}

TEST(Split, WidthsForDefaultGrid) {
  const auto s = split_user_embedding(DenseMatrix(3, 64 * 4), 64);
  EXPECT_EQ(s.shared.cols(), 128u);
  EXPECT_EQ(s.specific.cols(), 128u);
}

TEST(Split, TwoColumnRow) {
  const auto s = split_user_embedding(DenseMatrix::from_rows({{7.0, -3.0}}), 2);
  EXPECT_EQ(s.shared(0, 0), 7.0);
  EXPECT_EQ(s.specific(0, 0), -3.0);
}

TEST(Split, OddWidthIsConfigError) {
  EXPECT_THROW(split_user_embedding(DenseMatrix(1, 3), 3), ConfigError);
  EXPECT_THROW(split_user_embedding(DenseMatrix(1, 6), 4), ShapeError);
}

TEST(SplitProperty, RoundTripAndLayerOrder) {
  Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 2 * (1 + rng.index(4)), blocks = 1 + rng.index(4);
    const auto m = random_matrix(rng, 1 + rng.index(5), d * blocks);
    const auto s = split_user_embedding(m, d);
    EXPECT_EQ(max_abs_diff(merge_user_embedding(s.shared, s.specific, d), m), 0.0);
    for (std::size_t b = 0; b < blocks; ++b)
      for (std::size_t c = 0; c < d / 2; ++c) {
        EXPECT_EQ(s.shared(0, b * d / 2 + c), m(0, b * d + c));
        EXPECT_EQ(s.specific(0, b * d / 2 + c), m(0, b * d + d / 2 + c));
      }
  }
}

TEST(SplitProperty, CommutesWithPropagation) {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t users = 1 + rng.index(10), items = 1 + rng.index(10), d = 2 * (1 + rng.index(4)), k = rng.index(4);
    const auto g = build_graph(testing::random_interactions(rng, users, items, 0.3), users, items);
    const auto eu = random_matrix(rng, users, d), ei = random_matrix(rng, items, d);
    const auto full = split_user_embedding(propagate_and_concat(g, eu, ei, k).users, d);
    const auto su = split_user_embedding(eu, d), si = split_user_embedding(ei, d);
    const auto half_shared = propagate_and_concat(g, su.shared, si.shared, k).users;
    const auto half_specific = propagate_and_concat(g, su.specific, si.specific, k).users;
    EXPECT_EQ(max_abs_diff(full.shared, half_shared), 0.0);
    EXPECT_EQ(max_abs_diff(full.specific, half_specific), 0.0);
  }
}

TEST(Enhance, GammaOneKeepsSelf) {
  Rng rng(6);
  const auto self = random_matrix(rng, 5, 3), other = random_matrix(rng, 5, 3);
  const auto r = inter_domain_enhance(self, other, random_matrix(rng, 6, 6), random_matrix(rng, 6, 6), 1.0);
  EXPECT_EQ(max_abs_diff(r.enhanced, self), 0.0);
}

TEST(Enhance, HandEvaluatedScalarCase) {
  const auto self = DenseMatrix::from_rows({{2.0}}), other = DenseMatrix::from_rows({{1.0}});
  const auto eye = DenseMatrix::identity(2);
  const auto att = attention_matrix(self, other, eye, eye);
  EXPECT_EQ(att(0, 0), 4.0);
  EXPECT_EQ(att(0, 1), 2.0);
  EXPECT_EQ(att(1, 0), 2.0);
  EXPECT_EQ(att(1, 1), 1.0);
  const auto p = feature_distribution(att);
  EXPECT_EQ(p[0], 6.0);
  EXPECT_EQ(p[1], 3.0);
  const auto r = inter_domain_enhance(self, other, eye, eye, 0.9);
  ASSERT_EQ(r.cache.gate.size(), 1u);
  EXPECT_DOUBLE_EQ(r.cache.gate[0], 1.0);
  EXPECT_DOUBLE_EQ(r.enhanced(0, 0), 1.9);
}

TEST(Enhance, ZeroOtherGivesScaledSelf) {
  Rng rng(7);
  const auto self = random_matrix(rng, 4, 2);
  const auto r = inter_domain_enhance(self, DenseMatrix(4, 2), random_matrix(rng, 4, 4), random_matrix(rng, 4, 4), 0.8);
  for (std::size_t i = 0; i < self.values().size(); ++i)
    EXPECT_DOUBLE_EQ(r.enhanced.values()[i], 0.8 * self.values()[i]);
}

TEST(Enhance, ErrorsOnShapesAndGamma) {
  Rng rng(8);
  const auto a = random_matrix(rng, 3, 2);
  const auto w = random_matrix(rng, 4, 4);
  EXPECT_THROW(inter_domain_enhance(a, random_matrix(rng, 3, 3), w, w, 0.9), ShapeError);
  EXPECT_THROW(inter_domain_enhance(a, a, random_matrix(rng, 3, 3), w, 0.9), ShapeError);
  EXPECT_THROW(inter_domain_enhance(a, a, w, w, 0.0), ConfigError);
  EXPECT_THROW(inter_domain_enhance(a, a, w, w, 1.5), ConfigError);
}

TEST(EnhanceProperty, PooledDistributionMatchesExplicitAttention) {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t users = 1 + rng.index(6), half = 1 + rng.index(4);
    const auto self = random_matrix(rng, users, half), other = random_matrix(rng, users, half);
    const auto wq = random_matrix(rng, 2 * half, 2 * half), wk = random_matrix(rng, 2 * half, 2 * half);
    const auto p = feature_distribution(attention_matrix(self, other, wq, wk));
    const double gamma = rng.uniform(0.05, 1.0);
    const auto r = inter_domain_enhance(self, other, wq, wk, gamma);
    const std::vector<double> tail(p.begin() + static_cast<std::ptrdiff_t>(half), p.end());
    const auto gate = scaled_softmax(tail);
    for (std::size_t c = 0; c < half; ++c) EXPECT_NEAR(r.cache.gate[c], gate[c], 1e-12);
    for (std::size_t u = 0; u < users; ++u)
      for (std::size_t c = 0; c < half; ++c)
        EXPECT_NEAR(r.enhanced(u, c), gamma * self(u, c) + (1 - gamma) * other(u, c) * gate[c], 1e-12);
  }
}

TEST(EnhanceProperty, ScaledSoftmaxSumsToLength) {
  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(1 + rng.index(10));
    for (auto& x : v) x = rng.uniform(-30, 30);
    const auto s = scaled_softmax(v);
    EXPECT_NEAR(std::accumulate(s.begin(), s.end(), 0.0), static_cast<double>(v.size()), 1e-12);
  }
  const std::vector<double> flat(5, 2.5);
  for (double g : scaled_softmax(flat)) EXPECT_DOUBLE_EQ(g, 1.0);
}

TEST(EnhanceProperty, ConstantDistributionPassesOtherThrough) {
  // Zero key weights make every p entry zero, hence an all-ones gate.
  Rng rng(11);
  const auto self = random_matrix(rng, 3, 2), other = random_matrix(rng, 3, 2);
  const auto r = inter_domain_enhance(self, other, random_matrix(rng, 4, 4), DenseMatrix(4, 4), 0.5);
  for (std::size_t i = 0; i < self.values().size(); ++i)
    EXPECT_DOUBLE_EQ(r.enhanced.values()[i], 0.5 * self.values()[i] + 0.5 * other.values()[i]);
}

TEST(Grl, ForwardIsBitExactIdentity) {
  Rng rng(12);
  auto x = random_matrix(rng, 7, 5, 1e6);
  x(0, 0) = -0.0;
  x(1, 1) = 5e-324;
  const auto y = apply_grl(x, 0.7);
  ASSERT_EQ(y.values().size(), x.values().size());
  EXPECT_EQ(std::memcmp(y.data(), x.data(), x.values().size() * sizeof(double)), 0);
}

TEST(Grl, BackwardScalesByMinusLambda) {
  Rng rng(13);
  const auto g = random_matrix(rng, 3, 4);
  const auto one = grl_backward(g, 1.0);
  for (std::size_t i = 0; i < g.values().size(); ++i) EXPECT_EQ(one.values()[i], -g.values()[i]);
  const auto zero = grl_backward(g, 0.0);
  for (double v : zero.values()) EXPECT_EQ(v, 0.0);
}

ClassifierWeights scalar_classifier() {
  ClassifierWeights w(1, 1);
  w.w1(0, 0) = 1.0;
  w.w2(0, 0) = 1.0;
  return w;
}

TEST(Classifier, ZeroWeightsGiveZeroLogits) {
  const ClassifierWeights w(4, 3);
  Rng rng(14);
  for (double z : domain_classify(w.view(), random_matrix(rng, 5, 4))) EXPECT_EQ(z, 0.0);
  EXPECT_DOUBLE_EQ(sigmoid(0.0), 0.5);
}

TEST(Classifier, ScalarReluNetwork) {
  const auto w = scalar_classifier();
  const auto logits = domain_classify(w.view(), DenseMatrix::from_rows({{2.5}, {-1.0}, {0.0}}));
  EXPECT_EQ(logits[0], 2.5);
  EXPECT_EQ(logits[1], 0.0);
  EXPECT_EQ(logits[2], 0.0);
}

TEST(Classifier, IdenticalRowsIdenticalLogitsAndShapeError) {
  Rng rng(15);
  const auto w = ClassifierWeights::random(3, 4, rng);
  const auto row = random_matrix(rng, 1, 3);
  DenseMatrix two(2, 3);
  std::copy(row.values().begin(), row.values().end(), two.row(0).begin());
  std::copy(row.values().begin(), row.values().end(), two.row(1).begin());
  const auto logits = domain_classify(w.view(), two);
  EXPECT_EQ(logits[0], logits[1]);
  EXPECT_THROW(domain_classify(w.view(), DenseMatrix(1, 2)), ShapeError);
}

TEST(ClassificationLoss, MaximumEntropyClassifier) {
  const ClassifierWeights w(3, 2);
  Rng rng(16);
  const auto r = classification_loss(w.view(), random_matrix(rng, 4, 3), random_matrix(rng, 4, 3),
                                     random_matrix(rng, 4, 3), random_matrix(rng, 4, 3), 1.0);
  EXPECT_NEAR(r.total(), 4.0 * std::log(2.0), 1e-15);
}

TEST(ClassificationLoss, SaturatedLogitsHitTheClamp) {
  auto w = scalar_classifier();
  w.w2(0, 0) = 100.0;
  w.b2(0, 0) = -50.0;
  // rows at 0 give logit -50, rows at 1 give +50; arguments are shared x/y, specific x/y
  const auto r = classification_loss(w.view(), DenseMatrix(2, 1), DenseMatrix(2, 1), DenseMatrix(2, 1),
                                     DenseMatrix(2, 1, 1.0), 1.0);
  const double floor_loss = -std::log(1.0 - kProbClamp);
  EXPECT_NEAR(r.loss_specific, 2.0 * floor_loss, 1e-24);
  EXPECT_NEAR(r.loss_shared, floor_loss - std::log(kProbClamp), 1e-12);
}

TEST(ClassificationLoss, ClampKeepsLossFinite) {
  auto w = scalar_classifier();
  w.w2(0, 0) = 1e6;
  const auto r = classification_loss(w.view(), DenseMatrix(1, 1, 1.0), DenseMatrix(1, 1), DenseMatrix(1, 1, 1.0),
                                     DenseMatrix(1, 1), 1.0);
  EXPECT_TRUE(std::isfinite(r.total()));
  EXPECT_NEAR(r.loss_specific, -std::log(1.0 - (1.0 - kProbClamp)) + std::log(2.0), 1e-12);
}

TEST(ClassificationLossProperty, SharedGradientIsReversedCopy) {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t width = 1 + rng.index(6);
    const auto w = ClassifierWeights::random(width, 1 + rng.index(4), rng);
    const auto sx = random_matrix(rng, 5, width), sy = random_matrix(rng, 5, width);
    const auto px = random_matrix(rng, 5, width), py = random_matrix(rng, 5, width);
    const double lambda = rng.uniform(0.0, 2.0);
    const auto rev = classification_loss(w.view(), sx, sy, px, py, lambda, GrlMode::reverse);
    const auto plain = classification_loss(w.view(), sx, sy, px, py, lambda, GrlMode::identity);
    EXPECT_EQ(rev.total(), plain.total());
    for (std::size_t i = 0; i < sx.values().size(); ++i) {
      EXPECT_NEAR(rev.d_shared_x.values()[i], -lambda * plain.d_shared_x.values()[i], 1e-15);
      EXPECT_NEAR(rev.d_shared_y.values()[i], -lambda * plain.d_shared_y.values()[i], 1e-15);
    }
    EXPECT_EQ(max_abs_diff(rev.d_specific_x, plain.d_specific_x), 0.0);
    EXPECT_EQ(max_abs_diff(rev.grads.w1, plain.grads.w1), 0.0);
  }
}

TEST(ClassificationLossProperty, DomainSwapSymmetry) {
  // Swapping the x and y inputs while negating the output layer relabels O.
  Rng rng(18);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t width = 1 + rng.index(5);
    auto w = ClassifierWeights::random(width, 1 + rng.index(4), rng);
    w.b2(0, 0) = rng.uniform(-1, 1);
    const auto sx = random_matrix(rng, 4, width), sy = random_matrix(rng, 4, width);
    const auto px = random_matrix(rng, 4, width), py = random_matrix(rng, 4, width);
    const double a = classification_loss(w.view(), sx, sy, px, py, 1.0).total();
    auto flipped = w;
    flipped.w2 *= -1.0;
    flipped.b2 *= -1.0;
    const double b = classification_loss(flipped.view(), sy, sx, py, px, 1.0).total();
    EXPECT_NEAR(a, b, 1e-12);
  }
}

TEST(ClassifierProperty, BackwardMatchesFiniteDifferences) {
  Rng rng(19);
  const std::size_t width = 4, hidden = 3;
  const auto w = ClassifierWeights::random(width, hidden, rng);
  const auto input = random_matrix(rng, 6, width);
  std::vector<double> labels{0, 1, 1, 0, 1, 0};
  const auto loss_of = [&](const DenseMatrix& in) {
    const auto logits = domain_classify(w.view(), in);
    return bce_with_logits(std::span<const double>(logits), std::span<const double>(labels)).loss;
  };
  const auto acts = classifier_forward(w.view(), input);
  const auto bce = bce_with_logits(std::span<const double>(acts.logits), std::span<const double>(labels));
  ClassifierGrads g(w.view());
  const auto d_in = classifier_backward(w.view(), input, acts, bce.d_logits, g);
  for (std::size_t i = 0; i < input.values().size(); ++i) {
    auto up = input, down = input;
    up.values()[i] += 1e-6;
    down.values()[i] -= 1e-6;
    EXPECT_NEAR(d_in.values()[i], (loss_of(up) - loss_of(down)) / 2e-6, 1e-8);
  }
}

TEST(Predict, DotProductExamples) {
  EXPECT_EQ(predict_scores(DenseMatrix::from_rows({{0.6, 0.8}}), DenseMatrix::from_rows({{0.6, 0.8}}))[0],
            0.36 + 0.64);
  EXPECT_EQ(predict_scores(DenseMatrix::from_rows({{1, 0}}), DenseMatrix::from_rows({{0, 1}}))[0], 0.0);
  EXPECT_EQ(predict_scores(DenseMatrix::from_rows({{1, 2}}), DenseMatrix::from_rows({{3, -1}}))[0], 1.0);
  EXPECT_THROW(predict_scores(DenseMatrix(1, 2), DenseMatrix(1, 3)), ShapeError);
}

TEST(ModelConfigTest, VariantsOverrideSettings) {
  ModelConfig c;
  c.variant = Variant::no_arem;
  EXPECT_EQ(c.resolved().gamma_s, 1.0);
  EXPECT_EQ(c.resolved().gamma_t, 1.0);
  c.variant = Variant::no_irlm;
  EXPECT_EQ(c.resolved().lambda1, 0.0);
  c.variant = Variant::no_graph;
  EXPECT_EQ(c.resolved().gcn_layers, 0u);
  EXPECT_EQ(c.resolved().full_width(), c.embed_dim);
  EXPECT_THROW(parse_variant("no_such"), ConfigError);
  EXPECT_EQ(parse_variant("no_irlm"), Variant::no_irlm);
  c.embed_dim = 7;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(ModelStateTest, ShapesAndSeededInit) {
  ModelConfig c = testing::tiny_config();
  const auto a = init_model(c, 5, 6, 7, 42), b = init_model(c, 5, 6, 7, 42);
  std::vector<std::string> names;
  for (const auto& p : a.params) names.push_back(p.name);
  EXPECT_EQ(names, model_parameter_names());
  const std::size_t joint = c.full_width();
  EXPECT_EQ(a.query_weights(Domain::y).rows(), joint);
  EXPECT_EQ(a.item_emb(Domain::y).rows(), 7u);
  EXPECT_EQ(a.classifier().input_width(), c.shared_width());
  EXPECT_EQ(a.classifier().hidden_width(), c.shared_width() / 2);
  auto pa = a.params.begin();
  for (const auto& p : b.params) EXPECT_EQ(max_abs_diff(p.value, (pa++)->value), 0.0);
  const double bound = 0.5 / std::sqrt(static_cast<double>(c.embed_dim));
  for (double v : a.user_emb(Domain::x).values()) EXPECT_LE(std::abs(v), bound);
}

TEST(ModelStateTest, FrozenModulesFollowVariant) {
  ModelConfig c = testing::tiny_config();
  c.variant = Variant::no_irlm;
  const auto m = init_model(c, 3, 3, 3, 1);
  EXPECT_FALSE(m.params.at("classifier_w1").trainable);
  EXPECT_TRUE(m.params.at("attn_query_x").trainable);
  c.variant = Variant::no_arem;
  const auto n = init_model(c, 3, 3, 3, 1);
  EXPECT_FALSE(n.params.at("attn_key_y").trainable);
  EXPECT_TRUE(n.params.at("classifier_b2").trainable);
}

TEST(ForwardTest, GammaOneMatchesEnhancementFreePath) {
  Rng rng(20);
  auto inst = testing::make_tiny_instance(rng, 6, 7, 5);
  ModelConfig c = testing::tiny_config();
  c.variant = Variant::no_arem;
  const auto m = init_model(c, inst.users, inst.items[0], inst.items[1], 3);
  const auto a = forward(m, inst.graphs), b = forward(m, inst.graphs, {.skip_enhancement = true});
  for (Domain d : kDomains) EXPECT_EQ(max_abs_diff(a.domain(d).user_final, b.domain(d).user_final), 0.0);
}

TEST(ForwardTest, GraphShapeMismatchThrows) {
  Rng rng(21);
  auto inst = testing::make_tiny_instance(rng, 4, 5, 5);
  const auto m = init_model(testing::tiny_config(), 4, 6, 5, 1);
  EXPECT_THROW(forward(m, inst.graphs), ShapeError);
}

}  // namespace
}  // namespace areil
