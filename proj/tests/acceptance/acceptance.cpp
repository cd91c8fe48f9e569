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

// Acceptance runner: one PASS/FAIL line per criterion. Arguments select a
// subset of criteria by number; no arguments runs all of them.

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "areil/corpus/dataset.hpp"
#include "areil/corpus/manifest.hpp"
#include "areil/corpus/synthetic.hpp"
#include "areil/evalkit/ablation.hpp"
#include "areil/evalkit/metrics.hpp"
#include "areil/evalkit/probe.hpp"
#include "areil/log.hpp"
#include "areil/numcore/grad_check.hpp"
#include "support/oracles.hpp"

namespace {

using namespace areil;
using namespace areil::testing;

enum class Outcome { pass, fail, skip, info };

struct Verdict {
  Outcome outcome = Outcome::fail;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// 1. Analytic gradient of L_total against central differences. Relative
// error uses max(|a|, |n|, eps) as denominator: below |g| ~ eps the step
// cannot resolve the derivative past double roundoff (u * |L| / eps).
Verdict gradient_integrity() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  std::string where;
  std::size_t skipped = 0;
  std::uint64_t seed = 1000;
  for (std::size_t inst = 0; inst < 20;) {
    Rng rng(seed);
    auto tiny = make_tiny_instance(rng, 8, 12, 10);
    ModelState m = init_model(tiny_config(), 8, 12, 10, seed++);
    if (relu_margin(m, tiny.graphs, tiny.batch) < 1e-4) {
      ++skipped;
      continue;
    }
    ObjectiveOptions opts;
    opts.grl_lambda = 0.5;
    opts.grl_mode = GrlMode::identity;
    m.params.zero_grad();
    evaluate_objective(m, tiny.graphs, tiny.batch, opts);
    ObjectiveOptions value_only = opts;
    value_only.compute_gradients = false;
    const auto report = grad_check(
        [&](const ParameterStore&) { return evaluate_objective(m, tiny.graphs, tiny.batch, value_only).total; },
        m.params, 1e-5, 1e-5);
    if (report.max_rel_error() > worst) {
      worst = report.max_rel_error();
      const auto* w = report.worst();
      where = fmt::format("instance {} {}[{},{}] analytic={:.3e} numeric={:.3e}", inst, w->name, w->row, w->col,
                          w->analytic, w->numeric);
    }
    ++inst;
  }
  const double secs = seconds_since(t0);
  const bool ok = worst < 1e-5 && secs < 60.0;
  return {ok ? Outcome::pass : Outcome::fail,
          fmt::format("max rel error {:.3e} (tol 1e-5, denominator floor 1e-5) over 20 instances, {:.1f}s; worst at {}; {} draws skipped for "
                      "a ReLU kink within 1e-4",
                      worst, secs, where, skipped)};
}

// 2. Reversed gradient on the shared inputs equals -lambda times the plain one.
Verdict grl_contract() {
  double worst_cls = 0.0;
  double worst_model = 0.0;
  bool forward_exact = true;
  for (std::uint64_t inst = 0; inst < 20; ++inst) {
    Rng rng(2000 + inst);
    const double lambda = rng.uniform(0.05, 2.0);

    const DenseMatrix x = random_matrix(rng, 9, 6);
    const DenseMatrix y = apply_grl(x, lambda);
    forward_exact = forward_exact && x.size() == y.size() &&
                    std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0;

    // Classifier level: shared-input gradients.
    const auto cls_w = ClassifierWeights::random(6, 4, rng);
    const DenseMatrix sx = random_matrix(rng, 9, 6), sy = random_matrix(rng, 9, 6);
    const DenseMatrix px = random_matrix(rng, 9, 6), py = random_matrix(rng, 9, 6);
    const auto rev = classification_loss(cls_w.view(), sx, sy, px, py, lambda, GrlMode::reverse);
    const auto plain = classification_loss(cls_w.view(), sx, sy, px, py, lambda, GrlMode::identity);
    for (std::size_t i = 0; i < sx.size(); ++i) {
      worst_cls = std::max(worst_cls, std::abs(rev.d_shared_x.values()[i] + lambda * plain.d_shared_x.values()[i]));
      worst_cls = std::max(worst_cls, std::abs(rev.d_shared_y.values()[i] + lambda * plain.d_shared_y.values()[i]));
    }

    // Model level: the shared-branch contribution to the embedding gradients.
    auto tiny = make_tiny_instance(rng, 8, 12, 10);
    ModelConfig cfg = tiny_config();
    cfg.lambda2 = 0.0;
    ModelState m = init_model(cfg, 8, 12, 10, 3 + inst);
    auto grads = [&](double l, GrlMode mode) {
      m.params.zero_grad();
      ObjectiveOptions o;
      o.grl_lambda = l;
      o.grl_mode = mode;
      evaluate_objective(m, tiny.graphs, tiny.batch, o);
      std::vector<DenseMatrix> out;
      for (Domain d : kDomains) out.push_back(m.params[m.handles.user[idx(d)]].grad);
      return out;
    };
    const auto g_rev = grads(lambda, GrlMode::reverse);
    const auto g_zero = grads(0.0, GrlMode::reverse);
    const auto g_plain = grads(lambda, GrlMode::identity);
    for (std::size_t p = 0; p < g_rev.size(); ++p)
      for (std::size_t i = 0; i < g_rev[p].size(); ++i) {
        const double shared_rev = g_rev[p].values()[i] - g_zero[p].values()[i];
        const double shared_plain = g_plain[p].values()[i] - g_zero[p].values()[i];
        worst_model = std::max(worst_model, std::abs(shared_rev + lambda * shared_plain));
      }
  }
  const bool ok = forward_exact && worst_cls < 1e-12 && worst_model < 1e-12;
  return {ok ? Outcome::pass : Outcome::fail,
          fmt::format("forward bit-exact={}, classifier-level max |g_rev + lambda*g| = {:.2e}, model-level = {:.2e} "
                      "(tol 1e-12)",
                      forward_exact, worst_cls, worst_model)};
}

// 3. Sparse propagation against dense normalized-adjacency products.
Verdict propagation_oracle() {
  double worst = 0.0;
  bool split_exact = true;
  Rng rng(3000);
  for (int g = 0; g < 100; ++g) {
    const std::size_t users = 1 + rng.index(25);
    const std::size_t items = 1 + rng.index(50 - users);
    const auto edges = random_interactions(rng, users, items, rng.uniform(0.02, 0.5));
    const auto graph = build_graph(edges, users, items);
    const std::size_t d = 2 * (1 + rng.index(4));
    const std::size_t layers = rng.index(4);
    const DenseMatrix eu = random_matrix(rng, users, d), ei = random_matrix(rng, items, d);

    const DenseMatrix x = random_matrix(rng, users + items, d);
    worst = std::max(worst, max_abs_diff(spmm(graph, x), naive_matmul(dense_norm_adjacency(edges, users, items), x)));

    const auto fast = propagate_and_concat(graph, eu, ei, layers);
    const auto [ref_u, ref_i] = dense_propagate(edges, users, items, eu, ei, layers);
    worst = std::max({worst, max_abs_diff(fast.users, ref_u), max_abs_diff(fast.items, ref_i)});

    // Splitting before or after propagation gives the same halves.
    const auto split_after = split_user_embedding(fast.users, d);
    DenseMatrix eu_lo(users, d / 2), eu_hi(users, d / 2), ei_lo(items, d / 2), ei_hi(items, d / 2);
    for (std::size_t c = 0; c < d / 2; ++c) {
      for (std::size_t r = 0; r < users; ++r) {
        eu_lo(r, c) = eu(r, c);
        eu_hi(r, c) = eu(r, d / 2 + c);
      }
      for (std::size_t r = 0; r < items; ++r) {
        ei_lo(r, c) = ei(r, c);
        ei_hi(r, c) = ei(r, d / 2 + c);
      }
    }
    const auto prop_lo = propagate_and_concat(graph, eu_lo, ei_lo, layers);
    const auto prop_hi = propagate_and_concat(graph, eu_hi, ei_hi, layers);
    split_exact = split_exact && prop_lo.users == split_after.shared && prop_hi.users == split_after.specific;
  }
  const bool ok = worst < 1e-12 && split_exact;
  return {ok ? Outcome::pass : Outcome::fail,
          fmt::format("100 graphs <= 50 nodes: max abs diff {:.2e} (tol 1e-12); split commutation exact={}", worst,
                      split_exact)};
}

// Selection-style ranking used as an independent oracle.
std::vector<std::uint32_t> brute_rank(const std::vector<double>& scores, const std::set<std::uint32_t>& mask) {
  std::vector<std::uint32_t> out;
  std::vector<bool> used(scores.size(), false);
  for (;;) {
    std::int64_t best = -1;
    for (std::uint32_t i = 0; i < scores.size(); ++i) {
      if (used[i] || mask.count(i)) continue;
      if (best < 0 || scores[i] > scores[static_cast<std::size_t>(best)]) best = i;
    }
    if (best < 0) break;
    used[static_cast<std::size_t>(best)] = true;
    out.push_back(static_cast<std::uint32_t>(best));
  }
  return out;
}

// 4. Metrics against brute force, plus the random-scorer expectation.
Verdict metric_oracle() {
  Rng rng(4000);
  std::size_t rank_mismatch = 0, recall_mismatch = 0;
  double worst_ndcg = 0.0;
  for (int inst = 0; inst < 1000; ++inst) {
    const std::size_t n = 1 + rng.index(60);
    std::vector<double> scores(n);
    for (auto& s : scores) s = static_cast<double>(rng.index(8));  // many ties
    std::set<std::uint32_t> mask, relevant;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (rng.unit() < 0.2) mask.insert(i);
      else if (rng.unit() < 0.25) relevant.insert(i);
    }
    if (relevant.empty()) {
      const auto i = static_cast<std::uint32_t>(rng.index(n));
      mask.erase(i);
      relevant.insert(i);
    }
    const std::size_t k = 1 + rng.index(25);
    const std::vector<std::uint32_t> mask_v(mask.begin(), mask.end()), rel_v(relevant.begin(), relevant.end());
    const auto ranked = rank_items(scores, mask_v);
    const auto top = top_k_items(scores, mask_v, k);
    const auto oracle = brute_rank(scores, mask);
    if (ranked != oracle) ++rank_mismatch;
    if (!std::equal(top.begin(), top.end(), oracle.begin())) ++rank_mismatch;
    if (recall_at_k(ranked, rel_v, k) != brute_recall(oracle, relevant, k)) ++recall_mismatch;
    worst_ndcg = std::max(worst_ndcg, std::abs(ndcg_at_k(ranked, rel_v, k) - brute_ndcg(oracle, relevant, k)));
  }

  // Random scores, 1000 items, one relevant item per user, no mask.
  const std::size_t users = 2000, items = 1000, k = 20;
  Rng score_rng(4001);
  DenseMatrix scores(users, items);
  for (double& s : scores.values()) s = score_rng.unit();
  UserItemIndex mask(users, {});
  std::vector<Interaction> rel;
  for (std::uint32_t u = 0; u < users; ++u) rel.push_back({u, static_cast<std::uint32_t>(score_rng.index(items))});
  const UserItemIndex relevant(users, rel);
  const auto m = evaluate_domain(
      [&](std::size_t u, std::span<double> out) { std::copy(scores.row(u).begin(), scores.row(u).end(), out.begin()); },
      users, items, mask, relevant, k);
  const double p = static_cast<double>(k) / static_cast<double>(items);
  const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(users));
  const bool random_ok = std::abs(m.recall - p) <= 3.0 * sigma;

  const bool ok = rank_mismatch == 0 && recall_mismatch == 0 && worst_ndcg < 1e-12 && random_ok;
  return {ok ? Outcome::pass : Outcome::fail,
          fmt::format("1000 instances: rank mismatches {}, recall mismatches {}, max ndcg diff {:.2e}; random "
                      "Recall@20 = {:.5f} vs 0.02 +- {:.5f} (3 sigma)",
                      rank_mismatch, recall_mismatch, worst_ndcg, m.recall, 3.0 * sigma)};
}

// Planted synthetic data, prepared once per seed.
TrainingData synthetic_data(std::uint64_t seed) {
  SyntheticConfig sc;
  sc.seed = seed;
  const auto cds = generate_planted(sc);
  return make_training_data(split_holdout(cds, seed));
}

ModelConfig synthetic_model_config() {
  ModelConfig c;
  c.embed_dim = 32;
  c.gcn_layers = 2;
  c.gamma_s = 0.9;
  c.gamma_t = 0.9;
  c.lambda1 = 0.1;
  c.lambda2 = 1e-6;
  return c;
}

TrainConfig synthetic_train_config(std::uint64_t seed) {
  TrainConfig t;
  t.learning_rate = 1e-2;
  t.batch_size = 4096;
  t.max_epochs = 50;
  t.patience = 5;
  t.seed = seed;
  return t;
}

// 5. gamma = 1 matches the fusion-free path; lambda1 = 0 leaves the classifier untouched.
Verdict ablation_equivalences() {
  SyntheticConfig sc;
  sc.num_users = 300;
  sc.num_items = 120;
  sc.dense_mean = 16;
  const auto data = make_training_data(split_holdout(generate_planted(sc), 5));
  ModelConfig base = synthetic_model_config();
  base.embed_dim = 16;
  TrainConfig t = synthetic_train_config(5);
  t.max_epochs = 3;
  t.batch_size = 512;

  ModelConfig no_arem = base;
  no_arem.variant = Variant::no_arem;
  ModelState a = init_model(no_arem, data.num_users(), data.num_items(Domain::x), data.num_items(Domain::y), 5);
  fit(a, data, t);
  const auto with = forward(a, data.graphs);
  const auto without = forward(a, data.graphs, {.skip_enhancement = true});
  bool scores_equal = true;
  for (Domain d : kDomains) {
    const auto s1 = matmul(with.domain(d).user_final, transpose(with.domain(d).item_out));
    const auto s2 = matmul(without.domain(d).user_final, transpose(without.domain(d).item_out));
    scores_equal = scores_equal && s1 == s2;
  }

  ModelConfig no_irlm = base;
  no_irlm.variant = Variant::no_irlm;
  ModelState b = init_model(no_irlm, data.num_users(), data.num_items(Domain::x), data.num_items(Domain::y), 6);
  const ModelState b0 = b;
  fit(b, data, t);
  bool classifier_untouched = true;
  for (const char* name : {"classifier_w1", "classifier_b1", "classifier_w2", "classifier_b2"})
    classifier_untouched = classifier_untouched && b.params.at(name).value == b0.params.at(name).value;
  bool embeddings_moved = !(b.params.at("user_emb_x").value == b0.params.at("user_emb_x").value);

  const bool ok = scores_equal && classifier_untouched && embeddings_moved;
  return {ok ? Outcome::pass : Outcome::fail,
          fmt::format("gamma=1 scores identical to fusion-free path: {}; lambda1=0 classifier bit-identical to init "
                      "after 3 epochs: {} (embeddings trained: {})",
                      scores_equal, classifier_untouched, embeddings_moved)};
}

struct SyntheticRuns {
  bool done = false;
  double seconds = 0.0;
  // [variant][seed] sparse-domain (y) test NDCG@20
  std::map<Variant, std::vector<double>> sparse_ndcg;
  std::vector<ProbeResult> probes;
};

SyntheticRuns& synthetic_runs() {
  static SyntheticRuns runs;
  if (runs.done) return runs;
  const auto t0 = Clock::now();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto data = synthetic_data(seed);
    const auto results = run_ablation(data, synthetic_model_config(), synthetic_train_config(seed), kAllVariants,
                                      SplitPart::test);
    for (const auto& r : results) {
      runs.sparse_ndcg[r.variant].push_back(r.report.domain(Domain::y).ndcg);
      if (r.variant == Variant::full) runs.probes.push_back(disentanglement_probe(r.model, data.graphs));
      log::info("seed {} {}: y ndcg {:.5f} x ndcg {:.5f} (best epoch {})", seed, variant_name(r.variant),
                r.report.domain(Domain::y).ndcg, r.report.domain(Domain::x).ndcg, r.history.best_epoch);
    }
  }
  runs.seconds = seconds_since(t0);
  runs.done = true;
  return runs;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// 6. Directional transfer ordering on planted synthetic data.
Verdict synthetic_transfer() {
  const auto& runs = synthetic_runs();
  const double full = mean(runs.sparse_ndcg.at(Variant::full));
  const double arem = mean(runs.sparse_ndcg.at(Variant::no_arem));
  const double irlm = mean(runs.sparse_ndcg.at(Variant::no_irlm));
  const double graph = mean(runs.sparse_ndcg.at(Variant::no_graph));
  const bool ok = full > arem && full > irlm && full >= 1.10 * graph && runs.seconds < 600.0;
  return {ok ? Outcome::pass : Outcome::fail,
          fmt::format("sparse-domain test NDCG@20 5-seed mean: full {:.5f}, no_arem {:.5f}, no_irlm {:.5f}, "
                      "no_graph {:.5f} (full/no_graph = {:.3f}, need >= 1.10); 20 runs in {:.0f}s (limit 600s)",
                      full, arem, irlm, graph, graph > 0 ? full / graph : 0.0, runs.seconds)};
}

// 7. Probe accuracies on the criterion-6 full models.
Verdict disentanglement() {
  const auto& runs = synthetic_runs();
  std::vector<double> spe, sha;
  for (const auto& p : runs.probes) {
    spe.push_back(p.acc_specific);
    sha.push_back(p.acc_shared);
  }
  const double a_spe = mean(spe), a_sha = mean(sha);
  const bool ok = a_spe > 0.9 && a_sha < 0.6;
  return {ok ? Outcome::pass : Outcome::fail,
          fmt::format("5-seed mean probe accuracy: specific {:.4f} (need > 0.9), shared {:.4f} (need < 0.6)", a_spe,
                      a_sha)};
}

// 8. Ingestion counts on the Elec & Phone raw logs, when present.
Verdict ingestion_fidelity() {
  const char* elec = std::getenv("AREIL_ELEC_PATH");
  const char* phone = std::getenv("AREIL_PHONE_PATH");
  if (elec == nullptr || phone == nullptr || !std::filesystem::exists(elec) || !std::filesystem::exists(phone))
    return {Outcome::skip, "raw files absent (set AREIL_ELEC_PATH and AREIL_PHONE_PATH to run)"};
  const auto x = ingest_interactions(elec);
  const auto y = ingest_interactions(phone);
  const auto cds = align_overlapping_users(x, y);
  const std::size_t users = cds.num_users();
  const std::size_t ix = cds.domain(Domain::x).items.size(), iy = cds.domain(Domain::y).items.size();
  const std::size_t nx = cds.domain(Domain::x).interactions.size(), ny = cds.domain(Domain::y).interactions.size();
  const bool ok = users == 3325 && ix == 17709 && iy == 38706 && nx == 52966 && ny == 118114;
  return {ok ? Outcome::pass : Outcome::fail,
          fmt::format("users {} (3325), items {}/{} (17709/38706), interactions {}/{} (52966/118114)", users, ix, iy,
                      nx, ny)};
}

// 9. Full-scale reproduction target; documented, never gating.
Verdict full_scale() {
  return {Outcome::info,
          "non-gating long-running target: train on Elec&Phone with the documented grid (see README) and compare "
          "Elec Recall@20 against 8.29% +-15% relative; not run in CI"};
}

}  // namespace

int main(int argc, char** argv) {
  if (std::getenv("AREIL_LOG") == nullptr) log::set_level(log::Level::error);
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"gradient integrity", gradient_integrity},
      {"GRL contract", grl_contract},
      {"propagation oracle", propagation_oracle},
      {"metric oracle", metric_oracle},
      {"ablation equivalences", ablation_equivalences},
      {"synthetic transfer", synthetic_transfer},
      {"disentanglement probe", disentanglement},
      {"ingestion fidelity", ingestion_fidelity},
      {"full-scale reproduction", full_scale},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(number)) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {Outcome::fail, std::string("exception: ") + e.what()};
    }
    const char* tag = v.outcome == Outcome::pass   ? "PASS"
                      : v.outcome == Outcome::skip ? "SKIP"
                      : v.outcome == Outcome::info ? "INFO"
                                                   : "FAIL";
    if (v.outcome == Outcome::fail) ++failures;
    fmt::print("[{}] criterion {}: {} -- {}\n", tag, number, criteria[i].first, v.detail);
    std::fflush(stdout);
  }
  fmt::print("{} criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
