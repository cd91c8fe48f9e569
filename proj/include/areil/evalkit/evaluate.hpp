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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "areil/corpus/split.hpp"
#include "areil/error.hpp"
#include "areil/evalkit/metrics.hpp"
#include "areil/model/model.hpp"

namespace areil {

struct DomainMetrics {
  double recall = 0.0;
  double ndcg = 0.0;
  std::size_t evaluated_users = 0;
  std::size_t skipped_users = 0;
};

struct RunInfo {
  std::uint64_t seed = 0;
  std::string variant = "full";
  std::string config_digest = "-";
};

struct EvalReport {
  std::size_t k = 20;
  SplitPart split = SplitPart::validation;
  std::string masked_items_policy;
  RunInfo run;
  std::array<std::string, 2> domain_names{"x", "y"};
  std::array<DomainMetrics, 2> domains;

  const DomainMetrics& domain(Domain d) const { return domains[idx(d)]; }
  double mean_ndcg() const { return 0.5 * (domains[0].ndcg + domains[1].ndcg); }

  // key: value lines.
  std::string to_text() const {
    std::string out;
    out += fmt::format("split: {}\nk: {}\nmasked_items: {}\nseed: {}\nvariant: {}\nconfig_digest: {}\n",
                       split_part_name(split), k, masked_items_policy, run.seed, run.variant, run.config_digest);
    for (Domain d : kDomains) {
      const auto& m = domain(d);
      const std::string tag = domain_tag(d);
      out += fmt::format("{}.name: {}\n", tag, domain_names[idx(d)]);
      out += fmt::format("{}.recall_at_{}: {}\n", tag, k, m.recall);
      out += fmt::format("{}.ndcg_at_{}: {}\n", tag, k, m.ndcg);
      out += fmt::format("{}.evaluated_users: {}\n", tag, m.evaluated_users);
      out += fmt::format("{}.skipped_users: {}\n", tag, m.skipped_users);
    }
    return out;
  }

  static std::string summary_header() {
    return "variant\tseed\tsplit\tk\tdomain\tname\trecall\tndcg\trecall_percent\tndcg_percent\tevaluated_users\t"
           "config_digest";
  }

  // One tab-separated row per domain.
  std::vector<std::string> summary_rows() const {
    std::vector<std::string> rows;
    for (Domain d : kDomains) {
      const auto& m = domain(d);
      rows.push_back(fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.4f}\t{:.4f}\t{}\t{}", run.variant, run.seed,
                                 split_part_name(split), k, domain_tag(d), domain_names[idx(d)], m.recall, m.ndcg,
                                 100.0 * m.recall, 100.0 * m.ndcg, m.evaluated_users, run.config_digest));
    }
    return rows;
  }
};

// Per-domain lookups needed to evaluate one split: the items to mask and the
// relevant items, both per user and sorted.
struct SplitIndex {
  std::array<UserItemIndex, 2> mask;
  std::array<UserItemIndex, 2> relevant;
  SplitPart part = SplitPart::validation;
};

inline const char* masking_policy(SplitPart part) {
  return part == SplitPart::test ? "train+validation" : "train";
}

inline SplitIndex make_split_index(const SplitDataset& split, SplitPart part) {
  if (part == SplitPart::train) throw EvaluationError("evaluation split must be validation or test");
  SplitIndex out;
  out.part = part;
  for (Domain d : kDomains) {
    const auto& ds = split.domain(d);
    if (ds.part(part).empty())
      throw EvaluationError(std::string(split_part_name(part)) + " split of domain " + domain_tag(d) + " is empty");
    out.mask[idx(d)] = UserItemIndex(split.num_users, ds.train);
    if (part == SplitPart::test) out.mask[idx(d)].add(ds.validation);
    out.relevant[idx(d)] = UserItemIndex(split.num_users, ds.part(part));
  }
  return out;
}

// Full-ranking metrics for one domain. `score(user, out)` fills one score per
// item and must be safe to call concurrently. Per-user results are reduced
// sequentially so the outcome does not depend on thread count.
template <typename Scorer>
DomainMetrics evaluate_domain(Scorer&& score, std::size_t num_users, std::size_t num_items,
                              const UserItemIndex& mask, const UserItemIndex& relevant, std::size_t k) {
  std::vector<double> recall(num_users, 0.0), ndcg(num_users, 0.0);
  std::vector<char> counted(num_users, 0);
  const auto n = static_cast<std::int64_t>(num_users);
#pragma omp parallel
  {
    std::vector<double> scores(num_items);
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t s = 0; s < n; ++s) {
      const auto u = static_cast<std::size_t>(s);
      const auto& rel = relevant.items(u);
      if (rel.empty()) continue;
      score(u, std::span<double>(scores));
      const auto top = top_k_items(scores, mask.items(u), k);
      recall[u] = recall_at_k(top, rel, k);
      ndcg[u] = ndcg_at_k(top, rel, k);
      counted[u] = 1;
    }
  }
  DomainMetrics m;
  for (std::size_t u = 0; u < num_users; ++u) {
    if (!counted[u]) {
      ++m.skipped_users;
      continue;
    }
    m.recall += recall[u];
    m.ndcg += ndcg[u];
    ++m.evaluated_users;
  }
  if (m.evaluated_users == 0) throw EvaluationError("no user has a relevant item in the evaluated split");
  m.recall /= static_cast<double>(m.evaluated_users);
  m.ndcg /= static_cast<double>(m.evaluated_users);
  return m;
}

// Final user and item representations, computed once per evaluation.
struct FinalEmbeddings {
  std::array<DenseMatrix, 2> users;
  std::array<DenseMatrix, 2> items;

  static FinalEmbeddings from(const ModelState& m, const DomainGraphs& graphs) {
    auto cache = forward(m, graphs);
    FinalEmbeddings out;
    for (Domain d : kDomains) {
      out.users[idx(d)] = std::move(cache.domain(d).user_final);
      out.items[idx(d)] = std::move(cache.domain(d).item_out);
    }
    return out;
  }

  void score(Domain d, std::size_t user, std::span<double> out) const {
    const auto& u = users[idx(d)];
    const auto& it = items[idx(d)];
    if (user >= u.rows()) throw EvaluationError("unknown user index " + std::to_string(user));
    const auto row = u.row(user);
    for (std::size_t i = 0; i < it.rows(); ++i) out[i] = dot(row, it.row(i));
  }
};

// Every unmasked item of `user` in `d`, by descending score.
inline std::vector<std::uint32_t> rank_items(const FinalEmbeddings& emb, Domain d, std::size_t user,
                                             std::span<const std::uint32_t> mask) {
  std::vector<double> scores(emb.items[idx(d)].rows());
  emb.score(d, user, scores);
  return rank_items(scores, mask);
}

inline EvalReport evaluate_embeddings(const FinalEmbeddings& emb, const SplitDataset& split, SplitPart part,
                                      std::size_t k, const RunInfo& run = {}) {
  const SplitIndex index = make_split_index(split, part);
  EvalReport report;
  report.k = k;
  report.split = part;
  report.masked_items_policy = masking_policy(part);
  report.run = run;
  for (Domain d : kDomains) {
    report.domains[idx(d)] = evaluate_domain(
        [&](std::size_t u, std::span<double> out) { emb.score(d, u, out); }, split.num_users,
        split.num_items[idx(d)], index.mask[idx(d)], index.relevant[idx(d)], k);
  }
  return report;
}

inline EvalReport evaluate(const ModelState& m, const DomainGraphs& graphs, const SplitDataset& split,
                           SplitPart part, std::size_t k, const RunInfo& run = {}) {
  return evaluate_embeddings(FinalEmbeddings::from(m, graphs), split, part, k, run);
}

}  // namespace areil
