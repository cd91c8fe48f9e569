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
#include <filesystem>
#include <fstream>
#include <string>

#include <fmt/core.h>

#include "areil/corpus/dataset.hpp"
#include "areil/error.hpp"
#include "areil/model/model.hpp"

namespace areil {

struct ExportPaths {
  std::filesystem::path users;
  std::filesystem::path items;
};

namespace detail {

inline void append_values(std::string& out, std::span<const double> values) {
  for (double v : values) out += fmt::format("\t{}", v);
  out += '\n';
}

inline std::string value_header(std::size_t width) {
  std::string out;
  for (std::size_t j = 0; j < width; ++j) out += fmt::format("\tv{}", j);
  return out + "\n";
}

}  // namespace detail

// One row per user, domain and component. "shared" rows hold the fused shared
// part used for scoring; re-interleaving them with "specific" per layer block
// gives the user's scoring vector.
inline std::string user_embedding_text(const ForwardCache& cache, const IdMap& users) {
  const std::size_t width = cache.domain(Domain::x).shared.cols();
  std::string out = "user\tdomain\tcomponent" + detail::value_header(width);
  for (std::size_t u = 0; u < users.size(); ++u) {
    for (Domain d : kDomains) {
      const auto& f = cache.domain(d);
      out += fmt::format("{}\t{}\tshared", users.token(u), domain_tag(d));
      detail::append_values(out, f.enhanced.row(u));
      out += fmt::format("{}\t{}\tspecific", users.token(u), domain_tag(d));
      detail::append_values(out, f.specific.row(u));
    }
  }
  return out;
}

inline std::string item_embedding_text(const ForwardCache& cache, const std::array<IdMap, 2>& items) {
  const std::size_t width = cache.domain(Domain::x).item_out.cols();
  std::string out = "item\tdomain" + detail::value_header(width);
  for (Domain d : kDomains) {
    const auto& emb = cache.domain(d).item_out;
    for (std::size_t i = 0; i < items[idx(d)].size(); ++i) {
      out += fmt::format("{}\t{}", items[idx(d)].token(i), domain_tag(d));
      detail::append_values(out, emb.row(i));
    }
  }
  return out;
}

inline ExportPaths export_embeddings(const ModelState& m, const DomainGraphs& graphs, const IdMap& users,
                                     const std::array<IdMap, 2>& items, const std::filesystem::path& dir) {
  if (users.size() != m.num_users || items[0].size() != m.num_items[0] || items[1].size() != m.num_items[1])
    throw ShapeError("id maps do not match the model's user/item counts");
  const auto cache = forward(m, graphs);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  ExportPaths paths{dir / "user_embeddings.tsv", dir / "item_embeddings.tsv"};
  const auto write = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::trunc);
    if (!out) throw IoError(p.string(), "cannot write embedding export");
    out << text;
    if (!out) throw IoError(p.string(), "write failed");
  };
  write(paths.users, user_embedding_text(cache, users));
  write(paths.items, item_embedding_text(cache, items));
  return paths;
}

}  // namespace areil
