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

// On-disk layout of a prepared dataset directory:
//
//   users.tsv                 index<TAB>token
//   items_x.tsv, items_y.tsv  index<TAB>token
//   x_train.tsv ... y_test.tsv  user_index<TAB>item_index
//   stats.tsv                 per-domain dataset statistics
//   manifest.tsv              key<TAB>value, including a digest per file

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "areil/corpus/dataset.hpp"
#include "areil/corpus/graph.hpp"
#include "areil/corpus/split.hpp"
#include "areil/digest.hpp"
#include "areil/error.hpp"

namespace areil {

struct DomainStats {
  std::string name;
  std::size_t users = 0;
  std::size_t items = 0;
  std::size_t interactions = 0;
  double density = 0.0;
  std::size_t raw_records = 0;
  std::size_t unique_pairs_before_alignment = 0;
};

inline std::array<DomainStats, 2> dataset_stats(const CrossDomainDataset& cds,
                                                const std::array<std::string, 2>& names) {
  std::array<DomainStats, 2> out;
  for (Domain d : kDomains) {
    const auto& ds = cds.domain(d);
    auto& s = out[idx(d)];
    s.name = names[idx(d)];
    s.users = cds.num_users();
    s.items = ds.items.size();
    s.interactions = ds.interactions.size();
    s.density = static_cast<double>(s.interactions) /
                (static_cast<double>(s.users) * static_cast<double>(s.items));
    s.raw_records = ds.stats.raw_records;
    s.unique_pairs_before_alignment = ds.stats.unique_pairs;
  }
  return out;
}

// Everything a training run needs, as read back from a prepared directory.
struct PreparedData {
  IdMap users;
  std::array<IdMap, 2> items;
  std::array<std::string, 2> names{"x", "y"};
  SplitDataset split;

  const IdMap& item_map(Domain d) const { return items[idx(d)]; }
};

// Split plus the two training graphs.
struct TrainingData {
  SplitDataset split;
  std::array<DomainGraph, 2> graphs;

  std::size_t num_users() const noexcept { return split.num_users; }
  std::size_t num_items(Domain d) const noexcept { return split.num_items[idx(d)]; }
  const DomainGraph& graph(Domain d) const { return graphs[idx(d)]; }
};

inline TrainingData make_training_data(SplitDataset split) {
  TrainingData data;
  for (Domain d : kDomains) {
    data.graphs[idx(d)] =
        build_graph(split.domain(d).train, split.num_users, split.num_items[idx(d)]);
  }
  data.split = std::move(split);
  return data;
}

namespace detail {

inline std::string split_file_name(Domain d, SplitPart p) {
  return fmt::format("{}_{}.tsv", domain_tag(d), split_part_name(p));
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot write file");
  out << text;
  if (!out) throw IoError(path.string(), "write failure");
}

inline std::string idmap_text(const IdMap& map) {
  std::string s;
  for (std::size_t i = 0; i < map.size(); ++i) s += fmt::format("{}\t{}\n", i, map.token(i));
  return s;
}

inline std::string interactions_text(const std::vector<Interaction>& list) {
  std::string s;
  for (const auto& it : list) s += fmt::format("{}\t{}\n", it.user, it.item);
  return s;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open file");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

inline IdMap read_idmap(const std::filesystem::path& path) {
  std::vector<std::string> tokens;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(path)) {
    ++line_no;
    const auto tab = line.find('\t');
    std::size_t index = 0;
    if (tab == std::string::npos || !parse_number(std::string_view(line).substr(0, tab), index) ||
        index != tokens.size())
      throw ParseError(path.string(), line_no, "expected '<index>\\t<token>' in order");
    tokens.push_back(line.substr(tab + 1));
  }
  return IdMap::from_table(std::move(tokens));
}

inline std::vector<Interaction> read_interactions(const std::filesystem::path& path,
                                                  std::size_t num_users, std::size_t num_items) {
  std::vector<Interaction> out;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(path)) {
    ++line_no;
    const auto tab = line.find('\t');
    std::uint32_t u = 0, i = 0;
    const std::string_view view(line);
    if (tab == std::string::npos || !parse_number(view.substr(0, tab), u) ||
        !parse_number(view.substr(tab + 1), i))
      throw ParseError(path.string(), line_no, "expected '<user>\\t<item>'");
    if (u >= num_users || i >= num_items)
      throw ParseError(path.string(), line_no, "index out of range");
    out.push_back({u, i});
  }
  return out;
}

}  // namespace detail

inline std::string stats_table(const std::array<DomainStats, 2>& stats) {
  std::string s = "domain\tusers\titems\tinteractions\tdensity_percent\traw_records\tunique_pairs\n";
  for (const auto& d : stats) {
    s += fmt::format("{}\t{}\t{}\t{}\t{:.3f}\t{}\t{}\n", d.name, d.users, d.items, d.interactions,
                     100.0 * d.density, d.raw_records, d.unique_pairs_before_alignment);
  }
  return s;
}

// Writes the split manifest; returns the manifest's own digest.
inline std::string write_prepared(const std::filesystem::path& dir, const CrossDomainDataset& cds,
                                  const SplitDataset& split, const std::array<std::string, 2>& names) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), "cannot create directory");

  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("users.tsv", detail::idmap_text(cds.shared_users));
  for (Domain d : kDomains)
    files.emplace_back(fmt::format("items_{}.tsv", domain_tag(d)), detail::idmap_text(cds.domain(d).items));
  for (Domain d : kDomains)
    for (SplitPart p : {SplitPart::train, SplitPart::validation, SplitPart::test})
      files.emplace_back(detail::split_file_name(d, p), detail::interactions_text(split.domain(d).part(p)));
  files.emplace_back("stats.tsv", stats_table(dataset_stats(cds, names)));

  std::string manifest = "key\tvalue\n";
  manifest += fmt::format("seed\t{}\n", split.seed);
  manifest += fmt::format("num_users\t{}\n", split.num_users);
  for (Domain d : kDomains) {
    manifest += fmt::format("name_{}\t{}\n", domain_tag(d), names[idx(d)]);
    manifest += fmt::format("num_items_{}\t{}\n", domain_tag(d), split.num_items[idx(d)]);
  }
  for (const auto& [name, text] : files) {
    detail::write_text(dir / name, text);
    manifest += fmt::format("digest:{}\t{}\n", name, fnv1a_hex(text));
  }
  detail::write_text(dir / "manifest.tsv", manifest);
  return fnv1a_hex(manifest);
}

inline PreparedData read_prepared(const std::filesystem::path& dir) {
  std::map<std::string, std::string> kv;
  for (const auto& line : detail::read_lines(dir / "manifest.tsv")) {
    const auto tab = line.find('\t');
    if (tab != std::string::npos) kv[line.substr(0, tab)] = line.substr(tab + 1);
  }
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw InputError("manifest in " + dir.string() + " lacks key " + key);
    return it->second;
  };
  auto get_size = [&](const std::string& key) {
    std::size_t v = 0;
    if (!detail::parse_number(std::string_view(get(key)), v))
      throw InputError("manifest key " + key + " is not an integer");
    return v;
  };

  PreparedData data;
  data.users = detail::read_idmap(dir / "users.tsv");
  data.split.seed = get_size("seed");
  data.split.num_users = get_size("num_users");
  if (data.split.num_users != data.users.size())
    throw InputError("manifest user count disagrees with users.tsv");
  for (Domain d : kDomains) {
    const std::string tag = domain_tag(d);
    data.names[idx(d)] = get("name_" + tag);
    data.items[idx(d)] = detail::read_idmap(dir / ("items_" + tag + ".tsv"));
    data.split.num_items[idx(d)] = get_size("num_items_" + tag);
    if (data.split.num_items[idx(d)] != data.items[idx(d)].size())
      throw InputError("manifest item count disagrees with items_" + tag + ".tsv");
    auto& part = data.split.domain(d);
    part.train = detail::read_interactions(dir / detail::split_file_name(d, SplitPart::train),
                                           data.split.num_users, data.split.num_items[idx(d)]);
    part.validation = detail::read_interactions(dir / detail::split_file_name(d, SplitPart::validation),
                                                data.split.num_users, data.split.num_items[idx(d)]);
    part.test = detail::read_interactions(dir / detail::split_file_name(d, SplitPart::test),
                                          data.split.num_users, data.split.num_items[idx(d)]);
  }
  return data;
}

}  // namespace areil
