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

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "areil/error.hpp"
#include "areil/log.hpp"

namespace areil {

enum class Domain : std::size_t { x = 0, y = 1 };

inline constexpr std::array<Domain, 2> kDomains{Domain::x, Domain::y};

inline constexpr std::size_t idx(Domain d) noexcept { return static_cast<std::size_t>(d); }
inline constexpr Domain other(Domain d) noexcept { return d == Domain::x ? Domain::y : Domain::x; }
inline constexpr const char* domain_tag(Domain d) noexcept { return d == Domain::x ? "x" : "y"; }

struct RawInteraction {
  std::string user_token;
  std::string item_token;
  double rating = 0.0;
  std::optional<std::int64_t> timestamp;
};

struct Interaction {
  std::uint32_t user = 0;
  std::uint32_t item = 0;

  friend auto operator<=>(const Interaction&, const Interaction&) = default;
};

// Bijection between opaque tokens and dense indices; indices follow the
// lexicographic order of the tokens so file ordering never matters.
class IdMap {
 public:
  IdMap() = default;

  template <typename Range>
  static IdMap from_tokens(const Range& tokens) {
    IdMap map;
    map.index_to_token_.assign(std::begin(tokens), std::end(tokens));
    std::sort(map.index_to_token_.begin(), map.index_to_token_.end());
    map.index_to_token_.erase(std::unique(map.index_to_token_.begin(), map.index_to_token_.end()),
                              map.index_to_token_.end());
    map.rebuild_index();
    return map;
  }

  // Rebuilds from an explicit index -> token table (e.g. read back from disk).
  static IdMap from_table(std::vector<std::string> index_to_token) {
    IdMap map;
    map.index_to_token_ = std::move(index_to_token);
    map.rebuild_index();
    if (map.token_to_index_.size() != map.index_to_token_.size())
      throw InputError("IdMap table contains duplicate tokens");
    return map;
  }

  std::size_t size() const noexcept { return index_to_token_.size(); }
  bool empty() const noexcept { return index_to_token_.empty(); }

  std::optional<std::uint32_t> find(const std::string& token) const {
    auto it = token_to_index_.find(token);
    if (it == token_to_index_.end()) return std::nullopt;
    return it->second;
  }
  std::uint32_t index(const std::string& token) const {
    auto found = find(token);
    if (!found) throw InputError("unknown token: " + token);
    return *found;
  }
  const std::string& token(std::size_t index) const { return index_to_token_.at(index); }
  const std::vector<std::string>& tokens() const noexcept { return index_to_token_; }

  friend bool operator==(const IdMap& a, const IdMap& b) {
    return a.index_to_token_ == b.index_to_token_;
  }

 private:
  void rebuild_index() {
    token_to_index_.clear();
    token_to_index_.reserve(index_to_token_.size());
    for (std::size_t i = 0; i < index_to_token_.size(); ++i)
      token_to_index_.emplace(index_to_token_[i], static_cast<std::uint32_t>(i));
  }

  std::vector<std::string> index_to_token_;
  std::unordered_map<std::string, std::uint32_t> token_to_index_;
};

struct IngestStats {
  std::size_t raw_records = 0;       // parsed data lines
  std::size_t positive_records = 0;  // rating >= threshold
  std::size_t unique_pairs = 0;      // after duplicate collapse
};

struct DomainDataset {
  IdMap users;
  IdMap items;
  std::vector<Interaction> interactions;  // sorted, no duplicates
  IngestStats stats;
};

struct CrossDomainDataset {
  IdMap shared_users;
  std::array<DomainDataset, 2> domains;

  const DomainDataset& domain(Domain d) const { return domains[idx(d)]; }
  DomainDataset& domain(Domain d) { return domains[idx(d)]; }
  std::size_t num_users() const noexcept { return shared_users.size(); }
};

struct IngestOptions {
  double positive_threshold = 0.0;
  char delimiter = ',';
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last;
}

}  // namespace detail

// Parses one "user<d>item<d>rating[<d>timestamp]" record.
inline RawInteraction parse_record(std::string_view line, char delimiter, const std::string& source,
                                   std::size_t line_no) {
  const auto fields = detail::split_fields(line, delimiter);
  if (fields.size() < 3 || fields.size() > 4)
    throw ParseError(source, line_no, "expected 3 or 4 fields, got " + std::to_string(fields.size()));
  RawInteraction rec;
  rec.user_token = std::string(fields[0]);
  rec.item_token = std::string(fields[1]);
  if (rec.user_token.empty()) throw ParseError(source, line_no, "empty user token");
  if (rec.item_token.empty()) throw ParseError(source, line_no, "empty item token");
  if (!detail::parse_number(fields[2], rec.rating))
    throw ParseError(source, line_no, "bad rating '" + std::string(fields[2]) + "'");
  if (fields.size() == 4 && !fields[3].empty()) {
    std::int64_t ts = 0;
    // Some dumps store timestamps as floats; accept an integral value either way.
    if (!detail::parse_number(fields[3], ts)) {
      double fts = 0.0;
      if (!detail::parse_number(fields[3], fts))
        throw ParseError(source, line_no, "bad timestamp '" + std::string(fields[3]) + "'");
      ts = static_cast<std::int64_t>(fts);
    }
    rec.timestamp = ts;
  }
  return rec;
}

namespace detail {

// Assigns provisional ids in arrival order; remapped to sorted order later.
class TokenInterner {
 public:
  std::uint32_t intern(std::string_view token) {
    auto it = ids_.find(std::string(token));
    if (it != ids_.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(tokens_.size());
    tokens_.emplace_back(token);
    ids_.emplace(tokens_.back(), id);
    return id;
  }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::vector<std::string> tokens_;
};

// Maps provisional ids onto the index order of `map` built from the same tokens.
inline std::vector<std::uint32_t> remap_table(const std::vector<std::string>& provisional,
                                              const IdMap& map) {
  std::vector<std::uint32_t> table(provisional.size());
  for (std::size_t i = 0; i < provisional.size(); ++i) table[i] = map.index(provisional[i]);
  return table;
}

inline std::uint64_t pack(std::uint32_t user, std::uint32_t item) {
  return (static_cast<std::uint64_t>(user) << 32) | item;
}

}  // namespace detail

inline DomainDataset ingest_stream(std::istream& in, const std::string& source,
                                   const IngestOptions& opts = {}) {
  detail::TokenInterner users, items;
  std::vector<std::uint64_t> pairs;
  IngestStats stats;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = detail::trim(line);
    if (view.empty() || view.front() == '#') continue;
    RawInteraction rec = parse_record(view, opts.delimiter, source, line_no);
    ++stats.raw_records;
    if (rec.rating < opts.positive_threshold) continue;
    ++stats.positive_records;
    pairs.push_back(detail::pack(users.intern(rec.user_token), items.intern(rec.item_token)));
  }
  if (in.bad()) throw IoError(source, "read failure");
  if (pairs.empty()) throw EmptyDatasetError("no positive interactions in " + source);

  DomainDataset ds;
  ds.users = IdMap::from_tokens(users.tokens());
  ds.items = IdMap::from_tokens(items.tokens());
  const auto user_table = detail::remap_table(users.tokens(), ds.users);
  const auto item_table = detail::remap_table(items.tokens(), ds.items);
  ds.interactions.reserve(pairs.size());
  for (std::uint64_t p : pairs) {
    ds.interactions.push_back({user_table[p >> 32], item_table[p & 0xffffffffu]});
  }
  std::sort(ds.interactions.begin(), ds.interactions.end());
  ds.interactions.erase(std::unique(ds.interactions.begin(), ds.interactions.end()),
                        ds.interactions.end());
  stats.unique_pairs = ds.interactions.size();
  ds.stats = stats;
  return ds;
}

// Reads a delimiter-separated rating log and keeps records whose rating is at
// least the threshold as implicit positives. Duplicate pairs collapse.
inline DomainDataset ingest_interactions(const std::string& path, const IngestOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open interaction file");
  auto ds = ingest_stream(in, path, opts);
  log::info("ingested {}: {} records, {} positive, {} unique pairs, {} users, {} items", path,
            ds.stats.raw_records, ds.stats.positive_records, ds.stats.unique_pairs, ds.users.size(),
            ds.items.size());
  return ds;
}

// Keeps only users present in both domains, drops items left without
// interactions and re-indexes everything.
inline CrossDomainDataset align_overlapping_users(const DomainDataset& ds_x, const DomainDataset& ds_y) {
  if (ds_x.interactions.empty() || ds_y.interactions.empty())
    throw EmptyDatasetError("cannot align an empty domain dataset");
  std::vector<std::string> shared;
  std::set_intersection(ds_x.users.tokens().begin(), ds_x.users.tokens().end(),
                        ds_y.users.tokens().begin(), ds_y.users.tokens().end(),
                        std::back_inserter(shared));
  if (shared.empty()) {
    throw AlignmentError("no overlapping users (domain x has " + std::to_string(ds_x.users.size()) +
                         " users, domain y has " + std::to_string(ds_y.users.size()) + ")");
  }

  CrossDomainDataset out;
  out.shared_users = IdMap::from_tokens(shared);
  const std::array<const DomainDataset*, 2> inputs{&ds_x, &ds_y};
  for (Domain d : kDomains) {
    const DomainDataset& src = *inputs[idx(d)];
    std::vector<std::uint32_t> user_table(src.users.size(), UINT32_MAX);
    for (std::size_t u = 0; u < src.users.size(); ++u) {
      if (auto found = out.shared_users.find(src.users.token(u))) user_table[u] = *found;
    }
    std::vector<std::string> kept_items;
    std::vector<char> item_kept(src.items.size(), 0);
    for (const auto& it : src.interactions) {
      if (user_table[it.user] != UINT32_MAX && !item_kept[it.item]) {
        item_kept[it.item] = 1;
        kept_items.push_back(src.items.token(it.item));
      }
    }
    DomainDataset& dst = out.domain(d);
    dst.users = out.shared_users;
    dst.items = IdMap::from_tokens(kept_items);
    for (const auto& it : src.interactions) {
      if (user_table[it.user] == UINT32_MAX) continue;
      dst.interactions.push_back({user_table[it.user], dst.items.index(src.items.token(it.item))});
    }
    std::sort(dst.interactions.begin(), dst.interactions.end());
    dst.stats = src.stats;
  }
  return out;
}

}  // namespace areil
