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

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/core.h>

#include "areil/config_io.hpp"
#include "areil/error.hpp"
#include "areil/model/model.hpp"
#include "areil/trainer/fit.hpp"

namespace areil {

inline constexpr std::string_view kCheckpointMagic = "AREIL001";

struct Checkpoint {
  ModelState model;
  TrainConfig train;
};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

inline void put_f64(std::string& out, double x) {
  const auto v = std::bit_cast<std::uint64_t>(x);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

class ByteReader {
 public:
  ByteReader(std::string_view bytes, std::string source) : bytes_(bytes), source_(std::move(source)) {}

  bool at_end() const noexcept { return pos_ == bytes_.size(); }

  std::string_view take(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n)
      throw CheckpointError(CheckpointError::Kind::truncated,
                            fmt::format("{}: truncated while reading {} at byte {}", source_, what, pos_));
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::uint32_t u32(const char* what) {
    const auto b = take(4, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(i)]);
    return v;
  }

  double f64(const char* what) {
    const auto b = take(8, what);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(i)]);
    return std::bit_cast<double>(v);
  }

 private:
  std::string_view bytes_;
  std::string source_;
  std::size_t pos_ = 0;
};

struct ShapeInfo {
  std::size_t num_users = 0;
  std::size_t num_items_x = 0;
  std::size_t num_items_y = 0;
};

inline void bind_shape(ConfigBinder& b, ShapeInfo& s) {
  b.bind("shape", "num_users", s.num_users);
  b.bind("shape", "num_items_x", s.num_items_x);
  b.bind("shape", "num_items_y", s.num_items_y);
}

}  // namespace detail

inline std::string checkpoint_config_text(const ModelState& m, const TrainConfig& train) {
  ModelConfig model = m.config;
  TrainConfig t = train;
  detail::ShapeInfo shape{m.num_users, m.num_items[0], m.num_items[1]};
  ConfigBinder b;
  bind_model_config(b, model);
  bind_train_config(b, t);
  detail::bind_shape(b, shape);
  return b.to_ini();
}

inline std::string encode_checkpoint(const ModelState& m, const TrainConfig& train) {
  std::string out(kCheckpointMagic);
  const std::string config = checkpoint_config_text(m, train);
  detail::put_u32(out, static_cast<std::uint32_t>(config.size()));
  out += config;
  for (const auto& p : m.params) {
    detail::put_u32(out, static_cast<std::uint32_t>(p.name.size()));
    out += p.name;
    detail::put_u32(out, 2);
    detail::put_u32(out, static_cast<std::uint32_t>(p.value.rows()));
    detail::put_u32(out, static_cast<std::uint32_t>(p.value.cols()));
    for (double x : p.value.values()) detail::put_f64(out, x);
  }
  return out;
}

// Decodes into a fresh model; nothing is returned unless every check passes.
inline Checkpoint decode_checkpoint(std::string_view bytes, const std::string& source) {
  using Kind = CheckpointError::Kind;
  if (bytes.size() < kCheckpointMagic.size() || bytes.substr(0, kCheckpointMagic.size()) != kCheckpointMagic)
    throw CheckpointError(Kind::bad_magic, source + ": not a checkpoint (bad magic bytes)");
  detail::ByteReader in(bytes.substr(kCheckpointMagic.size()), source);
  const std::uint32_t config_len = in.u32("config length");
  const std::string config(in.take(config_len, "config"));

  Checkpoint ck;
  ModelConfig model;
  detail::ShapeInfo shape;
  ConfigBinder b;
  bind_model_config(b, model);
  bind_train_config(b, ck.train);
  detail::bind_shape(b, shape);
  try {
    b.load_text(config, source + " (config blob)");
  } catch (const InputError& e) {
    throw CheckpointError(Kind::malformed, e.what());
  }
  try {
    ck.model = make_model(model, shape.num_users, shape.num_items_x, shape.num_items_y,
                          [](const std::string&, std::size_t rows, std::size_t cols) { return DenseMatrix(rows, cols); });
  } catch (const InputError& e) {
    throw CheckpointError(Kind::malformed, source + ": invalid stored config: " + e.what());
  }

  for (auto& p : ck.model.params) {
    if (in.at_end())
      throw CheckpointError(Kind::truncated, source + ": missing parameter " + p.name);
    const std::uint32_t name_len = in.u32("name length");
    const std::string name(in.take(name_len, "parameter name"));
    if (name != p.name)
      throw CheckpointError(Kind::malformed, source + ": expected parameter " + p.name + ", found " + name);
    const std::uint32_t rank = in.u32("rank");
    if (rank != 2) throw CheckpointError(Kind::malformed, fmt::format("{}: {} has rank {}", source, name, rank));
    const std::uint32_t rows = in.u32("dims");
    const std::uint32_t cols = in.u32("dims");
    if (rows != p.value.rows() || cols != p.value.cols())
      throw CheckpointError(Kind::shape_mismatch, fmt::format("{}: {} stored as {}x{}, config implies {}", source,
                                                              name, rows, cols, p.value.shape_string()));
    for (double& x : p.value.values()) x = in.f64("values");
  }
  if (!in.at_end()) throw CheckpointError(Kind::malformed, source + ": trailing bytes after last parameter");
  return ck;
}

inline std::filesystem::path history_path_for(const std::filesystem::path& checkpoint) {
  return checkpoint.string() + ".history.tsv";
}

inline std::filesystem::path timing_path_for(const std::filesystem::path& checkpoint) {
  return checkpoint.string() + ".timing.tsv";
}

inline std::string history_header() {
  return "epoch\tl_rec\tl_cls\tl_reg\tl_total\tgrl_lambda\tval_recall_x\tval_ndcg_x\tval_recall_y\tval_ndcg_y\t"
         "metric\tbest";
}

// Deterministic history text; wall time lives in timing_text().
inline std::string history_text(const TrainHistory& h) {
  std::string out = history_header() + "\n";
  for (const auto& r : h.epochs) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", r.epoch, r.rec, r.cls, r.reg, r.total,
                       r.grl_lambda, r.val_recall[0], r.val_ndcg[0], r.val_recall[1], r.val_ndcg[1], r.metric,
                       r.epoch == h.best_epoch ? 1 : 0);
  }
  return out;
}

inline std::string timing_text(const TrainHistory& h) {
  std::string out = "epoch\twall_seconds\n";
  for (const auto& r : h.epochs) out += fmt::format("{}\t{:.3f}\n", r.epoch, r.wall_seconds);
  return out;
}

inline TrainHistory parse_history(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  TrainHistory h;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != history_header()) throw ParseError(source, line_no, "unexpected history header");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    while (true) {
      const auto tab = rest.find('\t');
      f.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (f.size() != 12) throw ParseError(source, line_no, "expected 12 fields");
    const std::string where = source + ":" + std::to_string(line_no);
    auto num = [&](std::size_t i) { return detail::parse_config_value<double>(f[i], where); };
    EpochRecord r;
    r.epoch = detail::parse_config_value<std::size_t>(f[0], where);
    r.rec = num(1);
    r.cls = num(2);
    r.reg = num(3);
    r.total = num(4);
    r.grl_lambda = num(5);
    r.val_recall[0] = num(6);
    r.val_ndcg[0] = num(7);
    r.val_recall[1] = num(8);
    r.val_ndcg[1] = num(9);
    r.metric = num(10);
    if (f[11] == "1") {
      h.best_epoch = r.epoch;
      h.best_metric = r.metric;
    }
    h.epochs.push_back(r);
  }
  return h;
}

inline void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError(CheckpointError::Kind::io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError(CheckpointError::Kind::io, "write failed: " + path.string());
}

// Writes the checkpoint and, next to it, the history and timing tables.
inline void save_checkpoint(const ModelState& m, const TrainConfig& train, const TrainHistory& history,
                            const std::filesystem::path& path) {
  write_bytes(path, encode_checkpoint(m, train));
  write_bytes(history_path_for(path), history_text(history));
  write_bytes(timing_path_for(path), timing_text(history));
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(CheckpointError::Kind::io, "cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_checkpoint(ss.str(), path.string());
}

inline TrainHistory load_history(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open history");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_history(ss.str(), path.string());
}

}  // namespace areil
