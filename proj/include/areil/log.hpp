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

#include <cstdio>
#include <cstdlib>
#include <string_view>
#include <utility>

#include <fmt/core.h>

namespace areil::log {

enum class Level { error = 0, info = 1, debug = 2 };

// Verbosity is read once from AREIL_LOG (error|info|debug, default info).
inline Level& threshold() {
  static Level level = [] {
    const char* env = std::getenv("AREIL_LOG");
    if (env == nullptr) return Level::info;
    const std::string_view v(env);
    if (v == "error") return Level::error;
    if (v == "debug") return Level::debug;
    return Level::info;
  }();
  return level;
}

inline void set_level(Level level) { threshold() = level; }

template <typename... Args>
void write(Level level, fmt::format_string<Args...> format, Args&&... args) {
  if (static_cast<int>(level) > static_cast<int>(threshold())) return;
  static constexpr const char* tags[] = {"error", "info", "debug"};
  fmt::print(stderr, "[areil:{}] ", tags[static_cast<int>(level)]);
  fmt::print(stderr, format, std::forward<Args>(args)...);
  std::fputc('\n', stderr);
}

template <typename... Args>
void error(fmt::format_string<Args...> format, Args&&... args) {
  write(Level::error, format, std::forward<Args>(args)...);
}

template <typename... Args>
void info(fmt::format_string<Args...> format, Args&&... args) {
  write(Level::info, format, std::forward<Args>(args)...);
}

template <typename... Args>
void debug(fmt::format_string<Args...> format, Args&&... args) {
  write(Level::debug, format, std::forward<Args>(args)...);
}

}  // namespace areil::log
