// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures for the test suites: scratch directories and small text
// utilities for inspecting emitted artifacts.

#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace testutil {

// Unique temporary directory, recursively removed on scope exit.
class ScratchDir {
 public:
  ScratchDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("dpdbench_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path file(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& path,
                       const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

// Removes one column (0-based) from every row of a CSV text, so files can
// be compared with wall-time fields excluded.
inline std::string drop_csv_column(const std::string& text,
                                   std::size_t column) {
  std::ostringstream out;
  for (const std::string& line : split_lines(text)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream row(line);
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    bool first = true;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i == column) continue;
      if (!first) out << ',';
      out << cells[i];
      first = false;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace testutil
