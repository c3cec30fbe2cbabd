// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dpd/harness.hpp"

namespace dpd {

// A full experiment description: training configuration plus dataset
// source, output location, and the seed list for multi-seed runs.
struct ExperimentConfig {
  enum class Source { generate, binary, csv };

  TrainConfig train;

  Source source = Source::generate;
  std::size_t ticks = 16384;        // generate only
  std::uint64_t dataset_seed = 1;   // generate only
  std::size_t window = 8;           // generate only: MA smoothing length
  std::string input_path;           // binary/csv sources
  std::string target_path;          // binary/csv sources

  std::string out_dir = "out";
  std::vector<std::uint64_t> seeds = {1};

  bool operator==(const ExperimentConfig&) const = default;
};

// Parses the line-based config format:
//   * one `key = value` or `section.key = value` per line
//   * `#` starts a comment (anywhere on a line)
//   * blank lines are ignored
//   * later duplicate keys override earlier ones
// Unknown keys, malformed values, and violated invariants all throw
// ParseError carrying the offending 1-based line number. An empty document
// yields the documented defaults.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

// Canonical rendering such that parse_config(render_config(cfg)) == cfg
// for every parseable config.
std::string render_config(const ExperimentConfig& cfg);

}  // namespace dpd
