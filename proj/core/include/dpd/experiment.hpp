// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpd/config.hpp"
#include "dpd/harness.hpp"
#include "dpd/signal.hpp"

namespace dpd {

// Materializes the configured dataset: synthesizes carrier + ground-truth
// target for the generate source, or loads the two configured files.
DatasetPair load_or_generate_dataset(const ExperimentConfig& cfg);

struct SeedOutcome {
  std::uint64_t seed = 0;
  double last_nmse_db = 0.0;
  double mean_nmse_db = 0.0;
  double min_nmse_db = 0.0;
  std::uint64_t total_steps = 0;
  double total_time_s = 0.0;
};

struct ExperimentResult {
  std::vector<SeedOutcome> outcomes;  // one per configured seed, in order
  std::vector<std::string> files;     // artifacts written, relative to out_dir
};

// Runs the configured experiment once per seed, writing seed_<K>.csv and
// seed_<K>.json per run plus aggregate.json (per-seed finals with their
// mean and population standard deviation). Seeds may run on parallel
// workers; set DPD_BENCH_WORKERS to choose the worker count (default 1).
// Reports and the aggregate are deterministic apart from time fields.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct CompareRow {
  std::string method;
  double nmse_db = 0.0;       // final NMSE, averaged over seeds
  double mean_nmse_db = 0.0;  // mean NMSE aggregate, averaged over seeds
};

// Runs the full method roster under one config, writing per-method
// per-seed reports plus compare.csv (method, nmse_db, mean_nmse_db with
// two-decimal dB values). A method whose training diverges (non-finite
// model output) is reported as inf rather than aborting the sweep.
std::vector<CompareRow> run_compare(const ExperimentConfig& cfg);

// Worker count from DPD_BENCH_WORKERS (>= 1); 1 when unset.
std::size_t worker_count_from_env();

}  // namespace dpd
