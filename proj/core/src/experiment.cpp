// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0

#include "dpd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "dpd/optim.hpp"
#include "dpd/report.hpp"

namespace dpd {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json json_double(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0.0 ? "inf" : "-inf";
}

// Runs one seed and writes its reports; returns the summary row.
SeedOutcome run_one_seed(const ExperimentConfig& cfg, const DatasetPair& data,
                         std::uint64_t seed,
                         const std::filesystem::path& csv_path,
                         const std::filesystem::path& json_path) {
  TrainConfig train_cfg = cfg.train;
  train_cfg.seed = seed;
  const TrainResult result = train(data, train_cfg);

  write_report_csv(result.report, csv_path);
  write_report_json(result.report, json_path);

  SeedOutcome outcome;
  outcome.seed = seed;
  outcome.last_nmse_db = result.report.summary.last_nmse_db;
  outcome.mean_nmse_db = result.report.summary.mean_nmse_db;
  outcome.min_nmse_db = result.report.summary.min_nmse_db;
  outcome.total_steps = result.report.summary.total_steps;
  outcome.total_time_s = result.report.summary.total_time_s;
  return outcome;
}

void write_aggregate(const ExperimentConfig& cfg,
                     const std::vector<SeedOutcome>& outcomes,
                     const std::filesystem::path& path) {
  ordered_json doc;
  doc["optimizer"] = cfg.train.optimizer;
  doc["framework"] =
      cfg.train.framework == Framework::standard ? "standard" : "online";

  doc["per_seed"] = ordered_json::array();
  double sum = 0.0;
  for (const SeedOutcome& o : outcomes) {
    ordered_json row;
    row["seed"] = o.seed;
    row["last_nmse_db"] = json_double(o.last_nmse_db);
    row["mean_nmse_db"] = json_double(o.mean_nmse_db);
    row["min_nmse_db"] = json_double(o.min_nmse_db);
    row["total_steps"] = o.total_steps;
    row["total_time_s"] = json_double(o.total_time_s);
    doc["per_seed"].push_back(std::move(row));
    sum += o.last_nmse_db;
  }
  const double n = static_cast<double>(outcomes.size());
  const double mean = sum / n;
  double var = 0.0;
  for (const SeedOutcome& o : outcomes) {
    const double d = o.last_nmse_db - mean;
    var += d * d;
  }
  doc["final_nmse_db"] = {{"mean", json_double(mean)},
                          {"stddev", json_double(std::sqrt(var / n))}};

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw InvalidArgument("write to " + path.string() + " failed");
}

// Runs `jobs` callables on up to `workers` threads. Exceptions are
// captured and the first one (in job order) rethrown after the join.
void run_on_workers(std::vector<std::function<void()>>& jobs,
                    std::size_t workers) {
  if (workers <= 1 || jobs.size() <= 1) {
    for (auto& job : jobs) job();
    return;
  }
  std::mutex next_mutex;
  std::size_t next = 0;
  std::vector<std::exception_ptr> errors(jobs.size());
  const std::size_t n_threads = std::min(workers, jobs.size());
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) {
    pool.emplace_back([&]() {
      while (true) {
        std::size_t mine;
        {
          const std::lock_guard<std::mutex> lock(next_mutex);
          if (next >= jobs.size()) return;
          mine = next++;
        }
        try {
          jobs[mine]();
        } catch (...) {
          errors[mine] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

DatasetPair load_or_generate_dataset(const ExperimentConfig& cfg) {
  DatasetPair data;
  switch (cfg.source) {
    case ExperimentConfig::Source::generate: {
      data.input = generate_carrier(cfg.ticks, cfg.dataset_seed, cfg.window);
      data.target =
          apply_ground_truth_distorter(data.input, MemoryPolyCoeffs::defaults());
      break;
    }
    case ExperimentConfig::Source::binary:
      data.input = load_signal(cfg.input_path);
      data.target = load_signal(cfg.target_path);
      break;
    case ExperimentConfig::Source::csv:
      data.input = load_signal_csv(cfg.input_path);
      data.target = load_signal_csv(cfg.target_path);
      break;
  }
  data.validate();
  return data;
}

std::size_t worker_count_from_env() {
  const char* raw = std::getenv("DPD_BENCH_WORKERS");
  if (raw == nullptr || *raw == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || v < 1) {
    throw InvalidArgument(
        "DPD_BENCH_WORKERS must be a positive integer, got \"" +
        std::string(raw) + "\"");
  }
  return static_cast<std::size_t>(v);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const DatasetPair data = load_or_generate_dataset(cfg);
  const std::filesystem::path out_dir(cfg.out_dir);
  std::filesystem::create_directories(out_dir);

  ExperimentResult result;
  result.outcomes.resize(cfg.seeds.size());

  std::vector<std::function<void()>> jobs;
  jobs.reserve(cfg.seeds.size());
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    const std::uint64_t seed = cfg.seeds[i];
    const std::string stem = "seed_" + std::to_string(seed);
    result.files.push_back(stem + ".csv");
    result.files.push_back(stem + ".json");
    jobs.push_back([&, i, seed, stem]() {
      result.outcomes[i] = run_one_seed(cfg, data, seed, out_dir / (stem + ".csv"),
                                        out_dir / (stem + ".json"));
    });
  }
  run_on_workers(jobs, worker_count_from_env());

  write_aggregate(cfg, result.outcomes, out_dir / "aggregate.json");
  result.files.push_back("aggregate.json");
  return result;
}

std::vector<CompareRow> run_compare(const ExperimentConfig& cfg) {
  const DatasetPair data = load_or_generate_dataset(cfg);
  const std::filesystem::path out_dir(cfg.out_dir);
  std::filesystem::create_directories(out_dir);

  const std::vector<std::string>& roster = optimizer_roster();
  std::vector<CompareRow> rows(roster.size());
  std::vector<std::function<void()>> jobs;
  for (std::size_t mi = 0; mi < roster.size(); ++mi) {
    jobs.push_back([&, mi]() {
      const std::string& method = roster[mi];
      double last_sum = 0.0, mean_sum = 0.0;
      for (const std::uint64_t seed : cfg.seeds) {
        const std::string stem = method + "_seed_" + std::to_string(seed);
        ExperimentConfig method_cfg = cfg;
        method_cfg.train.optimizer = method;
        try {
          const SeedOutcome o =
              run_one_seed(method_cfg, data, seed, out_dir / (stem + ".csv"),
                           out_dir / (stem + ".json"));
          last_sum += o.last_nmse_db;
          mean_sum += o.mean_nmse_db;
        } catch (const NumericError&) {
          // A divergent method must not abort the sweep: the table still
          // gets one row per method, with inf marking the blow-up. Other
          // error kinds (config, I/O) still propagate.
          last_sum = mean_sum = std::numeric_limits<double>::infinity();
          break;
        }
      }
      const double n = static_cast<double>(cfg.seeds.size());
      rows[mi] = {method, last_sum / n, mean_sum / n};
    });
  }
  run_on_workers(jobs, worker_count_from_env());

  const std::filesystem::path table_path = out_dir / "compare.csv";
  std::ofstream out(table_path, std::ios::trunc);
  if (!out) {
    throw InvalidArgument("cannot open " + table_path.string() +
                          " for writing");
  }
  out << "method,nmse_db,mean_nmse_db\n";
  for (const CompareRow& row : rows) {
    out << row.method << ',' << format_db(row.nmse_db) << ','
        << format_db(row.mean_nmse_db) << '\n';
  }
  out.flush();
  if (!out) throw InvalidArgument("write to " + table_path.string() + " failed");
  return rows;
}

}  // namespace dpd
