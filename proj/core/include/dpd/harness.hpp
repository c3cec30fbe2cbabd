// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpd/model.hpp"
#include "dpd/optim.hpp"
#include "dpd/regularize.hpp"
#include "dpd/schedule.hpp"
#include "dpd/signal.hpp"

namespace dpd {

// Residual power over ks normalized by input power, on a 10*log10 scale:
// 10*log10( sum |y_k - target_k|^2 / sum |x_k|^2 ). The denominator uses
// the INPUT signal x. A zero numerator yields the -infinity sentinel
// (serialized as "-inf"); a zero denominator is an error.
double nmse(const ComplexSignal& y, const ComplexSignal& target,
            const ComplexSignal& x, std::span<const std::size_t> ks);

// Same metric with the model output restricted to the batch: y[i] pairs
// with target[ks[i]] and x[ks[i]].
double nmse_batch(std::span<const cdouble> y, const ComplexSignal& target,
                  const ComplexSignal& x, std::span<const std::size_t> ks);

// Arithmetic mean of per-era dB values. A -inf entry propagates the
// sentinel (callers record a warning when that happens).
double mean_nmse(std::span<const double> per_era_db);

enum class Framework { standard, online };

// One report row. Standard runs append one row per epoch (era stays 0);
// online runs append one row per era (epoch holds the era's last epoch).
struct RunRecord {
  std::size_t era = 0;
  std::size_t epoch = 0;
  std::uint64_t steps = 0;  // cumulative optimizer steps
  double time_s = 0.0;      // seconds since run start; informational only
  std::size_t batch = 0;
  double lr = 0.0;          // last learning rate used in the period
  double loss = 0.0;        // mean training objective over the period
  double nmse_db = 0.0;
  double mean_nmse_db = 0.0;  // running aggregate over rows so far
  double min_nmse_db = 0.0;   // running minimum (-inf sorts below all)
};

struct RunSummary {
  double last_nmse_db = 0.0;
  double mean_nmse_db = 0.0;
  double min_nmse_db = 0.0;
  std::uint64_t total_steps = 0;
  double total_time_s = 0.0;
  // Present when SWA is active: NMSE of the averaged point, reported next
  // to the last iterate's metrics.
  std::optional<double> swa_nmse_db;
};

struct RunReport {
  std::vector<RunRecord> records;
  std::vector<std::string> warnings;
  RunSummary summary;
};

struct TrainConfig {
  Framework framework = Framework::standard;
  std::size_t epochs = 40;          // per run (standard) or per era (online)
  std::size_t segments = 8;         // online only
  double train_fraction = 0.75;     // standard only
  bool reset_between_eras = false;  // optimizer state across era boundaries

  std::string optimizer = "adam";
  OptimOptions opt;
  BatchPolicy batch;
  LrPolicy lr;
  std::optional<RegConfig> reg;

  WhArchitecture arch;
  InitMode init = InitMode::identity;
  std::uint64_t init_seed = 1;
  double init_scale = 1e-2;

  std::uint64_t seed = 1;  // shuffling stream

  // Throws InvalidArgument on structurally impossible settings.
  void validate() const;

  bool operator==(const TrainConfig&) const = default;
};

struct TrainResult {
  ParamVector theta;
  RunReport report;
};

// Standard framework: train on the prefix split, evaluate on the whole
// signal's valid indices at every epoch end. Deterministic for fixed
// (cfg, data) apart from wall-time fields.
TrainResult train_standard(const DatasetPair& data, const TrainConfig& cfg);

// Quasi-online framework: S equal segments; era i trains cfg.epochs epochs
// on segment i and evaluates on segment i+1. Parameters (and optimizer
// state, unless reset_between_eras) carry across eras.
TrainResult train_online(const DatasetPair& data, const TrainConfig& cfg);

// Dispatches on cfg.framework.
TrainResult train(const DatasetPair& data, const TrainConfig& cfg);

// forward + nmse, no side effects on theta or any optimizer.
double evaluate(const ParamVector& theta, const WhArchitecture& arch,
                const DatasetPair& data, std::span<const std::size_t> ks);

}  // namespace dpd
