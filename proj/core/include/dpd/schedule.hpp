// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dpd/errors.hpp"

namespace dpd {

// Mini-batch size law evaluated per (era, epoch). Sizes are clamped to
// [1, train_length] at evaluation time, so extreme slopes stay usable.
struct BatchPolicy {
  enum class Kind { fixed, linear_epoch, linear_era, exponential };

  Kind kind = Kind::fixed;
  std::size_t base = 200;   // b0, samples
  double slope = 0.0;       // samples per epoch or era (may be negative)
  double growth = 1.0;      // per-epoch factor for the exponential kind

  bool operator==(const BatchPolicy&) const = default;
};

std::size_t batch_size_at(const BatchPolicy& p, std::size_t era,
                          std::size_t epoch, std::size_t train_length);

// Steps in one epoch: ceil(train_length / batch).
std::size_t steps_in_epoch(std::size_t train_length, std::size_t batch);

// Total optimizer steps over `epochs` epochs of one era under the policy.
// Pure integer arithmetic, usable as a cost model without running training.
std::uint64_t total_steps(const BatchPolicy& p, std::size_t era,
                          std::size_t epochs, std::size_t train_length);

// Learning-rate law evaluated per (era, epoch, step). The cyclic law is a
// linear sawtooth from lr_max down towards lr_min within each period; a
// cosine shape is available as an opt-in variant. `period unit` selects
// whether the sawtooth restarts every epoch or every era (the latter needs
// era_length_epochs to know its span). The swa kind runs warmup_epochs of
// constant lr_max, then the cyclic law.
struct LrPolicy {
  enum class Kind { fixed, linear_floored, cyclic, swa };
  enum class PeriodUnit { epoch, era };
  enum class CycleShape { sawtooth, cosine };

  Kind kind = Kind::fixed;
  double lr_max = 1e-2;
  double lr_min = 6e-3;
  double slope = 1e-4;  // per-epoch decay for linear_floored
  PeriodUnit period_unit = PeriodUnit::epoch;
  CycleShape shape = CycleShape::sawtooth;
  std::size_t warmup_epochs = 1;      // swa only
  std::size_t era_length_epochs = 1;  // era-period cycles only

  // Bounds must be finite; kinds that interpolate towards lr_min require
  // 0 < lr_min <= lr_max, while the fixed kind accepts any lr_max >= 0.
  void validate() const;

  bool operator==(const LrPolicy&) const = default;
};

double lr_at(const LrPolicy& p, std::size_t era, std::size_t epoch,
             std::size_t step_in_epoch, std::size_t steps_per_epoch);

// Running average of cycle-end iterates. The average is defined once at
// least one point has been submitted.
struct SwaState {
  std::vector<double> average;
  std::size_t count = 0;

  void update(std::span<const double> theta);
};

}  // namespace dpd
