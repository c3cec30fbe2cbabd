// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0

#include "dpd/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dpd {

std::size_t batch_size_at(const BatchPolicy& p, std::size_t era,
                          std::size_t epoch, std::size_t train_length) {
  if (train_length == 0) {
    throw InvalidArgument("training segment must be nonempty");
  }
  double raw = 0.0;
  switch (p.kind) {
    case BatchPolicy::Kind::fixed:
      raw = static_cast<double>(p.base);
      break;
    case BatchPolicy::Kind::linear_epoch:
      raw = static_cast<double>(p.base) + p.slope * static_cast<double>(epoch);
      break;
    case BatchPolicy::Kind::linear_era:
      raw = static_cast<double>(p.base) + p.slope * static_cast<double>(era);
      break;
    case BatchPolicy::Kind::exponential:
      raw = std::round(static_cast<double>(p.base) *
                       std::pow(p.growth, static_cast<double>(epoch)));
      break;
  }
  if (!std::isfinite(raw)) {
    throw InvalidArgument("batch policy evaluated to a non-finite size");
  }
  if (raw < 1.0) return 1;
  const double clamped = std::min(raw, static_cast<double>(train_length));
  return static_cast<std::size_t>(clamped);
}

std::size_t steps_in_epoch(std::size_t train_length, std::size_t batch) {
  if (batch == 0) throw InvalidArgument("batch size must be >= 1");
  if (train_length == 0) {
    throw InvalidArgument("training segment must be nonempty");
  }
  return (train_length + batch - 1) / batch;
}

std::uint64_t total_steps(const BatchPolicy& p, std::size_t era,
                          std::size_t epochs, std::size_t train_length) {
  std::uint64_t total = 0;
  for (std::size_t e = 0; e < epochs; ++e) {
    total += steps_in_epoch(train_length, batch_size_at(p, era, e, train_length));
  }
  return total;
}

void LrPolicy::validate() const {
  if (!std::isfinite(lr_max) || !std::isfinite(lr_min) ||
      !std::isfinite(slope)) {
    throw InvalidArgument("learning-rate bounds must be finite");
  }
  // The fixed kind only reads lr_max; lr_max = 0 is allowed there so no-op
  // training runs stay expressible. Every other kind interpolates towards
  // lr_min and needs positive, ordered bounds.
  if (kind == Kind::fixed) {
    if (lr_max < 0.0) throw InvalidArgument("fixed learning rate must be >= 0");
    return;
  }
  if (!(lr_min > 0.0) || lr_min > lr_max) {
    throw InvalidArgument("learning-rate bounds must satisfy 0 < min <= max");
  }
}

namespace {

// Position in [0, 1) within the current cycle.
double cycle_fraction(const LrPolicy& p, std::size_t epoch,
                      std::size_t step_in_epoch, std::size_t steps_per_epoch) {
  if (p.period_unit == LrPolicy::PeriodUnit::epoch) {
    return static_cast<double>(step_in_epoch) /
           static_cast<double>(steps_per_epoch);
  }
  // Era period: the cycle spans era_length_epochs whole epochs.
  const std::size_t span = std::max<std::size_t>(1, p.era_length_epochs);
  const std::size_t epoch_in_era = epoch % span;
  return (static_cast<double>(epoch_in_era) +
          static_cast<double>(step_in_epoch) /
              static_cast<double>(steps_per_epoch)) /
         static_cast<double>(span);
}

double cyclic_lr(const LrPolicy& p, double fraction) {
  if (p.shape == LrPolicy::CycleShape::cosine) {
    return p.lr_min + 0.5 * (p.lr_max - p.lr_min) *
                          (1.0 + std::cos(std::numbers::pi * fraction));
  }
  return p.lr_max - (p.lr_max - p.lr_min) * fraction;
}

}  // namespace

double lr_at(const LrPolicy& p, std::size_t era, std::size_t epoch,
             std::size_t step_in_epoch, std::size_t steps_per_epoch) {
  (void)era;
  p.validate();
  if (steps_per_epoch == 0) {
    throw InvalidArgument("steps_per_epoch must be >= 1");
  }
  if (step_in_epoch >= steps_per_epoch) {
    throw InvalidArgument("step index exceeds steps_per_epoch");
  }

  switch (p.kind) {
    case LrPolicy::Kind::fixed:
      return p.lr_max;
    case LrPolicy::Kind::linear_floored:
      return std::max(p.lr_max - p.slope * static_cast<double>(epoch),
                      p.lr_min);
    case LrPolicy::Kind::cyclic:
      return cyclic_lr(p, cycle_fraction(p, epoch, step_in_epoch,
                                         steps_per_epoch));
    case LrPolicy::Kind::swa:
      if (epoch < p.warmup_epochs) return p.lr_max;
      return cyclic_lr(p, cycle_fraction(p, epoch - p.warmup_epochs,
                                         step_in_epoch, steps_per_epoch));
  }
  throw InvalidArgument("unknown learning-rate kind");
}

void SwaState::update(std::span<const double> theta) {
  if (count == 0) {
    average.assign(theta.begin(), theta.end());
    count = 1;
    return;
  }
  if (average.size() != theta.size()) {
    throw InvalidArgument("SWA point shape changed between updates");
  }
  const double n = static_cast<double>(count);
  const double inv = 1.0 / (n + 1.0);
  for (std::size_t i = 0; i < average.size(); ++i) {
    average[i] = (n * average[i] + theta[i]) * inv;
  }
  ++count;
}

}  // namespace dpd
