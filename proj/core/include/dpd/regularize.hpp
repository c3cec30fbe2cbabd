// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "dpd/errors.hpp"

namespace dpd {

// Penalty added to the training objective. Penalties act on the real-split
// parameter vector (real and imaginary parts independently) and never
// enter the NMSE metric, which stays a pure data statistic.
//
// Center modes: `zero` penalizes distance from the origin; `prox`
// penalizes distance from a moving center that the harness re-anchors to
// the current iterate every `period_epochs` epochs.
struct RegConfig {
  enum class Kind { l1, l2, elastic };
  enum class Center { zero, prox };

  Kind kind = Kind::l2;
  double lambda1 = 1e-4;  // l1 weight
  double lambda2 = 1e-4;  // l2 weight
  Center center = Center::zero;
  std::size_t period_epochs = 1;
  std::vector<double> center_point;  // prox mode; empty means origin

  // Throws InvalidArgument on negative weights or non-finite values.
  void validate() const;

  bool operator==(const RegConfig&) const = default;
};

struct RegValueGrad {
  double value = 0.0;
  std::vector<double> grad;
};

// Penalty value and (sub)gradient at theta. With d = theta - center:
// l2 -> lambda2*||d||^2 and 2*lambda2*d; l1 -> lambda1*||d||_1 and
// lambda1*sign(d) with sign(0) = 0; elastic -> the sum of both.
RegValueGrad reg_value_and_grad(const RegConfig& cfg,
                                std::span<const double> theta);

// Prox re-anchoring: center <- theta. Only valid in prox mode.
void update_prox_center(RegConfig& cfg, std::span<const double> theta);

}  // namespace dpd
