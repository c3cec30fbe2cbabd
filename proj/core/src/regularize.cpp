// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0

#include "dpd/regularize.hpp"

#include <cmath>

namespace dpd {

void RegConfig::validate() const {
  if (!std::isfinite(lambda1) || !std::isfinite(lambda2) || lambda1 < 0.0 ||
      lambda2 < 0.0) {
    throw InvalidArgument("regularization weights must be finite and >= 0");
  }
  if (period_epochs == 0) {
    throw InvalidArgument("prox update period must be >= 1 epoch");
  }
}

RegValueGrad reg_value_and_grad(const RegConfig& cfg,
                                std::span<const double> theta) {
  cfg.validate();
  const bool prox = cfg.center == RegConfig::Center::prox;
  if (prox && !cfg.center_point.empty() &&
      cfg.center_point.size() != theta.size()) {
    throw InvalidArgument("prox center shape " +
                          std::to_string(cfg.center_point.size()) +
                          " does not match parameter shape " +
                          std::to_string(theta.size()));
  }

  const bool use_l1 = cfg.kind != RegConfig::Kind::l2;
  const bool use_l2 = cfg.kind != RegConfig::Kind::l1;

  RegValueGrad out;
  out.grad.assign(theta.size(), 0.0);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double center =
        (prox && !cfg.center_point.empty()) ? cfg.center_point[i] : 0.0;
    const double d = theta[i] - center;
    if (use_l2) {
      out.value += cfg.lambda2 * d * d;
      out.grad[i] += 2.0 * cfg.lambda2 * d;
    }
    if (use_l1) {
      out.value += cfg.lambda1 * std::abs(d);
      if (d > 0.0) {
        out.grad[i] += cfg.lambda1;
      } else if (d < 0.0) {
        out.grad[i] -= cfg.lambda1;
      }
      // sign(0) = 0: no contribution at the kink.
    }
  }
  return out;
}

void update_prox_center(RegConfig& cfg, std::span<const double> theta) {
  cfg.validate();
  if (cfg.center != RegConfig::Center::prox) {
    throw UsageError("prox center update requested in zero-centered mode");
  }
  cfg.center_point.assign(theta.begin(), theta.end());
}

}  // namespace dpd
