// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpd/errors.hpp"
#include "dpd/model.hpp"

namespace dpd {

// Hyperparameters shared across the roster. Each method reads the fields
// it needs and ignores the rest.
struct OptimOptions {
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double rms_alpha = 0.99;       // RMSprop decay
  double shampoo_eps = 1e-4;     // preconditioner initialization scale
  std::size_t lookahead_k = 5;   // inner steps per slow sync
  double lookahead_alpha = 0.5;  // slow interpolation weight
  bool accelerated = true;       // accmbsgd three-point schedule on/off

  // Throws InvalidArgument on out-of-range values.
  void validate() const;

  bool operator==(const OptimOptions&) const = default;
};

// First-order optimizer over a real parameter vector of fixed dimension.
//
// Driving protocol, identical for every method:
//   auto q = opt->query_point(theta);   // where to evaluate the gradient
//   ... compute g at q ...
//   opt->step(theta, g);                // update theta in place
// For most methods query_point returns theta itself; the accelerated
// mini-batch scheme extrapolates and returns an internal point, and its
// step() throws UsageError unless a query is outstanding.
class Optimizer {
 public:
  virtual ~Optimizer() = default;

  virtual std::string_view name() const = 0;
  virtual std::span<const double> query_point(std::span<const double> theta);
  virtual void step(std::span<double> theta, std::span<const double> grad) = 0;

  // Zeroes all buffers and the step counter; hyperparameters (including
  // the current learning rate) are preserved.
  virtual void reset() = 0;

  virtual void set_lr(double lr);
  double lr() const noexcept { return lr_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t step_count() const noexcept { return t_; }

 protected:
  Optimizer(std::size_t dim, double lr);

  // Shape and finiteness checks shared by every step implementation.
  void check_step(std::span<const double> theta,
                  std::span<const double> grad) const;

  std::size_t dim_;
  double lr_;
  std::size_t t_ = 0;  // incremented before each update; first update sees 1
};

// The method roster, in canonical comparison order.
const std::vector<std::string>& optimizer_roster();

// Constructs a roster optimizer by name. `blocks` supplies the block
// partition used by preconditioned methods; when empty, the whole vector
// is one block. Unknown names throw InvalidArgument.
std::unique_ptr<Optimizer> make_optimizer(std::string_view name,
                                          const OptimOptions& opts,
                                          std::size_t dim,
                                          std::vector<ParamBlock> blocks = {});

// Wraps any optimizer in the slow-weights envelope: every k inner steps,
// slow <- slow + alpha*(theta - slow) and theta adopts the slow weights.
std::unique_ptr<Optimizer> make_lookahead(std::unique_ptr<Optimizer> inner,
                                          std::size_t k, double alpha);

}  // namespace dpd
