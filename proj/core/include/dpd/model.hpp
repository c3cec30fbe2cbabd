// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dpd/signal.hpp"

namespace dpd {

// Architecture of the parallel Wiener-Hammerstein cascade: `branches`
// parallel cells, each FIR(pre_fir_taps) -> odd-order polynomial
// nonlinearity -> FIR(post_fir_taps). The polynomial uses every odd order
// 1, 3, ..., max_poly_order.
struct WhArchitecture {
  std::size_t branches = 3;
  std::size_t pre_fir_taps = 4;
  std::size_t post_fir_taps = 4;
  std::size_t max_poly_order = 7;

  std::size_t order_count() const noexcept { return (max_poly_order + 1) / 2; }
  std::vector<std::size_t> poly_orders() const;

  // Ticks of left context a valid output index needs.
  std::size_t memory_depth() const noexcept {
    return pre_fir_taps + post_fir_taps - 2;
  }

  // Complex coefficients: branches * (pre taps + orders + post taps).
  std::size_t parameter_count() const noexcept {
    return branches * (pre_fir_taps + order_count() + post_fir_taps);
  }
  std::size_t real_dim() const noexcept { return 2 * parameter_count(); }

  // Throws InvalidArgument unless all sizes are >= 1 and the top order is odd.
  void validate() const;

  bool operator==(const WhArchitecture&) const = default;
};

// Flat complex coefficient vector in canonical order: for each branch,
// pre-FIR taps, then polynomial coefficients by ascending order, then
// post-FIR taps. Optimizers operate on the real-split view (re, im
// interleaved), which aliases the same storage.
struct ParamVector {
  std::vector<cdouble> coeffs;

  std::size_t count() const noexcept { return coeffs.size(); }
  cdouble& operator[](std::size_t i) noexcept { return coeffs[i]; }
  const cdouble& operator[](std::size_t i) const noexcept { return coeffs[i]; }

  std::span<double> reals() noexcept {
    // std::complex<double> is layout-compatible with double[2].
    return {reinterpret_cast<double*>(coeffs.data()), 2 * coeffs.size()};
  }
  std::span<const double> reals() const noexcept {
    return {reinterpret_cast<const double*>(coeffs.data()), 2 * coeffs.size()};
  }

  bool operator==(const ParamVector&) const = default;
};

enum class InitMode { identity, seeded_random };

// identity: branch 0 is a pass-through (pre-FIR [1,0,...], order-1
// coefficient 1, post-FIR [1,0,...]), every other coefficient 0, so the
// model reproduces its input exactly. seeded_random: identity plus a
// complex Gaussian perturbation of `scale` on every coefficient.
ParamVector init_params(const WhArchitecture& arch, InitMode mode,
                        std::uint64_t seed = 0, double scale = 1e-2);

// Tick positions in [first, limit) that have full left context, i.e. all
// k with k >= memory_depth. Passing limit = signal length gives the full
// valid index set.
std::vector<std::size_t> valid_indices(std::size_t memory_depth,
                                       std::size_t first, std::size_t limit);

// Model output [DPD(x)]_k for each requested index. Every index must
// satisfy memory_depth <= k < x.size(); violations throw InvalidArgument.
// A non-finite output throws NumericError carrying the offending index.
std::vector<cdouble> forward(const ParamVector& theta,
                             const WhArchitecture& arch,
                             const ComplexSignal& x,
                             std::span<const std::size_t> ks);

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;  // d(loss)/d(real-split theta), length real_dim
};

// Mean squared residual over the batch, loss = (1/|ks|) sum |y_k - t_k|^2,
// together with its exact gradient with respect to the real-split
// parameters, computed by reverse accumulation through the cascade. The
// nonlinearity u|u|^(p-1) is differentiated in real-split form; at u = 0
// all orders p > 1 contribute zero gradient (their real-split limit).
LossGrad loss_and_grad(const ParamVector& theta, const WhArchitecture& arch,
                       const ComplexSignal& x, const ComplexSignal& target,
                       std::span<const std::size_t> ks);

// Contiguous real-split spans of the parameter vector, one per branch per
// component ("b0.fir1", "b0.poly", "b0.fir2", "b1.fir1", ...). Used as the
// block structure for preconditioned optimizers.
struct ParamBlock {
  std::string name;
  std::size_t offset = 0;  // in real-split units
  std::size_t size = 0;    // in real-split units
};

std::vector<ParamBlock> param_blocks(const WhArchitecture& arch);

// Binary parameter file: magic "DPDP", u32 version = 1, u64 count, then
// 2*count little-endian 64-bit floats in canonical order.
void save_params(const std::filesystem::path& path, const ParamVector& theta);
ParamVector load_params(const std::filesystem::path& path);

}  // namespace dpd
