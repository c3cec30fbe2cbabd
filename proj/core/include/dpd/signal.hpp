// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "dpd/errors.hpp"

namespace dpd {

using cdouble = std::complex<double>;

// Ordered sequence of complex baseband samples (dimensionless amplitude).
struct ComplexSignal {
  std::vector<cdouble> samples;

  std::size_t size() const noexcept { return samples.size(); }
  cdouble& operator[](std::size_t i) noexcept { return samples[i]; }
  const cdouble& operator[](std::size_t i) const noexcept { return samples[i]; }

  // Throws InvalidArgument unless the signal is nonempty and finite.
  void validate() const;

  bool operator==(const ComplexSignal&) const = default;
};

// Input signal x paired with its pre-distortion target.
struct DatasetPair {
  ComplexSignal input;
  ComplexSignal target;

  std::size_t size() const noexcept { return input.size(); }

  // Throws InvalidArgument on length mismatch or invalid member signals.
  void validate() const;
};

// Equal-length segmentation of a signal prefix. Era i trains on segment i
// and evaluates on segment i+1, so era_count = segment_count - 1.
struct SegmentPlan {
  std::size_t segment_count = 0;
  std::size_t segment_length = 0;

  std::size_t era_count() const noexcept { return segment_count - 1; }

  struct Range {
    std::size_t begin = 0;
    std::size_t end = 0;  // half-open

    std::size_t size() const noexcept { return end - begin; }
  };

  Range segment(std::size_t index) const;
  Range train_range(std::size_t era) const { return segment(era); }
  Range test_range(std::size_t era) const { return segment(era + 1); }
};

// Memory-polynomial coefficient table g[p][d] for odd orders p in {1,3,5}
// and delays d in {0,1,2}. Used only by the synthetic ground-truth stage.
struct MemoryPolyCoeffs {
  // Row index = (p-1)/2, column index = d.
  std::array<std::array<cdouble, 3>, 3> g{};

  cdouble& at(std::size_t order, std::size_t delay);
  const cdouble& at(std::size_t order, std::size_t delay) const;

  // Mild distortion constants used by default dataset generation:
  // g[1][0]=1, g[3][0]=-0.05+0.01i, g[5][0]=0.002, g[1][1]=0.1i,
  // g[3][1]=-0.01, all others 0. Identity-dominated so an identity
  // model initialization starts close to the target.
  static MemoryPolyCoeffs defaults();
};

// Band-limited complex noise carrier: i.i.d. CN(0,1) samples convolved with
// a length-`window` uniform moving-average kernel (causal, zero-padded at
// the start), then scaled so mean square modulus is 1 within 1e-12.
// Deterministic for fixed (ticks, seed, window) within one build.
ComplexSignal generate_carrier(std::size_t ticks, std::uint64_t seed,
                               std::size_t window);

// Target synthesis: y_k = sum_{p,d} g[p][d] * x_{k-d} * |x_{k-d}|^{p-1},
// with x_{k-d} = 0 when k < d. Output length equals input length.
ComplexSignal apply_ground_truth_distorter(const ComplexSignal& x,
                                           const MemoryPolyCoeffs& coeffs);

// Binary signal file: magic "DPDS", u32 version = 1, u64 length m, then
// m little-endian (re, im) pairs of 64-bit floats. Round trips bit-exactly.
void save_signal(const std::filesystem::path& path, const ComplexSignal& s);
ComplexSignal load_signal(const std::filesystem::path& path);

// CSV import: header line "re,im", one sample per row.
ComplexSignal load_signal_csv(const std::filesystem::path& path);

struct StandardSplit {
  DatasetPair train;  // prefix of floor(train_fraction * m) ticks
  DatasetPair test;   // the whole signal
};

// Prefix split: train is the first floor(train_fraction*m) ticks, test is
// the whole signal. `min_train_ticks` lets callers enforce that the prefix
// still has room for their model's memory: a prefix shorter than it is
// rejected with InvalidArgument.
StandardSplit split_standard(const DatasetPair& d, double train_fraction,
                             std::size_t min_train_ticks = 1);

// Equal-length segmentation: segment_length = floor(m / segment_count),
// trailing remainder ticks discarded.
SegmentPlan split_segments(const DatasetPair& d, std::size_t segment_count);

}  // namespace dpd
