// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "dpd/errors.hpp"

namespace dpd {

// Deterministic PRNG used everywhere the toolkit needs randomness.
//
// Core generator: xoshiro256++ (Blackman & Vigna). The 256-bit state is
// expanded from a 64-bit seed with splitmix64, so any seed (including 0)
// yields a well-mixed state. Derived draws:
//   * uniform01():   the top 53 bits of one output, scaled by 2^-53 -> [0,1)
//   * gaussian():    Box-Muller on two outputs (cosine branch only)
//   * complex_gaussian(): one Box-Muller pair packed as (z0 + i*z1)/sqrt(2),
//                         i.e. unit-variance circularly symmetric
//   * bounded(n):    multiply-shift range reduction of one output
//
// Every draw consumes a fixed number of raw outputs, so streams are
// reproducible for a fixed seed within one build. Bit-exactness across
// compilers is only guaranteed for the integer and uniform paths; the
// Gaussian path depends on libm's log/cos/sin in its lowest bits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept {
    // splitmix64 stream seeded with `seed` fills the state.
    std::uint64_t x = seed;
    for (auto& word : state_) {
      x += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      word = z ^ (z >> 31);
    }
  }

  // Next raw 64-bit output (xoshiro256++).
  std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform01() noexcept {
    return static_cast<double>(next() >> 11) * 0x1p-53;
  }

  // Uniform double in (0, 1]; safe as a log() argument.
  double uniform_open01() noexcept {
    return static_cast<double>((next() >> 11) + 1) * 0x1p-53;
  }

  // Standard normal via Box-Muller; consumes two raw outputs and keeps
  // only the cosine branch so the stream layout stays trivial.
  double gaussian() noexcept {
    const double u1 = uniform_open01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Circularly symmetric complex normal with E|z|^2 = 1. Uses both
  // Box-Muller branches of one pair, scaled by 1/sqrt(2).
  std::complex<double> complex_gaussian() noexcept {
    const double u1 = uniform_open01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    return {r * std::cos(a) * inv_sqrt2, r * std::sin(a) * inv_sqrt2};
  }

  // Uniform integer in [0, n). Multiply-shift reduction; the modulo bias
  // is below 2^-53 for every n this toolkit uses (n << 2^32).
  std::uint64_t bounded(std::uint64_t n) {
    if (n == 0) throw InvalidArgument("bounded(): n must be positive");
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(next()) * static_cast<unsigned __int128>(n);
    return static_cast<std::uint64_t>(wide >> 64);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t v, int k) noexcept {
    return (v << k) | (v >> (64 - k));
  }

  std::uint64_t state_[4];
};

// In-place Fisher-Yates shuffle driven by `rng`.
template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace dpd
