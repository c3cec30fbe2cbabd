// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0

#include "dpd/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "dpd/rng.hpp"

namespace dpd {

std::vector<std::size_t> WhArchitecture::poly_orders() const {
  std::vector<std::size_t> orders;
  orders.reserve(order_count());
  for (std::size_t p = 1; p <= max_poly_order; p += 2) orders.push_back(p);
  return orders;
}

void WhArchitecture::validate() const {
  if (branches == 0) throw InvalidArgument("architecture needs >= 1 branch");
  if (pre_fir_taps == 0 || post_fir_taps == 0) {
    throw InvalidArgument("FIR stages need >= 1 tap");
  }
  if (max_poly_order == 0 || max_poly_order % 2 == 0) {
    throw InvalidArgument("top polynomial order must be odd and >= 1");
  }
}

ParamVector init_params(const WhArchitecture& arch, InitMode mode,
                        std::uint64_t seed, double scale) {
  arch.validate();
  ParamVector theta;
  theta.coeffs.assign(arch.parameter_count(), cdouble{0.0, 0.0});
  // Branch 0 pass-through: first pre tap, the order-1 coefficient, and the
  // first post tap are 1.
  const std::size_t m1 = arch.pre_fir_taps;
  const std::size_t nord = arch.order_count();
  theta.coeffs[0] = 1.0;
  theta.coeffs[m1] = 1.0;
  theta.coeffs[m1 + nord] = 1.0;

  if (mode == InitMode::seeded_random) {
    Rng rng(seed);
    for (auto& c : theta.coeffs) c += scale * rng.complex_gaussian();
  }
  return theta;
}

std::vector<std::size_t> valid_indices(std::size_t memory_depth,
                                       std::size_t first, std::size_t limit) {
  std::vector<std::size_t> ks;
  const std::size_t start = std::max(first, memory_depth);
  if (start < limit) {
    ks.reserve(limit - start);
    for (std::size_t k = start; k < limit; ++k) ks.push_back(k);
  }
  return ks;
}

namespace {

// Per-branch coefficient offsets in the canonical layout.
struct BranchLayout {
  std::size_t fir1 = 0;
  std::size_t poly = 0;
  std::size_t fir2 = 0;
};

BranchLayout branch_layout(const WhArchitecture& arch, std::size_t b) {
  const std::size_t stride =
      arch.pre_fir_taps + arch.order_count() + arch.post_fir_taps;
  BranchLayout l;
  l.fir1 = b * stride;
  l.poly = l.fir1 + arch.pre_fir_taps;
  l.fir2 = l.poly + arch.order_count();
  return l;
}

void check_batch(const WhArchitecture& arch, const ComplexSignal& x,
                 std::span<const std::size_t> ks) {
  if (ks.empty()) throw InvalidArgument("batch index set must be nonempty");
  const std::size_t depth = arch.memory_depth();
  for (const std::size_t k : ks) {
    if (k < depth || k >= x.size()) {
      throw InvalidArgument("index " + std::to_string(k) +
                            " lacks left context (memory depth " +
                            std::to_string(depth) + ", signal length " +
                            std::to_string(x.size()) + ")");
    }
  }
}

void check_theta(const ParamVector& theta, const WhArchitecture& arch) {
  if (theta.count() != arch.parameter_count()) {
    throw InvalidArgument("parameter vector length " +
                          std::to_string(theta.count()) +
                          " does not match architecture count " +
                          std::to_string(arch.parameter_count()));
  }
}

}  // namespace

std::vector<cdouble> forward(const ParamVector& theta,
                             const WhArchitecture& arch,
                             const ComplexSignal& x,
                             std::span<const std::size_t> ks) {
  arch.validate();
  check_theta(theta, arch);
  check_batch(arch, x, ks);

  const std::size_t B = arch.branches;
  const std::size_t M1 = arch.pre_fir_taps;
  const std::size_t M2 = arch.post_fir_taps;
  const std::size_t nord = arch.order_count();

  std::vector<cdouble> out(ks.size());
  for (std::size_t n = 0; n < ks.size(); ++n) {
    const std::size_t k = ks[n];
    cdouble y = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
      const BranchLayout l = branch_layout(arch, b);
      cdouble branch_out = 0.0;
      for (std::size_t j = 0; j < M2; ++j) {
        const std::size_t t = k - j;
        cdouble u = 0.0;
        for (std::size_t i = 0; i < M1; ++i) {
          u += theta[l.fir1 + i] * x[t - i];
        }
        const double r2 = std::norm(u);
        cdouble poly = 0.0;
        double r2q = 1.0;  // |u|^(p-1) for ascending odd p
        for (std::size_t oi = 0; oi < nord; ++oi) {
          poly += theta[l.poly + oi] * u * r2q;
          r2q *= r2;
        }
        branch_out += theta[l.fir2 + j] * poly;
      }
      y += branch_out;
    }
    if (!std::isfinite(y.real()) || !std::isfinite(y.imag())) {
      throw NumericError("model output is not finite", k);
    }
    out[n] = y;
  }
  return out;
}

LossGrad loss_and_grad(const ParamVector& theta, const WhArchitecture& arch,
                       const ComplexSignal& x, const ComplexSignal& target,
                       std::span<const std::size_t> ks) {
  arch.validate();
  check_theta(theta, arch);
  check_batch(arch, x, ks);
  if (x.size() != target.size()) {
    throw InvalidArgument("input length " + std::to_string(x.size()) +
                          " != target length " + std::to_string(target.size()));
  }

  const std::size_t B = arch.branches;
  const std::size_t M1 = arch.pre_fir_taps;
  const std::size_t M2 = arch.post_fir_taps;
  const std::size_t nord = arch.order_count();

  // Complex adjoint per coefficient: d(loss)/d(conj split) packed so that
  // d/d(re) = 2*Re(adj), d/d(im) = 2*Im(adj) after the residual scaling.
  std::vector<cdouble> adj(theta.count(), cdouble{0.0, 0.0});
  // Per (branch, post tap) intermediates of the current index.
  std::vector<cdouble> u_buf(B * M2), poly_buf(B * M2);

  double loss_sum = 0.0;
  for (const std::size_t k : ks) {
    // Forward pass, keeping each branch's pre-FIR and polynomial outputs.
    cdouble y = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
      const BranchLayout l = branch_layout(arch, b);
      cdouble branch_out = 0.0;
      for (std::size_t j = 0; j < M2; ++j) {
        const std::size_t t = k - j;
        cdouble u = 0.0;
        for (std::size_t i = 0; i < M1; ++i) {
          u += theta[l.fir1 + i] * x[t - i];
        }
        const double r2 = std::norm(u);
        cdouble poly = 0.0;
        double r2q = 1.0;
        for (std::size_t oi = 0; oi < nord; ++oi) {
          poly += theta[l.poly + oi] * u * r2q;
          r2q *= r2;
        }
        u_buf[b * M2 + j] = u;
        poly_buf[b * M2 + j] = poly;
        branch_out += theta[l.fir2 + j] * poly;
      }
      y += branch_out;
    }
    if (!std::isfinite(y.real()) || !std::isfinite(y.imag())) {
      throw NumericError("model output is not finite", k);
    }
    const cdouble r = y - target[k];
    loss_sum += std::norm(r);

    // Reverse pass. Seed adjoint for y is the residual r; the 2/|ks|
    // residual scaling is applied once at the end.
    for (std::size_t b = 0; b < B; ++b) {
      const BranchLayout l = branch_layout(arch, b);
      for (std::size_t j = 0; j < M2; ++j) {
        const cdouble u = u_buf[b * M2 + j];
        const cdouble poly = poly_buf[b * M2 + j];

        adj[l.fir2 + j] += std::conj(poly) * r;
        const cdouble g_poly = std::conj(theta[l.fir2 + j]) * r;

        // Polynomial stage: phi_p(u) = u * |u|^(p-1) with p = 2q+1 is not
        // complex-analytic; its real-split pullback is
        //   g_u += g_phi*(q+1)*|u|^(2q) + conj(g_phi)*q*u^2*|u|^(2q-2).
        const double r2 = std::norm(u);
        cdouble g_u = 0.0;
        double r2q = 1.0;       // |u|^(2q)
        double r2q_prev = 0.0;  // |u|^(2q-2)
        for (std::size_t oi = 0; oi < nord; ++oi) {
          const double q = static_cast<double>(oi);
          adj[l.poly + oi] += std::conj(u * r2q) * g_poly;
          const cdouble g_phi = std::conj(theta[l.poly + oi]) * g_poly;
          g_u += g_phi * ((q + 1.0) * r2q);
          if (oi > 0) g_u += std::conj(g_phi) * (q * r2q_prev) * (u * u);
          r2q_prev = r2q;
          r2q *= r2;
        }

        const std::size_t t = k - j;
        for (std::size_t i = 0; i < M1; ++i) {
          adj[l.fir1 + i] += std::conj(x[t - i]) * g_u;
        }
      }
    }
  }

  const double inv_n = 1.0 / static_cast<double>(ks.size());
  LossGrad lg;
  lg.loss = loss_sum * inv_n;
  lg.grad.resize(2 * theta.count());
  for (std::size_t c = 0; c < theta.count(); ++c) {
    lg.grad[2 * c] = 2.0 * inv_n * adj[c].real();
    lg.grad[2 * c + 1] = 2.0 * inv_n * adj[c].imag();
  }
  return lg;
}

std::vector<ParamBlock> param_blocks(const WhArchitecture& arch) {
  arch.validate();
  std::vector<ParamBlock> blocks;
  blocks.reserve(arch.branches * 3);
  for (std::size_t b = 0; b < arch.branches; ++b) {
    const BranchLayout l = branch_layout(arch, b);
    const std::string prefix = "b" + std::to_string(b) + ".";
    blocks.push_back({prefix + "fir1", 2 * l.fir1, 2 * arch.pre_fir_taps});
    blocks.push_back({prefix + "poly", 2 * l.poly, 2 * arch.order_count()});
    blocks.push_back({prefix + "fir2", 2 * l.fir2, 2 * arch.post_fir_taps});
  }
  return blocks;
}

namespace {

constexpr char kParamMagic[4] = {'D', 'P', 'D', 'P'};
constexpr std::uint32_t kParamVersion = 1;

}  // namespace

void save_params(const std::filesystem::path& path, const ParamVector& theta) {
  if (theta.count() == 0) {
    throw InvalidArgument("refusing to save an empty parameter vector");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");

  out.write(kParamMagic, 4);
  const std::uint32_t version = kParamVersion;
  out.write(reinterpret_cast<const char*>(&version), 4);
  const std::uint64_t count = theta.count();
  out.write(reinterpret_cast<const char*>(&count), 8);
  for (const auto& c : theta.coeffs) {
    const double re = c.real();
    const double im = c.imag();
    out.write(reinterpret_cast<const char*>(&re), 8);
    out.write(reinterpret_cast<const char*>(&im), 8);
  }
  out.flush();
  if (!out) throw InvalidArgument("write to " + path.string() + " failed");
}

ParamVector load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string() + " for reading");

  const auto read_or_throw = [&](void* data, std::size_t n, std::size_t offset,
                                 const char* what) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
      throw FormatError(std::string("truncated file while reading ") + what,
                        offset + static_cast<std::size_t>(in.gcount()));
    }
  };

  char magic[4];
  read_or_throw(magic, 4, 0, "magic");
  if (std::memcmp(magic, kParamMagic, 4) != 0) {
    throw FormatError("bad magic, expected \"DPDP\"", 0);
  }
  std::uint32_t version = 0;
  read_or_throw(&version, 4, 4, "version");
  if (version != kParamVersion) {
    throw FormatError("unsupported parameter format version " +
                          std::to_string(version),
                      4);
  }
  std::uint64_t count = 0;
  read_or_throw(&count, 8, 8, "count");
  if (count == 0) throw FormatError("parameter count 0 violates the format", 8);

  ParamVector theta;
  theta.coeffs.resize(count);
  for (std::uint64_t c = 0; c < count; ++c) {
    double re = 0.0, im = 0.0;
    const std::size_t offset = 16 + 16 * static_cast<std::size_t>(c);
    read_or_throw(&re, 8, offset, "coefficient");
    read_or_throw(&im, 8, offset + 8, "coefficient");
    theta.coeffs[c] = {re, im};
  }
  return theta;
}

}  // namespace dpd
