// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0

#include "dpd/signal.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "dpd/rng.hpp"

namespace dpd {

namespace {

bool finite(cdouble v) noexcept {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

}  // namespace

void ComplexSignal::validate() const {
  if (samples.empty()) throw InvalidArgument("signal must have length >= 1");
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (!finite(samples[k])) {
      throw InvalidArgument("signal sample " + std::to_string(k) +
                            " is not finite");
    }
  }
}

void DatasetPair::validate() const {
  input.validate();
  target.validate();
  if (input.size() != target.size()) {
    throw InvalidArgument("input length " + std::to_string(input.size()) +
                          " != target length " + std::to_string(target.size()));
  }
}

SegmentPlan::Range SegmentPlan::segment(std::size_t index) const {
  if (index >= segment_count) {
    throw InvalidArgument("segment index " + std::to_string(index) +
                          " out of range (count " +
                          std::to_string(segment_count) + ")");
  }
  return {index * segment_length, (index + 1) * segment_length};
}

cdouble& MemoryPolyCoeffs::at(std::size_t order, std::size_t delay) {
  if (order % 2 == 0 || order > 5 || delay > 2) {
    throw InvalidArgument("coefficient index (p=" + std::to_string(order) +
                          ", d=" + std::to_string(delay) +
                          ") outside the {1,3,5}x{0,1,2} table");
  }
  return g[(order - 1) / 2][delay];
}

const cdouble& MemoryPolyCoeffs::at(std::size_t order,
                                    std::size_t delay) const {
  return const_cast<MemoryPolyCoeffs*>(this)->at(order, delay);
}

MemoryPolyCoeffs MemoryPolyCoeffs::defaults() {
  MemoryPolyCoeffs c;
  c.at(1, 0) = {1.0, 0.0};
  c.at(3, 0) = {-0.05, 0.01};
  c.at(5, 0) = {0.002, 0.0};
  c.at(1, 1) = {0.0, 0.1};
  c.at(3, 1) = {-0.01, 0.0};
  return c;
}

ComplexSignal generate_carrier(std::size_t ticks, std::uint64_t seed,
                               std::size_t window) {
  if (window == 0) throw InvalidArgument("smoothing window must be >= 1");
  if (ticks < window) {
    throw InvalidArgument("signal length " + std::to_string(ticks) +
                          " shorter than smoothing window " +
                          std::to_string(window));
  }

  Rng rng(seed);
  std::vector<cdouble> white(ticks);
  for (auto& w : white) w = rng.complex_gaussian();

  ComplexSignal out;
  out.samples.resize(ticks);
  const double inv_w = 1.0 / static_cast<double>(window);
  double power = 0.0;
  for (std::size_t k = 0; k < ticks; ++k) {
    cdouble acc = 0.0;
    const std::size_t span = std::min(window, k + 1);
    for (std::size_t j = 0; j < span; ++j) acc += white[k - j];
    out.samples[k] = acc * inv_w;
    power += std::norm(out.samples[k]);
  }

  const double mean_power = power / static_cast<double>(ticks);
  if (!(mean_power > 0.0)) {
    throw NumericError("generated carrier has zero power", 0);
  }
  const double scale = 1.0 / std::sqrt(mean_power);
  for (auto& s : out.samples) s *= scale;
  return out;
}

ComplexSignal apply_ground_truth_distorter(const ComplexSignal& x,
                                           const MemoryPolyCoeffs& coeffs) {
  x.validate();
  for (std::size_t row = 0; row < 3; ++row) {
    for (std::size_t d = 0; d < 3; ++d) {
      if (!finite(coeffs.g[row][d])) {
        throw InvalidArgument("distorter coefficient (p=" +
                              std::to_string(2 * row + 1) + ", d=" +
                              std::to_string(d) + ") is not finite");
      }
    }
  }

  const std::size_t m = x.size();
  ComplexSignal y;
  y.samples.assign(m, cdouble{0.0, 0.0});
  for (std::size_t k = 0; k < m; ++k) {
    cdouble acc = 0.0;
    const std::size_t max_d = std::min<std::size_t>(2, k);
    for (std::size_t d = 0; d <= max_d; ++d) {
      const cdouble v = x[k - d];
      const double r2 = std::norm(v);
      // Orders 1, 3, 5 share the powers 1, r^2, r^4 of the modulus.
      acc += coeffs.g[0][d] * v;
      acc += coeffs.g[1][d] * v * r2;
      acc += coeffs.g[2][d] * v * (r2 * r2);
    }
    y.samples[k] = acc;
  }
  return y;
}

namespace {

constexpr char kSignalMagic[4] = {'D', 'P', 'D', 'S'};
constexpr std::uint32_t kFormatVersion = 1;

void write_bytes(std::ofstream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

// Reads exactly n bytes or throws FormatError at the current offset.
void read_bytes(std::ifstream& in, void* data, std::size_t n,
                std::size_t offset, const char* what) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw FormatError(std::string("truncated file while reading ") + what,
                      offset + static_cast<std::size_t>(in.gcount()));
  }
}

}  // namespace

void save_signal(const std::filesystem::path& path, const ComplexSignal& s) {
  s.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");

  write_bytes(out, kSignalMagic, 4);
  const std::uint32_t version = kFormatVersion;
  write_bytes(out, &version, 4);
  const std::uint64_t m = s.size();
  write_bytes(out, &m, 8);
  for (const auto& v : s.samples) {
    const double re = v.real();
    const double im = v.imag();
    write_bytes(out, &re, 8);
    write_bytes(out, &im, 8);
  }
  out.flush();
  if (!out) throw InvalidArgument("write to " + path.string() + " failed");
}

ComplexSignal load_signal(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string() + " for reading");

  char magic[4];
  read_bytes(in, magic, 4, 0, "magic");
  if (std::memcmp(magic, kSignalMagic, 4) != 0) {
    throw FormatError("bad magic, expected \"DPDS\"", 0);
  }
  std::uint32_t version = 0;
  read_bytes(in, &version, 4, 4, "version");
  if (version != kFormatVersion) {
    throw FormatError("unsupported signal format version " +
                          std::to_string(version),
                      4);
  }
  std::uint64_t m = 0;
  read_bytes(in, &m, 8, 8, "length");
  if (m == 0) throw FormatError("signal length 0 violates the format", 8);

  ComplexSignal s;
  s.samples.resize(m);
  for (std::uint64_t k = 0; k < m; ++k) {
    double re = 0.0, im = 0.0;
    const std::size_t offset = 16 + 16 * static_cast<std::size_t>(k);
    read_bytes(in, &re, 8, offset, "sample");
    read_bytes(in, &im, 8, offset + 8, "sample");
    s.samples[k] = {re, im};
  }
  return s;
}

ComplexSignal load_signal_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string() + " for reading");

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty CSV document", 1);
  ++line_no;
  // Tolerate a UTF-8 BOM and trailing carriage return around the header.
  if (line.size() >= 3 && line.compare(0, 3, "\xef\xbb\xbf") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "re,im") {
    throw ParseError("expected header \"re,im\", got \"" + line + "\"", 1);
  }

  ComplexSignal s;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError("expected \"re,im\" row", line_no);
    }
    try {
      std::size_t used = 0;
      const std::string re_text = line.substr(0, comma);
      const std::string im_text = line.substr(comma + 1);
      const double re = std::stod(re_text, &used);
      if (used != re_text.size()) throw std::invalid_argument("re");
      const double im = std::stod(im_text, &used);
      if (used != im_text.size()) throw std::invalid_argument("im");
      s.samples.emplace_back(re, im);
    } catch (const std::logic_error&) {
      throw ParseError("malformed complex sample \"" + line + "\"", line_no);
    }
  }
  if (s.samples.empty()) throw ParseError("CSV contains no samples", line_no);
  s.validate();
  return s;
}

StandardSplit split_standard(const DatasetPair& d, double train_fraction,
                             std::size_t min_train_ticks) {
  d.validate();
  if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
    throw InvalidArgument("train fraction must lie strictly in (0, 1)");
  }
  const std::size_t m = d.size();
  const auto train_len = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(m)));
  if (train_len < min_train_ticks || train_len == 0) {
    throw InvalidArgument("training prefix of " + std::to_string(train_len) +
                          " ticks is shorter than the required " +
                          std::to_string(min_train_ticks));
  }

  StandardSplit split;
  split.train.input.samples.assign(d.input.samples.begin(),
                                   d.input.samples.begin() + static_cast<std::ptrdiff_t>(train_len));
  split.train.target.samples.assign(d.target.samples.begin(),
                                    d.target.samples.begin() + static_cast<std::ptrdiff_t>(train_len));
  split.test = d;
  return split;
}

SegmentPlan split_segments(const DatasetPair& d, std::size_t segment_count) {
  d.validate();
  if (segment_count < 2) {
    throw InvalidArgument("segment count must be >= 2 (one era minimum)");
  }
  const std::size_t m = d.size();
  if (segment_count > m) {
    throw InvalidArgument("segment count " + std::to_string(segment_count) +
                          " exceeds signal length " + std::to_string(m));
  }
  SegmentPlan plan;
  plan.segment_count = segment_count;
  plan.segment_length = m / segment_count;
  return plan;
}

}  // namespace dpd
