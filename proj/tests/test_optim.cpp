// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dpd/optim.hpp"
#include "dpd/rng.hpp"

using dpd::OptimOptions;
using dpd::Optimizer;
using dpd::ParamBlock;

namespace {

using GradFn =
    std::function<std::vector<double>(std::span<const double> query)>;

// Drives the shared optimizer protocol (query, gradient at the query,
// step) and records theta after every update.
std::vector<std::vector<double>> drive(Optimizer& opt,
                                       std::vector<double> theta, int steps,
                                       const GradFn& grad_at) {
  std::vector<std::vector<double>> trajectory;
  for (int s = 0; s < steps; ++s) {
    const std::span<const double> q = opt.query_point(theta);
    const std::vector<double> g = grad_at(q);
    opt.step(theta, g);
    trajectory.push_back(theta);
  }
  return trajectory;
}

GradFn constant_gradient(double value) {
  return [value](std::span<const double> q) {
    return std::vector<double>(q.size(), value);
  };
}

// Scalar benchmark: theta0 = 0, g = 1 at every step, lr = 0.1.
std::vector<double> scalar_benchmark(const std::string& name,
                                     const OptimOptions& base, int steps) {
  OptimOptions opts = base;
  opts.lr = 0.1;
  auto opt = dpd::make_optimizer(name, opts, 1);
  std::vector<std::vector<double>> tr =
      drive(*opt, {0.0}, steps, constant_gradient(1.0));
  std::vector<double> flat;
  for (const auto& point : tr) flat.push_back(point[0]);
  return flat;
}

}  // namespace

TEST_SUITE("optim") {

TEST_CASE("sgd scalar steps are exact") {
  const auto tr = scalar_benchmark("sgd", {}, 2);
  CHECK(tr[0] == -0.1);
  CHECK(tr[1] == -0.2);

  OptimOptions opts;
  opts.lr = 0.5;
  auto opt = dpd::make_optimizer("sgd", opts, 1);
  std::vector<double> theta = {1.0};
  opt->step(theta, std::vector<double>{2.0});
  CHECK(theta[0] == 0.0);
}

TEST_CASE("adam first two scalar steps match the hand derivation") {
  // Moments: m1 = 0.1, v1 = 0.001; both bias corrections cancel to 1, so
  // each of the first two updates is -lr/(1 + eps).
  const double step = -0.1 / (1.0 + 1e-8);
  const auto tr = scalar_benchmark("adam", {}, 2);
  CHECK(std::abs(tr[0] - step) <= 1e-9);
  CHECK(std::abs(tr[1] - 2.0 * step) <= 1e-9);
}

TEST_CASE("adam stays at a zero-gradient point") {
  auto opt = dpd::make_optimizer("adam", {}, 3);
  std::vector<double> theta = {0.0, 1.0, -2.0};
  const std::vector<double> start = theta;
  for (int s = 0; s < 4; ++s) {
    opt->step(theta, std::vector<double>{0.0, 0.0, 0.0});
  }
  CHECK(theta == start);
}

TEST_CASE("adamax first two scalar steps match the hand derivation") {
  // u = max(beta2*u, |g|) = 1 for every step; m-hat = 1, so each update
  // is exactly -lr with eps = 0.
  OptimOptions opts;
  opts.eps = 0.0;
  const auto tr = scalar_benchmark("adamax", opts, 2);
  CHECK(tr[0] == -0.1);
  CHECK(std::abs(tr[1] - (-0.2)) <= 1e-9);
}

TEST_CASE("adamax with constant gradient keeps u at that magnitude") {
  // With g = c constant, u = c for all t, so updates follow
  // -lr * (m_t / (1 - beta1^t)) / c; the m-hat factor is 1 in exact
  // arithmetic, making every update -lr.
  OptimOptions opts;
  opts.lr = 0.1;
  opts.eps = 0.0;
  auto opt = dpd::make_optimizer("adamax", opts, 1);
  const auto tr = drive(*opt, {0.0}, 5, constant_gradient(3.0));
  for (int s = 0; s < 5; ++s) {
    CHECK(std::abs(tr[s][0] - (-0.1 * (s + 1))) <= 1e-9);
  }
}

TEST_CASE("rmsprop first two scalar steps match the hand derivation") {
  // v1 = 0.01 -> update -0.1/0.1 = -1; v2 = 0.0199.
  OptimOptions opts;
  opts.eps = 0.0;
  const auto tr = scalar_benchmark("rmsprop", opts, 2);
  CHECK(std::abs(tr[0] - (-1.0)) <= 1e-9);
  CHECK(std::abs(tr[1] - (-1.0 - 0.1 / std::sqrt(0.0199))) <= 1e-9);
}

TEST_CASE("radam stays unrectified through step four, rectifies at five") {
  // rho_inf = 2/(1-beta2) - 1 = 1999; rho_1 = 1999 - 2*0.999/0.001 = 1.
  // rho_t <= 4 for t <= 4, so the first updates are plain -lr * m-hat.
  const auto tr = scalar_benchmark("radam", {}, 5);
  CHECK(std::abs(tr[0] - (-0.1)) <= 1e-9);
  CHECK(std::abs(tr[1] - (-0.2)) <= 1e-9);
  CHECK(std::abs(tr[3] - (-0.4)) <= 1e-9);

  // Step five: rho_5 > 4, so the update gains the rectification factor
  // r_5 and the adaptive denominator (m-hat = v-hat = 1 on this problem).
  const double rho_inf = 2.0 / (1.0 - 0.999) - 1.0;
  const double b5 = std::pow(0.999, 5);
  const double rho5 = rho_inf - 2.0 * 5.0 * b5 / (1.0 - b5);
  REQUIRE(rho5 > 4.0);
  const double r5 = std::sqrt(((rho5 - 4.0) * (rho5 - 2.0) * rho_inf) /
                              ((rho_inf - 4.0) * (rho_inf - 2.0) * rho5));
  const double want = tr[3] - 0.1 * r5 / (1.0 + 1e-8);
  CHECK(std::abs(tr[4] - want) <= 1e-9);
}

TEST_CASE("yogi hand derivation on the scalar benchmark") {
  // v0 = 0, g = 1: sign(v - g^2) = -1 throughout, so v grows additively by
  // (1 - beta2) each step with no decay of the existing accumulator.
  //   t=1: v = 0.001, vhat = 1, mhat = 1  -> update -0.1/(1 + 1e-8).
  //   t=2: v = 0.002, vhat = 0.002/(1 - 0.999^2), mhat = 1.
  // Step one coincides with adam; step two does not (adam's v decays).
  const auto yogi = scalar_benchmark("yogi", {}, 2);
  const double step1 = -0.1 / (1.0 + 1e-8);
  const double vhat2 = 0.002 / (1.0 - 0.999 * 0.999);
  const double step2 = -0.1 / (std::sqrt(vhat2) + 1e-8);
  CHECK(std::abs(yogi[0] - step1) <= 1e-9);
  CHECK(std::abs(yogi[1] - (step1 + step2)) <= 1e-9);

  const auto adam = scalar_benchmark("adam", {}, 2);
  CHECK(std::abs(yogi[0] - adam[0]) <= 1e-12);
  CHECK(yogi[1] != adam[1]);
}

TEST_CASE("yogi second moment stays nonnegative and sign(0) is a fixed point") {
  OptimOptions opts;
  opts.lr = 0.1;
  auto opt = dpd::make_optimizer("yogi", opts, 1);

  // g = 0 from v = 0 exercises sign(0) = 0: nothing moves.
  std::vector<double> theta = {0.25};
  opt->step(theta, std::vector<double>{0.0});
  CHECK(theta[0] == 0.25);

  // A varied gradient stream never drives theta non-finite, which would
  // happen if v went negative (sqrt of a negative).
  dpd::Rng rng(99);
  for (int s = 0; s < 200; ++s) {
    opt->step(theta, std::vector<double>{2.0 * rng.gaussian()});
    REQUIRE(std::isfinite(theta[0]));
  }
}

TEST_CASE("diffgrad first two scalar steps match the hand derivation") {
  // xi_1 = 1/(1+e^-1) with g_prev = 0; xi_2 = 1/2 with g_prev = g = 1.
  OptimOptions opts;
  opts.eps = 0.0;
  const double xi1 = 1.0 / (1.0 + std::exp(-1.0));
  const auto tr = scalar_benchmark("diffgrad", opts, 2);
  CHECK(std::abs(tr[0] - (-0.1 * xi1)) <= 1e-9);
  CHECK(std::abs(tr[1] - (-0.1 * xi1 - 0.05)) <= 1e-9);
}

TEST_CASE("shampoo scalar steps follow the inverse-root accumulator") {
  OptimOptions opts;
  opts.shampoo_eps = 0.0;
  const auto tr = scalar_benchmark("shampoo", opts, 2);
  CHECK(std::abs(tr[0] - (-0.1)) <= 1e-9);
  CHECK(std::abs(tr[1] - (-0.1 - 0.1 / std::sqrt(2.0))) <= 1e-9);
}

TEST_CASE("shampoo on one-dimensional blocks equals normalized sgd") {
  // Per scalar block the preconditioner is H_t = sum of g^2, so each
  // update must equal -lr * g / sqrt(H_t).
  OptimOptions opts;
  opts.lr = 0.1;
  opts.shampoo_eps = 0.0;
  std::vector<ParamBlock> blocks = {{"a", 0, 1}, {"b", 1, 1}};
  auto opt = dpd::make_optimizer("shampoo", opts, 2, blocks);

  dpd::Rng rng(7);
  std::vector<double> theta = {0.0, 0.0};
  std::vector<double> sum_sq = {0.0, 0.0};
  for (int s = 0; s < 10; ++s) {
    const std::vector<double> g = {rng.gaussian(), rng.gaussian()};
    const std::vector<double> before = theta;
    opt->step(theta, g);
    for (int i = 0; i < 2; ++i) {
      sum_sq[i] += g[i] * g[i];
      const double want = before[i] - 0.1 * g[i] / std::sqrt(sum_sq[i]);
      CHECK(std::abs(theta[i] - want) <= 1e-12 * (1.0 + std::abs(want)));
    }
  }
}

TEST_CASE("shampoo preconditions a two-dimensional block") {
  // One step with g = (1, 0): H = diag(eps_S + 1, eps_S), so the update
  // scales coordinate 0 by (eps_S + 1)^(-1/2) and leaves coordinate 1.
  OptimOptions opts;
  opts.lr = 0.1;
  auto opt = dpd::make_optimizer("shampoo", opts, 2);
  std::vector<double> theta = {0.0, 5.0};
  opt->step(theta, std::vector<double>{1.0, 0.0});
  CHECK(std::abs(theta[0] - (-0.1 / std::sqrt(1.0 + 1e-4))) <= 1e-12);
  CHECK(std::abs(theta[1] - 5.0) <= 1e-12);
}

TEST_CASE("shampoo survives singular accumulators via the eigenvalue floor") {
  OptimOptions opts;
  opts.shampoo_eps = 0.0;
  auto opt = dpd::make_optimizer("shampoo", opts, 2);
  std::vector<double> theta = {1.0, 1.0};
  // H stays singular in the second eigendirection; its zero eigenvalue is
  // floored instead of dividing by zero.
  opt->step(theta, std::vector<double>{1.0, 0.0});
  CHECK(std::isfinite(theta[0]));
  CHECK(std::isfinite(theta[1]));
  CHECK(std::abs(theta[1] - 1.0) <= 1e-9);
}

TEST_CASE("shampoo rejects block partitions that do not tile") {
  OptimOptions opts;
  std::vector<ParamBlock> gap = {{"a", 0, 1}, {"b", 2, 1}};
  CHECK_THROWS_AS((void)dpd::make_optimizer("shampoo", opts, 3, gap),
                  dpd::InvalidArgument);
  std::vector<ParamBlock> overlap = {{"a", 0, 2}, {"b", 1, 2}};
  CHECK_THROWS_AS((void)dpd::make_optimizer("shampoo", opts, 3, overlap),
                  dpd::InvalidArgument);
  std::vector<ParamBlock> past_end = {{"a", 0, 4}};
  CHECK_THROWS_AS((void)dpd::make_optimizer("shampoo", opts, 3, past_end),
                  dpd::InvalidArgument);
}

TEST_CASE("lookahead hand example: sgd inner, k=2, alpha=0.5") {
  OptimOptions opts;
  opts.lr = 1.0;
  auto inner = dpd::make_optimizer("sgd", opts, 1);
  auto opt = dpd::make_lookahead(std::move(inner), 2, 0.5);
  const auto tr = drive(*opt, {0.0}, 2, constant_gradient(1.0));
  CHECK(tr[0][0] == -1.0);  // fast step, no sync yet
  CHECK(tr[1][0] == -1.0);  // fast reaches -2, sync pulls back to -1
}

TEST_CASE("lookahead with alpha=1 is bit-identical to its inner optimizer") {
  OptimOptions opts;
  opts.lr = 0.05;
  auto bare = dpd::make_optimizer("adam", opts, 3);
  auto wrapped =
      dpd::make_lookahead(dpd::make_optimizer("adam", opts, 3), 4, 1.0);

  dpd::Rng rng(17);
  std::vector<double> ga, gw;
  std::vector<double> theta_a = {0.1, -0.2, 0.3};
  std::vector<double> theta_w = theta_a;
  for (int s = 0; s < 20; ++s) {
    std::vector<double> g = {rng.gaussian(), rng.gaussian(), rng.gaussian()};
    bare->step(theta_a, g);
    wrapped->step(theta_w, g);
    for (int i = 0; i < 3; ++i) CHECK(theta_w[i] == theta_a[i]);
  }
}

TEST_CASE("lookahead with alpha=0 returns to the anchor every k steps") {
  OptimOptions opts;
  opts.lr = 0.5;
  auto opt = dpd::make_lookahead(dpd::make_optimizer("sgd", opts, 2), 3, 0.0);
  const std::vector<double> start = {1.0, -1.0};
  std::vector<double> theta = start;
  for (int s = 0; s < 3; ++s) {
    opt->step(theta, std::vector<double>{1.0, 2.0});
  }
  CHECK(theta == start);
}

TEST_CASE("lookahead-adam from the factory matches adam before any sync") {
  const auto la = scalar_benchmark("lookahead-adam", {}, 2);
  const auto adam = scalar_benchmark("adam", {}, 2);
  CHECK(la[0] == adam[0]);
  CHECK(la[1] == adam[1]);

  // Fifth step is the first sync: slow anchored at 0 moves halfway.
  const auto la5 = scalar_benchmark("lookahead-adam", {}, 5);
  const auto adam5 = scalar_benchmark("adam", {}, 5);
  CHECK(std::abs(la5[4] - 0.5 * adam5[4]) <= 1e-12);
}

TEST_CASE("lookahead forwards learning-rate changes to the inner method") {
  OptimOptions opts;
  opts.lr = 1.0;
  auto opt = dpd::make_lookahead(dpd::make_optimizer("sgd", opts, 1), 10, 0.5);
  opt->set_lr(0.25);
  std::vector<double> theta = {0.0};
  opt->step(theta, std::vector<double>{1.0});
  CHECK(theta[0] == -0.25);
  CHECK(opt->lr() == 0.25);
}

TEST_CASE("accmbsgd first two updates follow the three-point schedule") {
  // t=1: alpha=1, query = z0 = 0, w1 = -lr; z1 = -lr/2.
  // t=2: alpha=2/3, query = w1/3 + 2*z1/3, w2 = query - lr.
  const auto tr = scalar_benchmark("accmbsgd", {}, 2);
  CHECK(std::abs(tr[0] - (-0.1)) <= 1e-9);
  const double w2 = ((1.0 / 3.0) * (-0.1) + (2.0 / 3.0) * (-0.05)) - 0.1;
  CHECK(std::abs(tr[1] - w2) <= 1e-9);
}

TEST_CASE("accmbsgd announces its query point before each step") {
  auto opt = dpd::make_optimizer("accmbsgd", {}, 1);
  std::vector<double> theta = {0.0};

  CHECK_THROWS_AS(opt->step(theta, std::vector<double>{1.0}), dpd::UsageError);

  (void)opt->query_point(theta);
  opt->step(theta, std::vector<double>{1.0});
  CHECK_THROWS_AS(opt->step(theta, std::vector<double>{1.0}), dpd::UsageError);
}

TEST_CASE("accmbsgd with acceleration disabled is bit-exact sgd") {
  OptimOptions opts;
  opts.lr = 0.3;
  opts.accelerated = false;
  auto acc = dpd::make_optimizer("accmbsgd", opts, 2);
  auto sgd = dpd::make_optimizer("sgd", opts, 2);

  dpd::Rng rng(23);
  std::vector<double> values;
  for (int i = 0; i < 40; ++i) values.push_back(rng.gaussian());
  std::size_t cursor = 0;
  const GradFn stream = [&](std::span<const double> q) {
    std::vector<double> g(q.size());
    for (double& v : g) v = values[cursor++ % values.size()];
    return g;
  };
  const auto ta = drive(*acc, {0.5, -0.5}, 10, stream);
  cursor = 0;
  const auto ts = drive(*sgd, {0.5, -0.5}, 10, stream);
  for (int s = 0; s < 10; ++s) {
    CHECK(ta[s][0] == ts[s][0]);
    CHECK(ta[s][1] == ts[s][1]);
  }
}

TEST_CASE("accmbsgd with zero learning rate is stationary") {
  OptimOptions opts;
  opts.lr = 0.0;
  auto opt = dpd::make_optimizer("accmbsgd", opts, 1);
  const auto tr = drive(*opt, {0.75}, 5, constant_gradient(1.0));
  for (const auto& point : tr) CHECK(point[0] == 0.75);
}

TEST_CASE("reset restores every optimizer to its fresh-state behavior") {
  dpd::Rng rng(31);
  for (const std::string& name : dpd::optimizer_roster()) {
    CAPTURE(name);
    OptimOptions opts;
    opts.lr = 0.05;
    auto fresh = dpd::make_optimizer(name, opts, 2);
    auto used = dpd::make_optimizer(name, opts, 2);

    std::vector<double> scratch = {0.0, 0.0};
    for (int s = 0; s < 5; ++s) {
      const auto q = used->query_point(scratch);
      std::vector<double> g = {rng.gaussian(), rng.gaussian()};
      (void)q;
      used->step(scratch, g);
    }
    used->reset();
    used->reset();  // idempotent
    CHECK(used->step_count() == 0);
    CHECK(used->lr() == 0.05);

    std::vector<double> theta_fresh = {1.0, -1.0};
    std::vector<double> theta_used = {1.0, -1.0};
    const std::vector<double> g0 = {0.7, -0.3};
    (void)fresh->query_point(theta_fresh);
    (void)used->query_point(theta_used);
    fresh->step(theta_fresh, g0);
    used->step(theta_used, g0);
    CHECK(theta_used == theta_fresh);
  }
}

TEST_CASE("reset preserves an adjusted learning rate") {
  auto opt = dpd::make_optimizer("adam", {}, 1);
  opt->set_lr(0.42);
  std::vector<double> theta = {0.0};
  opt->step(theta, std::vector<double>{1.0});
  opt->reset();
  CHECK(opt->lr() == 0.42);
}

TEST_CASE("adaptive updates are invariant to gradient scale") {
  // With eps = 0 the Adam/Adamax/RMSprop update directions are invariant
  // to g -> c*g. Power-of-two scales commute with rounding, so those
  // trajectories must match bit-for-bit; decimal scales accumulate only
  // rounding noise.
  dpd::Rng rng(41);
  std::vector<double> gradients;
  for (int i = 0; i < 20; ++i) gradients.push_back(rng.gaussian());

  for (const std::string& name : {std::string("adam"), std::string("adamax"),
                                  std::string("rmsprop")}) {
    CAPTURE(name);
    OptimOptions opts;
    opts.lr = 0.1;
    opts.eps = 0.0;

    const auto run = [&](double scale) {
      auto opt = dpd::make_optimizer(name, opts, 1);
      std::size_t cursor = 0;
      return drive(*opt, {0.0}, 20, [&](std::span<const double>) {
        return std::vector<double>{scale * gradients[cursor++]};
      });
    };

    const auto base = run(1.0);
    for (const double c : {0x1p10, 0x1p-10}) {
      const auto scaled = run(c);
      for (int s = 0; s < 20; ++s) CHECK(scaled[s][0] == base[s][0]);
    }
    for (const double c : {1e3, 1e-3}) {
      const auto scaled = run(c);
      for (int s = 0; s < 20; ++s) {
        CHECK(std::abs(scaled[s][0] - base[s][0]) <=
              1e-13 * (1.0 + std::abs(base[s][0])));
      }
    }
  }
}

TEST_CASE("factory knows the roster and rejects strangers") {
  const auto& roster = dpd::optimizer_roster();
  REQUIRE(roster.size() == 10);
  CHECK(roster[0] == "adam");
  CHECK(roster == std::vector<std::string>{"adam", "adamax", "rmsprop", "radam",
                                           "yogi", "diffgrad", "shampoo",
                                           "lookahead-adam", "accmbsgd", "sgd"});
  for (const std::string& name : roster) {
    auto opt = dpd::make_optimizer(name, {}, 4);
    CHECK(opt->name() == name);
    CHECK(opt->dim() == 4);
    CHECK(opt->step_count() == 0);
  }
  CHECK_THROWS_AS((void)dpd::make_optimizer("adamw", {}, 4),
                  dpd::InvalidArgument);
}

TEST_CASE("options and step inputs are validated") {
  OptimOptions bad;
  bad.lr = -1.0;
  CHECK_THROWS_AS(bad.validate(), dpd::InvalidArgument);
  bad = OptimOptions{};
  bad.beta1 = 1.0;
  CHECK_THROWS_AS(bad.validate(), dpd::InvalidArgument);
  bad = OptimOptions{};
  bad.beta2 = -0.1;
  CHECK_THROWS_AS(bad.validate(), dpd::InvalidArgument);
  bad = OptimOptions{};
  bad.lookahead_alpha = 1.5;
  CHECK_THROWS_AS(bad.validate(), dpd::InvalidArgument);
  bad = OptimOptions{};
  bad.lookahead_k = 0;
  CHECK_THROWS_AS(bad.validate(), dpd::InvalidArgument);

  auto opt = dpd::make_optimizer("adam", {}, 2);
  std::vector<double> theta = {0.0, 0.0};
  CHECK_THROWS_AS(opt->step(theta, std::vector<double>{1.0}),
                  dpd::InvalidArgument);
  try {
    opt->step(theta, std::vector<double>{1.0, std::nan("")});
    FAIL("expected NumericError");
  } catch (const dpd::NumericError& e) {
    CHECK(e.index() == 1);
  }
  CHECK_THROWS_AS(opt->set_lr(-0.5), dpd::InvalidArgument);
}

TEST_CASE("step counter advances once per update") {
  auto opt = dpd::make_optimizer("rmsprop", {}, 1);
  std::vector<double> theta = {0.0};
  for (std::size_t s = 1; s <= 3; ++s) {
    opt->step(theta, std::vector<double>{1.0});
    CHECK(opt->step_count() == s);
  }
}

}  // TEST_SUITE("optim")
