// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0

#include "dpd/optim.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

namespace dpd {

void OptimOptions::validate() const {
  const auto in_unit = [](double v) { return v >= 0.0 && v < 1.0; };
  if (!std::isfinite(lr) || lr < 0.0) {
    throw InvalidArgument("learning rate must be finite and >= 0");
  }
  if (!in_unit(beta1) || !in_unit(beta2)) {
    throw InvalidArgument("beta1/beta2 must lie in [0, 1)");
  }
  if (!std::isfinite(eps) || eps < 0.0) {
    throw InvalidArgument("eps must be finite and >= 0");
  }
  if (!(rms_alpha > 0.0) || !(rms_alpha < 1.0)) {
    throw InvalidArgument("rms_alpha must lie in (0, 1)");
  }
  if (!std::isfinite(shampoo_eps) || shampoo_eps < 0.0) {
    throw InvalidArgument("shampoo_eps must be finite and >= 0");
  }
  if (lookahead_k == 0) throw InvalidArgument("lookahead k must be >= 1");
  if (!(lookahead_alpha >= 0.0) || !(lookahead_alpha <= 1.0)) {
    throw InvalidArgument("lookahead alpha must lie in [0, 1]");
  }
}

Optimizer::Optimizer(std::size_t dim, double lr) : dim_(dim), lr_(lr) {
  if (dim == 0) throw InvalidArgument("optimizer dimension must be >= 1");
  if (!std::isfinite(lr) || lr < 0.0) {
    throw InvalidArgument("learning rate must be finite and >= 0");
  }
}

std::span<const double> Optimizer::query_point(std::span<const double> theta) {
  if (theta.size() != dim_) {
    throw InvalidArgument("parameter vector length " +
                          std::to_string(theta.size()) +
                          " does not match optimizer dimension " +
                          std::to_string(dim_));
  }
  return theta;
}

void Optimizer::set_lr(double lr) {
  if (!std::isfinite(lr) || lr < 0.0) {
    throw InvalidArgument("learning rate must be finite and >= 0");
  }
  lr_ = lr;
}

void Optimizer::check_step(std::span<const double> theta,
                           std::span<const double> grad) const {
  if (theta.size() != dim_ || grad.size() != dim_) {
    throw InvalidArgument("parameter/gradient length (" +
                          std::to_string(theta.size()) + ", " +
                          std::to_string(grad.size()) +
                          ") does not match optimizer dimension " +
                          std::to_string(dim_));
  }
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i])) {
      throw NumericError("gradient component is not finite", i);
    }
  }
}

namespace {

class Sgd final : public Optimizer {
 public:
  Sgd(std::size_t dim, const OptimOptions& o) : Optimizer(dim, o.lr) {}

  std::string_view name() const override { return "sgd"; }

  void step(std::span<double> theta, std::span<const double> grad) override {
    check_step(theta, grad);
    ++t_;
    for (std::size_t i = 0; i < dim_; ++i) theta[i] -= lr_ * grad[i];
  }

  void reset() override { t_ = 0; }
};

class Adam final : public Optimizer {
 public:
  Adam(std::size_t dim, const OptimOptions& o)
      : Optimizer(dim, o.lr),
        beta1_(o.beta1),
        beta2_(o.beta2),
        eps_(o.eps),
        m_(dim, 0.0),
        v_(dim, 0.0) {}

  std::string_view name() const override { return "adam"; }

  void step(std::span<double> theta, std::span<const double> grad) override {
    check_step(theta, grad);
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < dim_; ++i) {
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
      const double m_hat = m_[i] / bc1;
      const double v_hat = v_[i] / bc2;
      theta[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
    }
  }

  void reset() override {
    t_ = 0;
    std::fill(m_.begin(), m_.end(), 0.0);
    std::fill(v_.begin(), v_.end(), 0.0);
  }

 private:
  double beta1_, beta2_, eps_;
  std::vector<double> m_, v_;
};

class Adamax final : public Optimizer {
 public:
  Adamax(std::size_t dim, const OptimOptions& o)
      : Optimizer(dim, o.lr),
        beta1_(o.beta1),
        beta2_(o.beta2),
        eps_(o.eps),
        m_(dim, 0.0),
        u_(dim, 0.0) {}

  std::string_view name() const override { return "adamax"; }

  void step(std::span<double> theta, std::span<const double> grad) override {
    check_step(theta, grad);
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    for (std::size_t i = 0; i < dim_; ++i) {
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
      u_[i] = std::max(beta2_ * u_[i], std::fabs(grad[i]));
      theta[i] -= (lr_ / bc1) * m_[i] / (u_[i] + eps_);
    }
  }

  void reset() override {
    t_ = 0;
    std::fill(m_.begin(), m_.end(), 0.0);
    std::fill(u_.begin(), u_.end(), 0.0);
  }

 private:
  double beta1_, beta2_, eps_;
  std::vector<double> m_, u_;
};

class RmsProp final : public Optimizer {
 public:
  RmsProp(std::size_t dim, const OptimOptions& o)
      : Optimizer(dim, o.lr), alpha_(o.rms_alpha), eps_(o.eps), v_(dim, 0.0) {}

  std::string_view name() const override { return "rmsprop"; }

  void step(std::span<double> theta, std::span<const double> grad) override {
    check_step(theta, grad);
    ++t_;
    for (std::size_t i = 0; i < dim_; ++i) {
      v_[i] = alpha_ * v_[i] + (1.0 - alpha_) * grad[i] * grad[i];
      theta[i] -= lr_ * grad[i] / (std::sqrt(v_[i]) + eps_);
    }
  }

  void reset() override {
    t_ = 0;
    std::fill(v_.begin(), v_.end(), 0.0);
  }

 private:
  double alpha_, eps_;
  std::vector<double> v_;
};

class RAdam final : public Optimizer {
 public:
  RAdam(std::size_t dim, const OptimOptions& o)
      : Optimizer(dim, o.lr),
        beta1_(o.beta1),
        beta2_(o.beta2),
        eps_(o.eps),
        m_(dim, 0.0),
        v_(dim, 0.0) {}

  std::string_view name() const override { return "radam"; }

  void step(std::span<double> theta, std::span<const double> grad) override {
    check_step(theta, grad);
    ++t_;
    const double t = static_cast<double>(t_);
    const double bc1 = 1.0 - std::pow(beta1_, t);
    const double beta2_t = std::pow(beta2_, t);
    const double bc2 = 1.0 - beta2_t;
    const double rho_inf = 2.0 / (1.0 - beta2_) - 1.0;
    const double rho_t = rho_inf - 2.0 * t * beta2_t / bc2;

    // Variance of the adaptive step is only well-defined once rho_t > 4;
    // before that the update falls back to the bias-corrected momentum.
    const bool rectified = rho_t > 4.0;
    double r_t = 1.0;
    if (rectified) {
      r_t = std::sqrt(((rho_t - 4.0) * (rho_t - 2.0) * rho_inf) /
                      ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t));
    }
    for (std::size_t i = 0; i < dim_; ++i) {
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
      const double m_hat = m_[i] / bc1;
      if (rectified) {
        const double v_hat = std::sqrt(v_[i] / bc2);
        theta[i] -= lr_ * r_t * m_hat / (v_hat + eps_);
      } else {
        theta[i] -= lr_ * m_hat;
      }
    }
  }

  void reset() override {
    t_ = 0;
    std::fill(m_.begin(), m_.end(), 0.0);
    std::fill(v_.begin(), v_.end(), 0.0);
  }

 private:
  double beta1_, beta2_, eps_;
  std::vector<double> m_, v_;
};

class Yogi final : public Optimizer {
 public:
  Yogi(std::size_t dim, const OptimOptions& o)
      : Optimizer(dim, o.lr),
        beta1_(o.beta1),
        beta2_(o.beta2),
        eps_(o.eps),
        m_(dim, 0.0),
        v_(dim, 0.0) {}

  std::string_view name() const override { return "yogi"; }

  void step(std::span<double> theta, std::span<const double> grad) override {
    check_step(theta, grad);
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < dim_; ++i) {
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
      const double g2 = grad[i] * grad[i];
      const double diff = v_[i] - g2;
      const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
      v_[i] -= (1.0 - beta2_) * sign * g2;
      const double m_hat = m_[i] / bc1;
      const double v_hat = v_[i] / bc2;
      theta[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
    }
  }

  void reset() override {
    t_ = 0;
    std::fill(m_.begin(), m_.end(), 0.0);
    std::fill(v_.begin(), v_.end(), 0.0);
  }

 private:
  double beta1_, beta2_, eps_;
  std::vector<double> m_, v_;
};

class DiffGrad final : public Optimizer {
 public:
  DiffGrad(std::size_t dim, const OptimOptions& o)
      : Optimizer(dim, o.lr),
        beta1_(o.beta1),
        beta2_(o.beta2),
        eps_(o.eps),
        m_(dim, 0.0),
        v_(dim, 0.0),
        prev_grad_(dim, 0.0) {}

  std::string_view name() const override { return "diffgrad"; }

  void step(std::span<double> theta, std::span<const double> grad) override {
    check_step(theta, grad);
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < dim_; ++i) {
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
      // Friction: gradients that stopped changing shrink the step.
      const double xi =
          1.0 / (1.0 + std::exp(-std::fabs(prev_grad_[i] - grad[i])));
      const double m_hat = m_[i] / bc1;
      const double v_hat = v_[i] / bc2;
      theta[i] -= lr_ * xi * m_hat / (std::sqrt(v_hat) + eps_);
      prev_grad_[i] = grad[i];
    }
  }

  void reset() override {
    t_ = 0;
    std::fill(m_.begin(), m_.end(), 0.0);
    std::fill(v_.begin(), v_.end(), 0.0);
    std::fill(prev_grad_.begin(), prev_grad_.end(), 0.0);
  }

 private:
  double beta1_, beta2_, eps_;
  std::vector<double> m_, v_, prev_grad_;
};

class Shampoo final : public Optimizer {
 public:
  Shampoo(std::size_t dim, const OptimOptions& o, std::vector<ParamBlock> blocks)
      : Optimizer(dim, o.lr), eps_s_(o.shampoo_eps), blocks_(std::move(blocks)) {
    if (blocks_.empty()) blocks_.push_back({"all", 0, dim});
    validate_blocks();
    for (const auto& b : blocks_) {
      precond_.emplace_back(
          eps_s_ *
          Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(b.size),
                                    static_cast<Eigen::Index>(b.size)));
    }
  }

  std::string_view name() const override { return "shampoo"; }

  void step(std::span<double> theta, std::span<const double> grad) override {
    check_step(theta, grad);
    ++t_;
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
      const auto& block = blocks_[bi];
      const auto n = static_cast<Eigen::Index>(block.size);
      Eigen::Map<const Eigen::VectorXd> g(grad.data() + block.offset, n);

      precond_[bi].noalias() += g * g.transpose();

      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(precond_[bi]);
      if (es.info() != Eigen::Success) {
        throw NumericError("eigendecomposition failed for block " + block.name,
                           bi);
      }
      // Inverse square root through the eigenbasis, flooring eigenvalues
      // so a singular accumulator cannot produce infinities.
      Eigen::VectorXd rotated = es.eigenvectors().transpose() * g;
      for (Eigen::Index j = 0; j < n; ++j) {
        rotated[j] /= std::sqrt(std::max(es.eigenvalues()[j], kEigenFloor));
      }
      const Eigen::VectorXd direction = es.eigenvectors() * rotated;
      for (Eigen::Index j = 0; j < n; ++j) {
        theta[block.offset + static_cast<std::size_t>(j)] -= lr_ * direction[j];
      }
    }
  }

  void reset() override {
    t_ = 0;
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
      const auto n = static_cast<Eigen::Index>(blocks_[bi].size);
      precond_[bi] = eps_s_ * Eigen::MatrixXd::Identity(n, n);
    }
  }

 private:
  static constexpr double kEigenFloor = 1e-12;

  void validate_blocks() const {
    std::vector<ParamBlock> sorted = blocks_;
    std::sort(sorted.begin(), sorted.end(),
              [](const ParamBlock& a, const ParamBlock& b) {
                return a.offset < b.offset;
              });
    std::size_t expected = 0;
    for (const auto& b : sorted) {
      if (b.size == 0 || b.offset != expected) {
        throw InvalidArgument("preconditioner blocks must tile the parameter "
                              "vector exactly (bad block \"" +
                              b.name + "\")");
      }
      expected = b.offset + b.size;
    }
    if (expected != dim_) {
      throw InvalidArgument("preconditioner blocks cover " +
                            std::to_string(expected) + " of " +
                            std::to_string(dim_) + " parameters");
    }
  }

  double eps_s_;
  std::vector<ParamBlock> blocks_;
  std::vector<Eigen::MatrixXd> precond_;
};

class Lookahead final : public Optimizer {
 public:
  Lookahead(std::unique_ptr<Optimizer> inner, std::size_t k, double alpha)
      : Optimizer(inner->dim(), inner->lr()),
        inner_(std::move(inner)),
        k_(k),
        alpha_(alpha),
        name_("lookahead-" + std::string(inner_->name())) {
    if (k_ == 0) throw InvalidArgument("lookahead k must be >= 1");
    if (!(alpha_ >= 0.0) || !(alpha_ <= 1.0)) {
      throw InvalidArgument("lookahead alpha must lie in [0, 1]");
    }
  }

  std::string_view name() const override { return name_; }

  std::span<const double> query_point(std::span<const double> theta) override {
    return inner_->query_point(theta);
  }

  void set_lr(double lr) override {
    Optimizer::set_lr(lr);
    inner_->set_lr(lr);
  }

  void step(std::span<double> theta, std::span<const double> grad) override {
    check_step(theta, grad);
    // Slow weights anchor to the parameters seen at the first step.
    if (slow_.empty()) slow_.assign(theta.begin(), theta.end());
    inner_->step(theta, grad);
    ++t_;
    if (t_ % k_ == 0) {
      if (alpha_ == 1.0) {
        // Degenerate sync: slow adopts theta exactly, bit for bit.
        slow_.assign(theta.begin(), theta.end());
      } else {
        for (std::size_t i = 0; i < dim_; ++i) {
          slow_[i] += alpha_ * (theta[i] - slow_[i]);
        }
      }
      std::copy(slow_.begin(), slow_.end(), theta.begin());
    }
  }

  void reset() override {
    inner_->reset();
    t_ = 0;
    slow_.clear();
  }

 private:
  std::unique_ptr<Optimizer> inner_;
  std::size_t k_;
  double alpha_;
  std::string name_;
  std::vector<double> slow_;
};

// Accelerated mini-batch SGD: three-point scheme over iterate sequences
// (w, z) with alpha_t = 2/(t+1) and gamma_t = lr*t/2. The caller must
// fetch query_point() and evaluate the gradient there before each step;
// the reported parameter vector is w.
class AccMbSgd final : public Optimizer {
 public:
  AccMbSgd(std::size_t dim, const OptimOptions& o)
      : Optimizer(dim, o.lr), accelerated_(o.accelerated) {}

  std::string_view name() const override { return "accmbsgd"; }

  std::span<const double> query_point(std::span<const double> theta) override {
    Optimizer::query_point(theta);  // shape check
    if (z_.empty()) z_.assign(theta.begin(), theta.end());
    w_.assign(theta.begin(), theta.end());
    query_.resize(dim_);
    if (accelerated_) {
      const double a = 2.0 / (static_cast<double>(t_ + 1) + 1.0);
      for (std::size_t i = 0; i < dim_; ++i) {
        query_[i] = (1.0 - a) * w_[i] + a * z_[i];
      }
    } else {
      std::copy(w_.begin(), w_.end(), query_.begin());
    }
    pending_ = true;
    return {query_.data(), query_.size()};
  }

  void step(std::span<double> theta, std::span<const double> grad) override {
    check_step(theta, grad);
    if (!pending_) {
      throw UsageError(
          "accmbsgd step without a matching query_point (the gradient must "
          "be evaluated at the announced query point)");
    }
    ++t_;
    const double gamma =
        accelerated_ ? lr_ * static_cast<double>(t_) / 2.0 : 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      w_[i] = query_[i] - lr_ * grad[i];
      z_[i] -= gamma * grad[i];
      theta[i] = w_[i];
    }
    pending_ = false;
  }

  void reset() override {
    t_ = 0;
    w_.clear();
    z_.clear();
    query_.clear();
    pending_ = false;
  }

 private:
  bool accelerated_;
  bool pending_ = false;
  std::vector<double> w_, z_, query_;
};

}  // namespace

const std::vector<std::string>& optimizer_roster() {
  static const std::vector<std::string> roster = {
      "adam",     "adamax",  "rmsprop",        "radam",    "yogi",
      "diffgrad", "shampoo", "lookahead-adam", "accmbsgd", "sgd"};
  return roster;
}

std::unique_ptr<Optimizer> make_optimizer(std::string_view name,
                                          const OptimOptions& opts,
                                          std::size_t dim,
                                          std::vector<ParamBlock> blocks) {
  opts.validate();
  if (name == "adam") return std::make_unique<Adam>(dim, opts);
  if (name == "adamax") return std::make_unique<Adamax>(dim, opts);
  if (name == "rmsprop") return std::make_unique<RmsProp>(dim, opts);
  if (name == "radam") return std::make_unique<RAdam>(dim, opts);
  if (name == "yogi") return std::make_unique<Yogi>(dim, opts);
  if (name == "diffgrad") return std::make_unique<DiffGrad>(dim, opts);
  if (name == "shampoo") {
    return std::make_unique<Shampoo>(dim, opts, std::move(blocks));
  }
  if (name == "lookahead-adam") {
    return std::make_unique<Lookahead>(std::make_unique<Adam>(dim, opts),
                                       opts.lookahead_k, opts.lookahead_alpha);
  }
  if (name == "accmbsgd") return std::make_unique<AccMbSgd>(dim, opts);
  if (name == "sgd") return std::make_unique<Sgd>(dim, opts);

  std::string known;
  for (const auto& n : optimizer_roster()) {
    if (!known.empty()) known += ", ";
    known += n;
  }
  throw InvalidArgument("unknown optimizer \"" + std::string(name) +
                        "\"; known methods: " + known);
}

std::unique_ptr<Optimizer> make_lookahead(std::unique_ptr<Optimizer> inner,
                                          std::size_t k, double alpha) {
  return std::make_unique<Lookahead>(std::move(inner), k, alpha);
}

}  // namespace dpd
