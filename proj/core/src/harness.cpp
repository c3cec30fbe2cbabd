// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0

#include "dpd/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>

#include "dpd/rng.hpp"

namespace dpd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double nmse_from_sums(double residual_power, double input_power) {
  if (!(input_power > 0.0)) {
    throw InvalidArgument("NMSE denominator (input power over the index set) "
                          "is zero");
  }
  if (residual_power == 0.0) return kNegInf;
  return 10.0 * std::log10(residual_power / input_power);
}

}  // namespace

double nmse(const ComplexSignal& y, const ComplexSignal& target,
            const ComplexSignal& x, std::span<const std::size_t> ks) {
  if (y.size() != target.size() || y.size() != x.size()) {
    throw InvalidArgument("NMSE inputs must have equal lengths");
  }
  if (ks.empty()) throw InvalidArgument("NMSE index set must be nonempty");
  double num = 0.0, den = 0.0;
  for (const std::size_t k : ks) {
    if (k >= y.size()) {
      throw InvalidArgument("NMSE index " + std::to_string(k) +
                            " out of range");
    }
    num += std::norm(y[k] - target[k]);
    den += std::norm(x[k]);
  }
  return nmse_from_sums(num, den);
}

double nmse_batch(std::span<const cdouble> y, const ComplexSignal& target,
                  const ComplexSignal& x, std::span<const std::size_t> ks) {
  if (target.size() != x.size()) {
    throw InvalidArgument("NMSE inputs must have equal lengths");
  }
  if (ks.empty()) throw InvalidArgument("NMSE index set must be nonempty");
  if (y.size() != ks.size()) {
    throw InvalidArgument("batch output length does not match index set");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const std::size_t k = ks[i];
    if (k >= x.size()) {
      throw InvalidArgument("NMSE index " + std::to_string(k) +
                            " out of range");
    }
    num += std::norm(y[i] - target[k]);
    den += std::norm(x[k]);
  }
  return nmse_from_sums(num, den);
}

double mean_nmse(std::span<const double> per_era_db) {
  if (per_era_db.empty()) {
    throw InvalidArgument("mean NMSE needs at least one value");
  }
  double sum = 0.0;
  for (const double v : per_era_db) sum += v;
  return sum / static_cast<double>(per_era_db.size());
}

void TrainConfig::validate() const {
  if (epochs == 0) throw InvalidArgument("training needs epochs >= 1");
  if (framework == Framework::online && segments < 2) {
    throw InvalidArgument("online framework needs segments >= 2");
  }
  if (framework == Framework::standard &&
      (!(train_fraction > 0.0) || !(train_fraction < 1.0))) {
    throw InvalidArgument("train fraction must lie strictly in (0, 1)");
  }
  arch.validate();
  opt.validate();
  lr.validate();
  if (reg) reg->validate();
  if (!std::isfinite(init_scale) || init_scale < 0.0) {
    throw InvalidArgument("init scale must be finite and >= 0");
  }
}

double evaluate(const ParamVector& theta, const WhArchitecture& arch,
                const DatasetPair& data, std::span<const std::size_t> ks) {
  const std::vector<cdouble> y = forward(theta, arch, data.input, ks);
  return nmse_batch(y, data.target, data.input, ks);
}

namespace {

using Clock = std::chrono::steady_clock;

// Mutable state shared by both frameworks' epoch loops.
struct LoopState {
  explicit LoopState(const TrainConfig& cfg)
      : theta(init_params(cfg.arch, cfg.init, cfg.init_seed, cfg.init_scale)),
        opt(make_optimizer(cfg.optimizer, cfg.opt, cfg.arch.real_dim(),
                           param_blocks(cfg.arch))),
        reg(cfg.reg),
        rng(cfg.seed),
        start(Clock::now()) {}

  ParamVector theta;
  std::unique_ptr<Optimizer> opt;
  std::optional<RegConfig> reg;
  SwaState swa;
  Rng rng;
  Clock::time_point start;

  ParamVector query_scratch;
  std::uint64_t cum_steps = 0;
  std::size_t global_epoch = 0;

  double nmse_sum = 0.0;
  std::size_t nmse_count = 0;
  double nmse_min = std::numeric_limits<double>::infinity();
  bool warned_sentinel = false;

  double elapsed_s() const {
    return std::chrono::duration<double>(Clock::now() - start).count();
  }
};

struct EpochOutcome {
  double objective_sum = 0.0;
  std::size_t steps = 0;
  std::size_t batch = 0;
  double last_lr = 0.0;
};

// One epoch of mini-batch steps over train_ks (shuffled in place).
EpochOutcome run_epoch(LoopState& st, const TrainConfig& cfg,
                       const LrPolicy& lr_policy, const DatasetPair& data,
                       std::vector<std::size_t>& train_ks, std::size_t era,
                       std::size_t epoch) {
  const std::size_t n_train = train_ks.size();
  const std::size_t b = batch_size_at(cfg.batch, era, epoch, n_train);
  const std::size_t spe = steps_in_epoch(n_train, b);
  shuffle(train_ks, st.rng);

  EpochOutcome out;
  out.batch = b;
  out.steps = spe;
  for (std::size_t s = 0; s < spe; ++s) {
    const std::size_t lo = s * b;
    const std::size_t hi = std::min(lo + b, n_train);
    const std::span<const std::size_t> ks(train_ks.data() + lo, hi - lo);

    const double lr = lr_at(lr_policy, era, epoch, s, spe);
    st.opt->set_lr(lr);
    out.last_lr = lr;

    try {
      const std::span<const double> q = st.opt->query_point(st.theta.reals());

      // Gradient is evaluated at the optimizer's query point, which for
      // most methods aliases theta itself.
      const ParamVector* at = &st.theta;
      if (q.data() != st.theta.reals().data()) {
        st.query_scratch.coeffs.resize(st.theta.count());
        std::copy(q.begin(), q.end(), st.query_scratch.reals().begin());
        at = &st.query_scratch;
      }

      LossGrad lg = loss_and_grad(*at, cfg.arch, data.input, data.target, ks);
      double objective = lg.loss;
      if (st.reg) {
        const RegValueGrad rg = reg_value_and_grad(*st.reg, q);
        objective += rg.value;
        for (std::size_t i = 0; i < lg.grad.size(); ++i) {
          lg.grad[i] += rg.grad[i];
        }
      }
      st.opt->step(st.theta.reals(), lg.grad);
      out.objective_sum += objective;
    } catch (const NumericError& e) {
      throw NumericError("era " + std::to_string(era) + " epoch " +
                             std::to_string(epoch) + " step " +
                             std::to_string(s) + ": " + e.message(),
                         e.index());
    }
  }
  st.cum_steps += spe;
  ++st.global_epoch;

  if (st.reg && st.reg->center == RegConfig::Center::prox &&
      st.global_epoch % st.reg->period_epochs == 0) {
    update_prox_center(*st.reg, st.theta.reals());
  }
  if (lr_policy.kind == LrPolicy::Kind::swa && epoch >= lr_policy.warmup_epochs) {
    st.swa.update(st.theta.reals());
  }
  return out;
}

void append_record(RunReport& report, LoopState& st, std::size_t era,
                   std::size_t epoch, const EpochOutcome& o, double nmse_db) {
  if (nmse_db == kNegInf && !st.warned_sentinel) {
    report.warnings.push_back(
        "NMSE hit the -inf sentinel (zero residual); running mean is the "
        "sentinel from this record on");
    st.warned_sentinel = true;
  }
  st.nmse_sum += nmse_db;
  st.nmse_count += 1;
  st.nmse_min = std::min(st.nmse_min, nmse_db);

  RunRecord rec;
  rec.era = era;
  rec.epoch = epoch;
  rec.steps = st.cum_steps;
  rec.time_s = st.elapsed_s();
  rec.batch = o.batch;
  rec.lr = o.last_lr;
  rec.loss = o.objective_sum / static_cast<double>(o.steps);
  rec.nmse_db = nmse_db;
  rec.mean_nmse_db = st.nmse_sum / static_cast<double>(st.nmse_count);
  rec.min_nmse_db = st.nmse_min;
  report.records.push_back(rec);
}

void finalize_summary(RunReport& report, LoopState& st) {
  const RunRecord& last = report.records.back();
  report.summary.last_nmse_db = last.nmse_db;
  report.summary.mean_nmse_db = last.mean_nmse_db;
  report.summary.min_nmse_db = last.min_nmse_db;
  report.summary.total_steps = st.cum_steps;
  report.summary.total_time_s = st.elapsed_s();
}

// The effective lr policy wires the era span in, so era-period cycles know
// how many epochs one era lasts.
LrPolicy effective_lr_policy(const TrainConfig& cfg) {
  LrPolicy p = cfg.lr;
  p.era_length_epochs = cfg.epochs;
  return p;
}

void maybe_eval_swa(RunReport& report, LoopState& st, const TrainConfig& cfg,
                    const DatasetPair& data,
                    std::span<const std::size_t> eval_ks) {
  if (cfg.lr.kind != LrPolicy::Kind::swa || st.swa.count == 0) return;
  ParamVector averaged;
  averaged.coeffs.resize(st.theta.count());
  std::copy(st.swa.average.begin(), st.swa.average.end(),
            averaged.reals().begin());
  report.summary.swa_nmse_db = evaluate(averaged, cfg.arch, data, eval_ks);
}

}  // namespace

TrainResult train_standard(const DatasetPair& data, const TrainConfig& cfg) {
  cfg.validate();
  if (cfg.framework != Framework::standard) {
    throw InvalidArgument("train_standard called with an online config");
  }
  data.validate();

  const std::size_t depth = cfg.arch.memory_depth();
  // The training prefix must contain at least one tick with full context.
  const StandardSplit split = split_standard(data, cfg.train_fraction, depth + 1);

  std::vector<std::size_t> train_ks =
      valid_indices(depth, 0, split.train.size());
  const std::vector<std::size_t> eval_ks = valid_indices(depth, 0, data.size());
  if (eval_ks.empty()) {
    throw InvalidArgument("signal shorter than the model memory depth");
  }

  LoopState st(cfg);
  const LrPolicy lr_policy = effective_lr_policy(cfg);
  RunReport report;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const EpochOutcome o =
        run_epoch(st, cfg, lr_policy, split.train, train_ks, 0, epoch);
    const double score = evaluate(st.theta, cfg.arch, data, eval_ks);
    append_record(report, st, 0, epoch, o, score);
  }
  finalize_summary(report, st);
  maybe_eval_swa(report, st, cfg, data, eval_ks);
  return {std::move(st.theta), std::move(report)};
}

TrainResult train_online(const DatasetPair& data, const TrainConfig& cfg) {
  cfg.validate();
  if (cfg.framework != Framework::online) {
    throw InvalidArgument("train_online called with a standard config");
  }
  data.validate();

  const SegmentPlan plan = split_segments(data, cfg.segments);
  const std::size_t depth = cfg.arch.memory_depth();

  LoopState st(cfg);
  const LrPolicy lr_policy = effective_lr_policy(cfg);
  RunReport report;
  std::vector<std::size_t> last_eval_ks;
  for (std::size_t era = 0; era < plan.era_count(); ++era) {
    if (era > 0 && cfg.reset_between_eras) st.opt->reset();

    const SegmentPlan::Range train_r = plan.train_range(era);
    std::vector<std::size_t> train_ks =
        valid_indices(depth, train_r.begin, train_r.end);
    if (train_ks.empty()) {
      throw InvalidArgument("era " + std::to_string(era) +
                            " training segment has no tick with full context");
    }

    EpochOutcome era_outcome;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      const EpochOutcome o =
          run_epoch(st, cfg, lr_policy, data, train_ks, era, epoch);
      era_outcome.objective_sum += o.objective_sum;
      era_outcome.steps += o.steps;
      era_outcome.batch = o.batch;
      era_outcome.last_lr = o.last_lr;
    }

    const SegmentPlan::Range test_r = plan.test_range(era);
    last_eval_ks = valid_indices(depth, test_r.begin, test_r.end);
    if (last_eval_ks.empty()) {
      throw InvalidArgument("era " + std::to_string(era) +
                            " evaluation segment has no tick with full context");
    }
    const double score = evaluate(st.theta, cfg.arch, data, last_eval_ks);
    append_record(report, st, era, cfg.epochs - 1, era_outcome, score);
  }
  finalize_summary(report, st);
  maybe_eval_swa(report, st, cfg, data, last_eval_ks);
  return {std::move(st.theta), std::move(report)};
}

TrainResult train(const DatasetPair& data, const TrainConfig& cfg) {
  return cfg.framework == Framework::standard ? train_standard(data, cfg)
                                              : train_online(data, cfg);
}

}  // namespace dpd
