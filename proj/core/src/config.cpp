// Copyright 2026 the dpdbench authors.
// SPDX-License-Identifier: Apache-2.0

#include "dpd/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "dpd/report.hpp"

namespace dpd {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double parse_double(const std::string& value, std::size_t line) {
  if (value.empty()) throw ParseError("expected a number, got nothing", line);
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end != value.c_str() + value.size()) {
    throw ParseError("malformed number \"" + value + "\"", line);
  }
  if (!std::isfinite(v)) {
    throw ParseError("number \"" + value + "\" is not finite", line);
  }
  return v;
}

std::uint64_t parse_u64(const std::string& value, std::size_t line) {
  std::uint64_t v = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ParseError("malformed nonnegative integer \"" + value + "\"", line);
  }
  return v;
}

std::size_t parse_size(const std::string& value, std::size_t line) {
  return static_cast<std::size_t>(parse_u64(value, line));
}

bool parse_bool(const std::string& value, std::size_t line) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ParseError("expected true or false, got \"" + value + "\"", line);
}

std::vector<std::uint64_t> parse_u64_list(const std::string& value,
                                          std::size_t line) {
  std::vector<std::uint64_t> out;
  std::stringstream ss{value};
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_u64(trim(item), line));
  }
  if (out.empty()) throw ParseError("expected at least one integer", line);
  return out;
}

// Enum token tables; parse throws naming the admissible tokens.
template <typename E>
struct Token {
  const char* name;
  E value;
};

template <typename E, std::size_t N>
E parse_enum(const std::string& value, std::size_t line,
             const Token<E> (&tokens)[N]) {
  for (const auto& t : tokens) {
    if (value == t.name) return t.value;
  }
  std::string known;
  for (const auto& t : tokens) {
    if (!known.empty()) known += ", ";
    known += t.name;
  }
  throw ParseError("unknown value \"" + value + "\" (expected one of: " +
                       known + ")",
                   line);
}

template <typename E, std::size_t N>
const char* enum_name(E value, const Token<E> (&tokens)[N]) {
  for (const auto& t : tokens) {
    if (t.value == value) return t.name;
  }
  return "?";
}

constexpr Token<Framework> kFrameworkTokens[] = {
    {"standard", Framework::standard},
    {"online", Framework::online},
};
constexpr Token<InitMode> kInitTokens[] = {
    {"identity", InitMode::identity},
    {"random", InitMode::seeded_random},
};
constexpr Token<BatchPolicy::Kind> kBatchKindTokens[] = {
    {"fixed", BatchPolicy::Kind::fixed},
    {"linear_epoch", BatchPolicy::Kind::linear_epoch},
    {"linear_era", BatchPolicy::Kind::linear_era},
    {"exponential", BatchPolicy::Kind::exponential},
};
constexpr Token<LrPolicy::Kind> kLrKindTokens[] = {
    {"fixed", LrPolicy::Kind::fixed},
    {"linear_floored", LrPolicy::Kind::linear_floored},
    {"cyclic", LrPolicy::Kind::cyclic},
    {"swa", LrPolicy::Kind::swa},
};
constexpr Token<LrPolicy::PeriodUnit> kPeriodUnitTokens[] = {
    {"epoch", LrPolicy::PeriodUnit::epoch},
    {"era", LrPolicy::PeriodUnit::era},
};
constexpr Token<LrPolicy::CycleShape> kShapeTokens[] = {
    {"sawtooth", LrPolicy::CycleShape::sawtooth},
    {"cosine", LrPolicy::CycleShape::cosine},
};
constexpr Token<RegConfig::Center> kCenterTokens[] = {
    {"zero", RegConfig::Center::zero},
    {"prox", RegConfig::Center::prox},
};
constexpr Token<ExperimentConfig::Source> kSourceTokens[] = {
    {"generate", ExperimentConfig::Source::generate},
    {"binary", ExperimentConfig::Source::binary},
    {"csv", ExperimentConfig::Source::csv},
};

// Regularization kind carries an extra "none" token that maps to an
// absent RegConfig, so it gets its own parse path.
constexpr Token<RegConfig::Kind> kRegKindTokens[] = {
    {"l1", RegConfig::Kind::l1},
    {"l2", RegConfig::Kind::l2},
    {"elastic", RegConfig::Kind::elastic},
};

// Ensures cfg.train.reg holds a value before a reg.* field is assigned.
RegConfig& reg_of(ExperimentConfig& cfg) {
  if (!cfg.train.reg) cfg.train.reg.emplace();
  return *cfg.train.reg;
}

using Setter =
    std::function<void(ExperimentConfig&, const std::string&, std::size_t)>;

const std::map<std::string, Setter>& setter_table() {
  static const std::map<std::string, Setter> table = {
      {"framework",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.framework = parse_enum(v, l, kFrameworkTokens);
       }},
      {"epochs",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.epochs = parse_size(v, l);
       }},
      {"segments",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.segments = parse_size(v, l);
       }},
      {"train_fraction",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.train_fraction = parse_double(v, l);
       }},
      {"optimizer",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         const auto& roster = optimizer_roster();
         if (std::find(roster.begin(), roster.end(), v) == roster.end()) {
           std::string known;
           for (const auto& n : roster) {
             if (!known.empty()) known += ", ";
             known += n;
           }
           throw ParseError("unknown optimizer \"" + v +
                                "\" (expected one of: " + known + ")",
                            l);
         }
         c.train.optimizer = v;
       }},
      {"reset_between_eras",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.reset_between_eras = parse_bool(v, l);
       }},
      {"seeds",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.seeds = parse_u64_list(v, l);
       }},

      {"init.mode",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.init = parse_enum(v, l, kInitTokens);
       }},
      {"init.seed",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.init_seed = parse_u64(v, l);
       }},
      {"init.scale",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.init_scale = parse_double(v, l);
       }},

      {"model.branches",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.arch.branches = parse_size(v, l);
       }},
      {"model.pre_taps",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.arch.pre_fir_taps = parse_size(v, l);
       }},
      {"model.post_taps",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.arch.post_fir_taps = parse_size(v, l);
       }},
      {"model.max_order",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.arch.max_poly_order = parse_size(v, l);
       }},

      {"optimizer.lr",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.opt.lr = parse_double(v, l);
       }},
      {"optimizer.beta1",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.opt.beta1 = parse_double(v, l);
       }},
      {"optimizer.beta2",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.opt.beta2 = parse_double(v, l);
       }},
      {"optimizer.eps",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.opt.eps = parse_double(v, l);
       }},
      {"optimizer.rms_alpha",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.opt.rms_alpha = parse_double(v, l);
       }},
      {"optimizer.shampoo_eps",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.opt.shampoo_eps = parse_double(v, l);
       }},
      {"lookahead.k",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.opt.lookahead_k = parse_size(v, l);
       }},
      {"lookahead.alpha",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.opt.lookahead_alpha = parse_double(v, l);
       }},
      {"accmbsgd.accelerated",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.opt.accelerated = parse_bool(v, l);
       }},

      {"batch.kind",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.batch.kind = parse_enum(v, l, kBatchKindTokens);
       }},
      {"batch.base",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.batch.base = parse_size(v, l);
       }},
      {"batch.slope",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.batch.slope = parse_double(v, l);
       }},
      {"batch.growth",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.batch.growth = parse_double(v, l);
       }},

      {"lr.kind",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.lr.kind = parse_enum(v, l, kLrKindTokens);
       }},
      {"lr.max",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.lr.lr_max = parse_double(v, l);
       }},
      {"lr.min",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.lr.lr_min = parse_double(v, l);
       }},
      {"lr.slope",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.lr.slope = parse_double(v, l);
       }},
      {"lr.period_unit",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.lr.period_unit = parse_enum(v, l, kPeriodUnitTokens);
       }},
      {"lr.shape",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.lr.shape = parse_enum(v, l, kShapeTokens);
       }},
      {"swa.warmup_epochs",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.train.lr.warmup_epochs = parse_size(v, l);
       }},

      {"reg.kind",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         if (v == "none") {
           c.train.reg.reset();
           return;
         }
         reg_of(c).kind = parse_enum(v, l, kRegKindTokens);
       }},
      {"reg.lambda1",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         reg_of(c).lambda1 = parse_double(v, l);
       }},
      {"reg.lambda2",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         reg_of(c).lambda2 = parse_double(v, l);
       }},
      {"reg.center",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         reg_of(c).center = parse_enum(v, l, kCenterTokens);
       }},
      {"reg.period_epochs",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         reg_of(c).period_epochs = parse_size(v, l);
       }},

      {"dataset.source",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.source = parse_enum(v, l, kSourceTokens);
       }},
      {"dataset.ticks",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.ticks = parse_size(v, l);
       }},
      {"dataset.seed",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.dataset_seed = parse_u64(v, l);
       }},
      {"dataset.window",
       [](ExperimentConfig& c, const std::string& v, std::size_t l) {
         c.window = parse_size(v, l);
       }},
      {"dataset.input_path",
       [](ExperimentConfig& c, const std::string& v, std::size_t) {
         c.input_path = v;
       }},
      {"dataset.target_path",
       [](ExperimentConfig& c, const std::string& v, std::size_t) {
         c.target_path = v;
       }},

      {"out.dir",
       [](ExperimentConfig& c, const std::string& v, std::size_t) {
         c.out_dir = v;
       }},
  };
  return table;
}

// Post-parse invariant checks, each attributed to the most relevant line.
class InvariantChecker {
 public:
  InvariantChecker(const ExperimentConfig& cfg,
                   const std::map<std::string, std::size_t>& key_lines)
      : cfg_(cfg), key_lines_(key_lines) {}

  void fail(std::initializer_list<const char*> keys,
            const std::string& message) const {
    std::size_t line = 0;
    for (const char* key : keys) {
      const auto it = key_lines_.find(key);
      if (it != key_lines_.end()) {
        line = it->second;
        break;
      }
    }
    throw ParseError(message, line);
  }

  void run() const {
    const TrainConfig& t = cfg_.train;
    if (t.epochs == 0) fail({"epochs"}, "epochs must be >= 1");
    if (t.framework == Framework::online && t.segments < 2) {
      fail({"segments", "framework"}, "online framework needs segments >= 2");
    }
    if (!(t.train_fraction > 0.0) || !(t.train_fraction < 1.0)) {
      fail({"train_fraction"}, "train_fraction must lie strictly in (0, 1)");
    }
    try {
      t.arch.validate();
    } catch (const InvalidArgument& e) {
      fail({"model.max_order", "model.branches", "model.pre_taps",
            "model.post_taps"},
           e.what());
    }
    try {
      t.opt.validate();
    } catch (const InvalidArgument& e) {
      fail({"optimizer.lr", "optimizer.beta1", "optimizer.beta2",
            "optimizer.eps", "optimizer.rms_alpha", "optimizer.shampoo_eps",
            "lookahead.k", "lookahead.alpha"},
           e.what());
    }
    try {
      t.lr.validate();
    } catch (const InvalidArgument& e) {
      fail({"lr.min", "lr.max", "lr.kind", "lr.slope"}, e.what());
    }
    if (t.reg) {
      try {
        t.reg->validate();
      } catch (const InvalidArgument& e) {
        fail({"reg.lambda1", "reg.lambda2", "reg.period_epochs", "reg.kind"},
             e.what());
      }
    }
    if (!std::isfinite(t.init_scale) || t.init_scale < 0.0) {
      fail({"init.scale"}, "init.scale must be finite and >= 0");
    }
    if (cfg_.source == ExperimentConfig::Source::generate) {
      if (cfg_.window == 0) fail({"dataset.window"}, "dataset.window must be >= 1");
      if (cfg_.ticks < cfg_.window) {
        fail({"dataset.ticks", "dataset.window"},
             "dataset.ticks must be >= dataset.window");
      }
    } else {
      if (cfg_.input_path.empty()) {
        fail({"dataset.input_path", "dataset.source"},
             "file dataset sources need dataset.input_path");
      }
      if (cfg_.target_path.empty()) {
        fail({"dataset.target_path", "dataset.source"},
             "file dataset sources need dataset.target_path");
      }
    }
    if (cfg_.seeds.empty()) fail({"seeds"}, "at least one seed is required");
    if (cfg_.out_dir.empty()) fail({"out.dir"}, "out.dir must be nonempty");
  }

 private:
  const ExperimentConfig& cfg_;
  const std::map<std::string, std::size_t>& key_lines_;
};

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::map<std::string, std::size_t> key_lines;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

    const std::size_t hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string stripped = trim(raw);
    if (stripped.empty()) continue;

    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected key = value", line_no);
    }
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    const std::string value = trim(std::string_view(stripped).substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);

    const auto& table = setter_table();
    const auto it = table.find(key);
    if (it == table.end()) {
      throw ParseError("unknown key \"" + key + "\"", line_no);
    }
    it->second(cfg, value, line_no);
    key_lines[key] = line_no;
  }

  InvariantChecker(cfg, key_lines).run();
  return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string render_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  const TrainConfig& t = cfg.train;

  out << "framework = " << enum_name(t.framework, kFrameworkTokens) << '\n';
  out << "epochs = " << t.epochs << '\n';
  out << "segments = " << t.segments << '\n';
  out << "train_fraction = " << format_full(t.train_fraction) << '\n';
  out << "optimizer = " << t.optimizer << '\n';
  out << "reset_between_eras = " << (t.reset_between_eras ? "true" : "false")
      << '\n';
  out << "seeds = ";
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    if (i > 0) out << ',';
    out << cfg.seeds[i];
  }
  out << '\n';

  out << "init.mode = " << enum_name(t.init, kInitTokens) << '\n';
  out << "init.seed = " << t.init_seed << '\n';
  out << "init.scale = " << format_full(t.init_scale) << '\n';

  out << "model.branches = " << t.arch.branches << '\n';
  out << "model.pre_taps = " << t.arch.pre_fir_taps << '\n';
  out << "model.post_taps = " << t.arch.post_fir_taps << '\n';
  out << "model.max_order = " << t.arch.max_poly_order << '\n';

  out << "optimizer.lr = " << format_full(t.opt.lr) << '\n';
  out << "optimizer.beta1 = " << format_full(t.opt.beta1) << '\n';
  out << "optimizer.beta2 = " << format_full(t.opt.beta2) << '\n';
  out << "optimizer.eps = " << format_full(t.opt.eps) << '\n';
  out << "optimizer.rms_alpha = " << format_full(t.opt.rms_alpha) << '\n';
  out << "optimizer.shampoo_eps = " << format_full(t.opt.shampoo_eps) << '\n';
  out << "lookahead.k = " << t.opt.lookahead_k << '\n';
  out << "lookahead.alpha = " << format_full(t.opt.lookahead_alpha) << '\n';
  out << "accmbsgd.accelerated = " << (t.opt.accelerated ? "true" : "false")
      << '\n';

  out << "batch.kind = " << enum_name(t.batch.kind, kBatchKindTokens) << '\n';
  out << "batch.base = " << t.batch.base << '\n';
  out << "batch.slope = " << format_full(t.batch.slope) << '\n';
  out << "batch.growth = " << format_full(t.batch.growth) << '\n';

  out << "lr.kind = " << enum_name(t.lr.kind, kLrKindTokens) << '\n';
  out << "lr.max = " << format_full(t.lr.lr_max) << '\n';
  out << "lr.min = " << format_full(t.lr.lr_min) << '\n';
  out << "lr.slope = " << format_full(t.lr.slope) << '\n';
  out << "lr.period_unit = " << enum_name(t.lr.period_unit, kPeriodUnitTokens)
      << '\n';
  out << "lr.shape = " << enum_name(t.lr.shape, kShapeTokens) << '\n';
  out << "swa.warmup_epochs = " << t.lr.warmup_epochs << '\n';

  if (t.reg) {
    out << "reg.kind = " << enum_name(t.reg->kind, kRegKindTokens) << '\n';
    out << "reg.lambda1 = " << format_full(t.reg->lambda1) << '\n';
    out << "reg.lambda2 = " << format_full(t.reg->lambda2) << '\n';
    out << "reg.center = " << enum_name(t.reg->center, kCenterTokens) << '\n';
    out << "reg.period_epochs = " << t.reg->period_epochs << '\n';
  } else {
    out << "reg.kind = none\n";
  }

  out << "dataset.source = " << enum_name(cfg.source, kSourceTokens) << '\n';
  out << "dataset.ticks = " << cfg.ticks << '\n';
  out << "dataset.seed = " << cfg.dataset_seed << '\n';
  out << "dataset.window = " << cfg.window << '\n';
  if (!cfg.input_path.empty()) {
    out << "dataset.input_path = " << cfg.input_path << '\n';
  }
  if (!cfg.target_path.empty()) {
    out << "dataset.target_path = " << cfg.target_path << '\n';
  }
  out << "out.dir = " << cfg.out_dir << '\n';
  return out.str();
}

}  // namespace dpd
