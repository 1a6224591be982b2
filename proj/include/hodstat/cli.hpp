#pragma once

// Command implementations behind the `hodstat` executable. Argument parsing
// lives in tools/hodstat.cpp; everything here takes a parsed Command so the
// commands can be driven from tests.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hodstat/engine.hpp"
#include "hodstat/metrics.hpp"
#include "hodstat/scenario.hpp"

namespace hodstat::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kRuntimeError = 2 };

struct Command {
  std::string verb;
  std::optional<std::filesystem::path> config_path;  // built-in default world when absent
  std::filesystem::path out_dir{"."};
  std::vector<std::string> overrides;                // dot.path=value, applied in order
  std::vector<std::uint64_t> seeds;                  // empty: config rng_seed (run) or 1..10 (sweeps)
  std::optional<std::vector<std::uint64_t>> seeds_b; // compare only; must equal `seeds`
  std::vector<std::string> strategies;
  std::vector<std::string> value_specs;              // start:stop:step, one per strategy
  double retention{0.95};
  unsigned threads{0};
};

// Raised for problems the user has to fix in the invocation (exit code 1).
class UsageError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// ---------------------------------------------------------------------------
// configuration

// Sets `path` (dot separated, numeric segments index arrays) in `doc`. The
// key must already exist. The value is read as JSON when it parses, else as a
// string, so `strategy.kind=waiting_time` and `sim_time=30` both work.
inline void apply_override(nlohmann::json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("--set", "expected key=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  nlohmann::json* node = &doc;
  std::stringstream ss(path);
  std::string seg;
  while (std::getline(ss, seg, '.')) {
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        std::size_t used = 0;
        idx = std::stoul(seg, &used);
        if (used != seg.size()) throw std::invalid_argument(seg);
      } catch (const std::exception&) {
        throw UsageError(path, "expected an array index at '" + seg + "'");
      }
      if (idx >= node->size()) throw UsageError(path, "array index out of range");
      node = &(*node)[idx];
    } else if (node->is_object()) {
      if (!node->contains(seg)) throw UsageError(path, "no such configuration key");
      node = &(*node)[seg];
    } else {
      throw UsageError(path, "no such configuration key");
    }
  }
  nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  *node = std::move(value);
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError(p.string(), "cannot open configuration file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline ScenarioConfig resolve_config(const Command& cmd) {
  ScenarioConfig config = cmd.config_path ? load_scenario(read_file(*cmd.config_path)) : default_scenario();
  if (cmd.overrides.empty()) return config;
  nlohmann::json doc = to_json(config);
  for (const auto& o : cmd.overrides) apply_override(doc, o);
  return scenario_from_json(doc);
}

inline StrategyKind strategy_arg(const std::string& s) {
  auto k = parse_strategy_kind(s);
  if (!k) throw UsageError("--strategy", "expected none|hysteresis|waiting|randomized, got '" + s + "'");
  return *k;
}

inline std::string default_grid(StrategyKind k) {
  switch (k) {
    case StrategyKind::hysteresis: return "0:1:0.05";
    case StrategyKind::waiting_time:
    case StrategyKind::randomized_wait: return "0:10:0.5";
    case StrategyKind::none: return "0";
  }
  return "0";
}

inline std::vector<double> value_grid(const std::string& spec) {
  try {
    return parse_value_grid(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError("--values", e.what());
  }
}

inline std::vector<std::uint64_t> sweep_seeds(const Command& cmd) {
  if (!cmd.seeds.empty()) return cmd.seeds;
  std::vector<std::uint64_t> s;
  for (std::uint64_t i = 1; i <= 10; ++i) s.push_back(i);
  return s;
}

inline std::filesystem::path prepare_out_dir(const Command& cmd) {
  std::error_code ec;
  std::filesystem::create_directories(cmd.out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + cmd.out_dir.string() + ": " + ec.message());
  return cmd.out_dir;
}

template <typename Writer>
void write_file(const std::filesystem::path& p, Writer&& w) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  w(out);
  if (!out) throw std::runtime_error("error while writing " + p.string());
}

using detail::format_number;

inline void write_metrics_csv(std::ostream& os, const RunMetrics& m) {
  os << "scope,mt,ho,score\n";
  os << "run,," << format_number(m.ho_rate) << ',' << format_number(m.score_rate) << '\n';
  for (const auto& p : m.per_mt)
    os << "mt," << p.mt.value << ',' << p.handovers << ',' << format_number(p.mean_score) << '\n';
}

// ---------------------------------------------------------------------------
// verbs

inline int cmd_validate(const Command& cmd, std::ostream& out, std::ostream&) {
  const ScenarioConfig c = resolve_config(cmd);
  out << "valid: " << nb_steps(c) << " decision steps, " << c.aps.size() << " APs, " << c.users.size() << " users ("
      << mobile_count(c) << " mobile, ratio " << format_number(observed_mobility_ratio(c)) << ")\n";
  return kOk;
}

inline int cmd_run(const Command& cmd, std::ostream& out, std::ostream&) {
  ScenarioConfig config = resolve_config(cmd);
  const auto dir = prepare_out_dir(cmd);
  const std::vector<std::uint64_t> seeds = cmd.seeds.empty() ? std::vector<std::uint64_t>{config.rng_seed} : cmd.seeds;
  for (std::uint64_t seed : seeds) {
    const EventLog log = run_simulation(config, seed);
    const RunMetrics m = compute_metrics(log);
    const std::string tag = "_s" + std::to_string(seed) + ".csv";
    write_file(dir / ("events" + tag), [&](std::ostream& os) { write_events_csv(os, log); });
    write_file(dir / ("metrics" + tag), [&](std::ostream& os) { write_metrics_csv(os, m); });
    out << "seed " << seed << ": HO_rate=" << format_number(m.ho_rate) << " Score_rate=" << format_number(m.score_rate)
        << '\n';
  }
  return kOk;
}

struct Recommendation {
  std::optional<std::size_t> row;
  double baseline_score_rate{0.0};
};

// Row minimizing worst-case handovers among rows whose mean Score_rate stays
// within `retention` of the baseline; ties prefer the higher Score_rate, then
// the earlier row.
inline Recommendation recommend(const SweepReport& report, double baseline_score_rate, double retention) {
  Recommendation r{std::nullopt, baseline_score_rate};
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& row = report.rows[i];
    if (row.mean_score_rate < retention * baseline_score_rate) continue;
    if (!r.row) {
      r.row = i;
      continue;
    }
    const auto& best = report.rows[*r.row];
    if (row.worst_ho < best.worst_ho || (row.worst_ho == best.worst_ho && row.mean_score_rate > best.mean_score_rate))
      r.row = i;
  }
  return r;
}

// Mean Score_rate with no stability strategy, over the given seeds.
inline double baseline_score_rate(const ScenarioConfig& config, std::span<const std::uint64_t> seeds, unsigned threads) {
  const double zero = 0.0;
  return sweep(config, StrategyKind::none, std::span<const double>(&zero, 1), seeds, threads).rows.front().mean_score_rate;
}

inline int cmd_sweep(const Command& cmd, std::ostream& out, std::ostream&) {
  ScenarioConfig config = resolve_config(cmd);
  if (cmd.strategies.size() > 1) throw UsageError("--strategy", "sweep takes a single strategy");
  const StrategyKind kind = cmd.strategies.empty() ? config.strategy.kind : strategy_arg(cmd.strategies.front());
  if (kind == StrategyKind::none) throw UsageError("--strategy", "sweep needs a strategy with a parameter");
  if (cmd.value_specs.size() > 1) throw UsageError("--values", "sweep takes a single value grid");
  const auto values = value_grid(cmd.value_specs.empty() ? default_grid(kind) : cmd.value_specs.front());
  const auto seeds = sweep_seeds(cmd);
  const auto dir = prepare_out_dir(cmd);

  const SweepReport report = sweep(config, kind, values, seeds, cmd.threads);
  const double baseline = baseline_score_rate(config, seeds, cmd.threads);
  const Recommendation rec = recommend(report, baseline, cmd.retention);

  const std::string name = "sweep_" + std::string(to_string(kind));
  write_file(dir / (name + ".csv"), [&](std::ostream& os) { write_sweep_csv(os, report); });
  write_file(dir / (name + "_summary.csv"), [&](std::ostream& os) {
    os << "strategy,baseline_score_rate,retention,recommended_value,worst_ho,mean_ho_rate,mean_score_rate\n";
    os << to_string(kind) << ',' << format_number(baseline) << ',' << format_number(cmd.retention) << ',';
    if (rec.row) {
      const auto& r = report.rows[*rec.row];
      os << format_number(r.value) << ',' << r.worst_ho << ',' << format_number(r.mean_ho_rate) << ','
         << format_number(r.mean_score_rate);
    } else {
      os << ",,,";
    }
    os << '\n';
  });

  out << to_string(kind) << " sweep: " << values.size() << " values x " << seeds.size() << " seeds -> "
      << (dir / (name + ".csv")).string() << '\n';
  if (rec.row) {
    const auto& r = report.rows[*rec.row];
    out << "recommended value " << format_number(r.value) << " (worst_ho=" << r.worst_ho
        << ", mean_ho_rate=" << format_number(r.mean_ho_rate) << ", mean_score_rate=" << format_number(r.mean_score_rate)
        << ", baseline_score_rate=" << format_number(baseline) << ")\n";
  } else {
    out << "no value keeps Score_rate within " << format_number(cmd.retention) << " of baseline "
        << format_number(baseline) << '\n';
  }
  return kOk;
}

inline int cmd_compare(const Command& cmd, std::ostream& out, std::ostream&) {
  if (cmd.strategies.size() != 2) throw UsageError("--strategy", "compare needs exactly two --strategy options");
  if (cmd.value_specs.size() > 2) throw UsageError("--values", "at most one value grid per strategy");
  const auto seeds = sweep_seeds(cmd);
  if (cmd.seeds_b && *cmd.seeds_b != seeds)
    throw UsageError("--seeds-b", "seeds must match for a paired comparison");
  ScenarioConfig config = resolve_config(cmd);
  const auto dir = prepare_out_dir(cmd);

  struct Side {
    std::string label;
    StrategyKind kind;
    SweepReport report;
    Recommendation best;  // lowest mean HO_rate with retained Score_rate
  };
  const double baseline = baseline_score_rate(config, seeds, cmd.threads);
  std::vector<Side> sides;
  for (std::size_t i = 0; i < 2; ++i) {
    const StrategyKind kind = strategy_arg(cmd.strategies[i]);
    const std::string spec = i < cmd.value_specs.size() ? cmd.value_specs[i] : default_grid(kind);
    Side s{std::string(i == 0 ? "a:" : "b:") + std::string(to_string(kind)), kind,
           sweep(config, kind, value_grid(spec), seeds, cmd.threads), {std::nullopt, baseline}};
    for (std::size_t r = 0; r < s.report.rows.size(); ++r) {
      const auto& row = s.report.rows[r];
      if (row.mean_score_rate < cmd.retention * baseline) continue;
      if (!s.best.row || row.mean_ho_rate < s.report.rows[*s.best.row].mean_ho_rate) s.best.row = r;
    }
    sides.push_back(std::move(s));
  }

  write_file(dir / "compare.csv", [&](std::ostream& os) {
    const char* cols[] = {"value", "runs", "mean_ho_rate", "worst_ho", "ci_low", "ci_high", "mean_score_rate"};
    os << "row";
    for (const char* side : {"a_", "b_"})
      for (const char* c : cols) os << ',' << side << c;
    os << '\n';
    const std::size_t n = std::max(sides[0].report.rows.size(), sides[1].report.rows.size());
    for (std::size_t i = 0; i < n; ++i) {
      os << i;
      for (const auto& s : sides) {
        if (i < s.report.rows.size()) {
          const auto& r = s.report.rows[i];
          os << ',' << format_number(r.value) << ',' << r.runs.size() << ',' << format_number(r.mean_ho_rate) << ','
             << r.worst_ho << ',' << format_number(r.ci.low) << ',' << format_number(r.ci.high) << ','
             << format_number(r.mean_score_rate);
        } else {
          os << ",,,,,,,";
        }
      }
      os << '\n';
    }
  });

  std::string winner = "tie";
  const auto ho = [](const Side& s) {
    return s.best.row ? std::optional<double>(s.report.rows[*s.best.row].mean_ho_rate) : std::nullopt;
  };
  const auto ha = ho(sides[0]), hb = ho(sides[1]);
  if (ha && (!hb || *ha < *hb)) winner = sides[0].label;
  else if (hb && (!ha || *hb < *ha)) winner = sides[1].label;

  write_file(dir / "compare_summary.csv", [&](std::ostream& os) {
    os << "side,strategy,best_value,mean_ho_rate,mean_score_rate,baseline_score_rate,retention,winner\n";
    for (const auto& s : sides) {
      os << s.label.substr(0, 1) << ',' << to_string(s.kind) << ',';
      if (s.best.row) {
        const auto& r = s.report.rows[*s.best.row];
        os << format_number(r.value) << ',' << format_number(r.mean_ho_rate) << ',' << format_number(r.mean_score_rate);
      } else {
        os << ",,";
      }
      os << ',' << format_number(baseline) << ',' << format_number(cmd.retention) << ',' << winner << '\n';
    }
  });

  for (const auto& s : sides) {
    out << s.label << ": ";
    if (s.best.row) {
      const auto& r = s.report.rows[*s.best.row];
      out << "lowest mean_ho_rate " << format_number(r.mean_ho_rate) << " at value " << format_number(r.value)
          << " (mean_score_rate=" << format_number(r.mean_score_rate) << ")\n";
    } else {
      out << "no value retains Score_rate\n";
    }
  }
  out << "baseline_score_rate=" << format_number(baseline) << " retention=" << format_number(cmd.retention)
      << " winner: " << winner << '\n';
  return kOk;
}

inline int cmd_defaults(const Command& cmd, std::ostream& out, std::ostream&) {
  out << serialize(resolve_config(cmd));
  return kOk;
}

// Runs a verb, mapping failures onto exit codes with a message on `err`.
inline int dispatch(const Command& cmd, std::ostream& out, std::ostream& err) {
  try {
    if (cmd.verb == "run") return cmd_run(cmd, out, err);
    if (cmd.verb == "sweep") return cmd_sweep(cmd, out, err);
    if (cmd.verb == "compare") return cmd_compare(cmd, out, err);
    if (cmd.verb == "validate") return cmd_validate(cmd, out, err);
    if (cmd.verb == "defaults") return cmd_defaults(cmd, out, err);
    err << "error: unknown command '" << cmd.verb << "'\n";
    return kConfigError;
  } catch (const ValidationError& e) {
    for (const auto& v : e.violations()) err << "error: " << v.field << ": " << v.message << '\n';
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace hodstat::cli
