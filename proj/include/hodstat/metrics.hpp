#pragma once

// Evaluation criteria of a run (HO rate, Score rate), summary statistics, and
// parameter sweeps over a stability strategy.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "hodstat/engine.hpp"
#include "hodstat/scenario.hpp"

namespace hodstat {

struct MtMetrics {
  UserId mt;
  std::size_t handovers{0};
  double mean_score{0.0};  // mean of C_asso over the run's decision steps
};

struct RunMetrics {
  std::uint64_t seed{0};
  double ho_rate{0.0};
  double score_rate{0.0};
  std::vector<MtMetrics> per_mt;
};

// Mean number of handovers per mobile terminal.
inline double ho_rate(const EventLog& log) {
  if (log.mts.empty()) throw std::invalid_argument("ho_rate: event log has no mobile terminals");
  double sum = 0.0;
  for (const auto& m : log.mts) sum += static_cast<double>(m.handovers);
  return sum / static_cast<double>(log.mts.size());
}

inline double mean_associated_score(const MtLog& m, std::size_t steps) {
  if (m.outcomes.size() != steps)
    throw std::invalid_argument("score_rate: MT " + std::to_string(m.mt.value) + " has " +
                                std::to_string(m.outcomes.size()) + " outcomes, expected " + std::to_string(steps));
  double sum = 0.0;
  for (const auto& o : m.outcomes) sum += o.c_asso;
  return sum / static_cast<double>(steps);
}

// Mean over terminals of the per-step mean score of the associated network.
inline double score_rate(const EventLog& log) {
  if (log.mts.empty()) throw std::invalid_argument("score_rate: event log has no mobile terminals");
  if (log.nb_steps == 0) throw std::invalid_argument("score_rate: zero decision steps");
  double sum = 0.0;
  for (const auto& m : log.mts) sum += mean_associated_score(m, log.nb_steps);
  return sum / static_cast<double>(log.mts.size());
}

inline RunMetrics compute_metrics(const EventLog& log) {
  RunMetrics r;
  r.seed = log.seed;
  r.ho_rate = ho_rate(log);
  r.score_rate = score_rate(log);
  for (const auto& m : log.mts) r.per_mt.push_back({m.mt, m.handovers, mean_associated_score(m, log.nb_steps)});
  return r;
}

// ---------------------------------------------------------------------------
// statistics

struct Interval {
  double low{0.0};
  double high{0.0};
};

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Unbiased (n - 1) sample variance.
inline double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("sample_variance: need at least two samples");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

// Student-t interval for the mean: xbar +/- t_{(1+level)/2, n-1} * s / sqrt(n).
inline Interval confidence_interval(std::span<const double> xs, double level = 0.95) {
  if (xs.size() < 2) throw std::invalid_argument("confidence_interval: need at least two samples");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence_interval: level must lie in (0,1)");
  const double m = mean(xs);
  const double s = std::sqrt(sample_variance(xs));
  if (s == 0.0) return {m, m};
  const boost::math::students_t dist(static_cast<double>(xs.size() - 1));
  const double t = boost::math::quantile(dist, 0.5 + level / 2.0);
  const double half = t * s / std::sqrt(static_cast<double>(xs.size()));
  return {m - half, m + half};
}

// Ranks starting at 1; tied values share their average rank.
inline std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

// Spearman rank correlation (Pearson correlation of average ranks). NaN when
// either side is constant.
inline double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("spearman: need two equal-length samples");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double mx = mean(rx), my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

// ---------------------------------------------------------------------------
// sweeps

struct SweepRow {
  double value{0.0};
  std::vector<RunMetrics> runs;  // one per seed, in seed-list order
  double mean_ho_rate{0.0};
  std::size_t worst_ho{0};       // max over (run, MT) of the handover count
  Interval ci;                   // 95% CI of the per-MT handover count, MTs pooled over runs
  double mean_score_rate{0.0};
};

struct SweepReport {
  StrategyKind kind{StrategyKind::none};
  std::vector<std::uint64_t> seeds;
  std::vector<SweepRow> rows;  // one per swept value, in input order
};

inline ScenarioConfig with_strategy(ScenarioConfig config, StrategyKind kind, double value) {
  config.strategy = {kind, value};
  return config;
}

inline SweepRow summarize_row(double value, std::vector<RunMetrics> runs) {
  SweepRow row;
  row.value = value;
  std::vector<double> counts;
  double ho = 0.0, score = 0.0;
  for (const auto& r : runs) {
    ho += r.ho_rate;
    score += r.score_rate;
    for (const auto& m : r.per_mt) {
      counts.push_back(static_cast<double>(m.handovers));
      row.worst_ho = std::max(row.worst_ho, m.handovers);
    }
  }
  row.mean_ho_rate = ho / static_cast<double>(runs.size());
  row.mean_score_rate = score / static_cast<double>(runs.size());
  if (counts.size() >= 2) {
    row.ci = confidence_interval(counts);
  } else {
    const double m = counts.empty() ? 0.0 : counts.front();
    row.ci = {m, m};
  }
  row.runs = std::move(runs);
  return row;
}

// Runs |values| x |seeds| simulations (on up to `threads` workers; 0 = hardware
// concurrency) and aggregates per value. The result does not depend on the
// thread count.
inline SweepReport sweep(const ScenarioConfig& config, StrategyKind kind, std::span<const double> values,
                         std::span<const std::uint64_t> seeds, unsigned threads = 0) {
  if (values.empty()) throw std::invalid_argument("sweep: no parameter values");
  if (seeds.empty()) throw std::invalid_argument("sweep: no seeds");

  const std::size_t total = values.size() * seeds.size();
  std::vector<RunMetrics> results(total);
  std::vector<std::exception_ptr> errors(total);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      const std::size_t vi = job / seeds.size(), si = job % seeds.size();
      try {
        results[job] = compute_metrics(run_simulation(with_strategy(config, kind, values[vi]), seeds[si]));
      } catch (...) {
        errors[job] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  for (std::size_t job = 0; job < total; ++job) {
    if (!errors[job]) continue;
    std::ostringstream os;
    os << "sweep run failed (value=" << values[job / seeds.size()] << ", seed=" << seeds[job % seeds.size()] << "): ";
    try {
      std::rethrow_exception(errors[job]);
    } catch (const std::exception& e) {
      os << e.what();
    } catch (...) {
      os << "unknown error";
    }
    throw std::runtime_error(os.str());
  }

  SweepReport report;
  report.kind = kind;
  report.seeds.assign(seeds.begin(), seeds.end());
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    std::vector<RunMetrics> runs(results.begin() + static_cast<std::ptrdiff_t>(vi * seeds.size()),
                                 results.begin() + static_cast<std::ptrdiff_t>((vi + 1) * seeds.size()));
    report.rows.push_back(summarize_row(values[vi], std::move(runs)));
  }
  return report;
}

inline void write_sweep_csv(std::ostream& os, const SweepReport& report) {
  using detail::format_number;
  os << "value,runs,mean_ho_rate,worst_ho,ci_low,ci_high,mean_score_rate\n";
  for (const auto& r : report.rows) {
    os << format_number(r.value) << ',' << r.runs.size() << ',' << format_number(r.mean_ho_rate) << ','
       << r.worst_ho << ',' << format_number(r.ci.low) << ',' << format_number(r.ci.high) << ','
       << format_number(r.mean_score_rate) << '\n';
  }
}

// "start:stop:step" -> {start, start+step, ..., stop}. Values are rounded to
// 1e-9 so that 0.05-steps print as 0.15 rather than 0.15000000000000002.
inline std::vector<double> parse_value_grid(std::string_view spec) {
  auto fail = [&] { return std::invalid_argument("value grid must look like start:stop:step, got '" + std::string(spec) + "'"); };
  std::vector<double> parts;
  std::string s(spec);
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw fail();
    } catch (const std::invalid_argument&) {
      throw fail();
    } catch (const std::out_of_range&) {
      throw fail();
    }
  }
  if (parts.size() == 1) return {parts[0]};
  if (parts.size() != 3) throw fail();
  const double start = parts[0], stop = parts[1], step = parts[2];
  if (!(step > 0.0) || stop < start) throw fail();
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::round((start + static_cast<double>(i) * step) * 1e9) / 1e9);
  return out;
}

}  // namespace hodstat
