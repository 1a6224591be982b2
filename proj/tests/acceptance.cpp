// Acceptance gate: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "hodstat/cli.hpp"
#include "hodstat/hodstat.hpp"
#include "oracle.hpp"

using namespace hodstat;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass{false};
  std::string detail;
};

std::string events_csv(const EventLog& log) {
  std::ostringstream os;
  write_events_csv(os, log);
  return os.str();
}

std::vector<std::uint64_t> seeds_1_to_10() {
  std::vector<std::uint64_t> s;
  for (std::uint64_t i = 1; i <= 10; ++i) s.push_back(i);
  return s;
}

double per_mt_variance(const RunMetrics& m) {
  std::vector<double> c;
  for (const auto& p : m.per_mt) c.push_back(static_cast<double>(p.handovers));
  return sample_variance(c);
}

// 1. Two `run` invocations write byte-identical event CSVs, each under 5 s.
Verdict determinism() {
  const fs::path dir = fs::temp_directory_path() / "hodstat_acceptance_run";
  fs::remove_all(dir);
  std::ostringstream out, err;
  double worst = 0.0;
  for (const char* pass : {"a", "b"}) {
    cli::Command cmd;
    cmd.verb = "run";
    cmd.out_dir = dir / pass;
    cmd.seeds = {1};
    const auto t0 = Clock::now();
    if (cli::dispatch(cmd, out, err) != cli::kOk) return {false, "run failed: " + err.str()};
    worst = std::max(worst, seconds_since(t0));
  }
  const bool same = cli::read_file(dir / "a" / "events_s1.csv") == cli::read_file(dir / "b" / "events_s1.csv");
  fs::remove_all(dir);
  std::ostringstream d;
  d << "identical=" << (same ? "yes" : "no") << ", slowest run " << worst << " s (limit 5 s)";
  return {same && worst < 5.0, d.str()};
}

// 2. Scoring + selection + decision against the brute-force evaluator.
Verdict equation_fidelity() {
  std::mt19937_64 gen(20100);
  const double grid[] = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 11.0, 54.0};
  std::uniform_int_distribution<int> pick(0, 7), upto3(1, 3), upto4(0, 4), coin(0, 1);
  std::uniform_real_distribution<double> alpha(0.01, 4.0);
  const double margins[] = {0.0, 0.05, 0.25, 0.45, 0.5, 1.0};
  const int n = 20000;
  int mismatches = 0;
  double max_diff = 0.0;
  for (int t = 0; t < n; ++t) {
    oracle::Instance in;
    std::vector<DecisionCriterion> crit;
    const int k = upto3(gen);
    for (int i = 0; i < k; ++i) {
      const bool cost = coin(gen) == 1;
      const double a = alpha(gen);
      in.criteria.push_back({cost, a});
      crit.push_back({"c" + std::to_string(i), cost ? Direction::cost : Direction::benefit, a});
      in.required.push_back(coin(gen) ? 0.0 : grid[pick(gen)]);
    }
    const int q = upto3(gen);
    std::vector<double> w(q);
    double sum = 0.0;
    for (auto& x : w) sum += (x = alpha(gen));
    std::vector<ObjectiveSpec> objs;
    for (int o = 0; o < q; ++o) {
      oracle::Objective oo{w[o] / sum, {}};
      ObjectiveSpec os{"o" + std::to_string(o), w[o] / sum, {}, true};
      for (int i = 0; i < k; ++i)
        if (i == o % k || coin(gen)) {
          oo.criteria.push_back(i);
          os.criteria.push_back(static_cast<std::size_t>(i));
        }
      in.objectives.push_back(oo);
      objs.push_back(os);
    }
    auto qos = [&] {
      std::vector<double> v;
      for (int i = 0; i < k; ++i) v.push_back(grid[pick(gen)]);
      return v;
    };
    in.associated = qos();
    const int m = upto4(gen);
    for (int j = 0; j < m; ++j) in.candidates.push_back(qos());
    in.margin = margins[gen() % 6];
    const auto ref = oracle::evaluate(in);

    const ScoringModel model(crit, objs);
    const QosVector req(in.required);
    const double c_asso = model.associated(QosVector(in.associated), req);
    std::vector<CombinedScore> cands;
    for (int j = 0; j < m; ++j)
      cands.push_back({ApId{static_cast<std::uint32_t>(j + 1)}, model.candidate(QosVector(in.candidates[j]), req)});
    const auto best = best_candidate(cands);
    StrategyState st{{in.margin == 0.0 && coin(gen) ? StrategyKind::none : StrategyKind::hysteresis, in.margin}, 0.0};
    Rng rng(0);
    const auto d = decide(c_asso, best, st, 0.0, rng);

    bool ok = best.has_value() == (ref.best >= 0);
    max_diff = std::max(max_diff, std::abs(c_asso - ref.c_asso));
    for (int j = 0; j < m; ++j) max_diff = std::max(max_diff, std::abs(cands[j].value - ref.c_candidates[j]));
    if (best && best->ap.value != static_cast<std::uint32_t>(ref.best + 1)) ok = false;
    if ((d.action == Action::handover) != ref.handover) ok = false;
    if (d.action == Action::handover && d.target->value != static_cast<std::uint32_t>(ref.best + 1)) ok = false;
    if (!ok) ++mismatches;
  }
  std::ostringstream os;
  os << n << " instances, " << mismatches << " action/target mismatches, max score diff " << max_diff;
  return {mismatches == 0 && max_diff < 1e-12, os.str()};
}

// 3. Default scenario: 75 s / 0.5 s = 150 outcomes for every MT.
Verdict step_count() {
  const auto log = run_simulation(default_scenario(), 1);
  std::size_t bad = 0;
  for (const auto& m : log.mts) bad += m.outcomes.size() != 150;
  std::ostringstream os;
  os << log.mts.size() << " MTs, nb_steps=" << log.nb_steps << ", MTs without 150 outcomes: " << bad;
  return {bad == 0 && log.nb_steps == 150 && log.mts.size() == 14, os.str()};
}

// 4. H=0, T=0 and T_max=0 reproduce the no-strategy run exactly.
Verdict baseline_equivalence() {
  const auto config = default_scenario();
  const auto seeds = seeds_1_to_10();
  std::size_t differing = 0;
  for (auto seed : seeds) {
    const auto base = events_csv(run_simulation(with_strategy(config, StrategyKind::none, 0.0), seed));
    for (auto k : {StrategyKind::hysteresis, StrategyKind::waiting_time, StrategyKind::randomized_wait})
      differing += events_csv(run_simulation(with_strategy(config, k, 0.0), seed)) != base;
  }
  const std::vector<double> zero{0.0};
  std::ostringstream none_csv;
  write_sweep_csv(none_csv, sweep(config, StrategyKind::none, zero, seeds));
  std::size_t rows_differing = 0;
  for (auto k : {StrategyKind::hysteresis, StrategyKind::waiting_time, StrategyKind::randomized_wait}) {
    std::ostringstream csv;
    write_sweep_csv(csv, sweep(config, k, zero, seeds));
    rows_differing += csv.str() != none_csv.str();
  }
  std::ostringstream os;
  os << "event logs differing from baseline: " << differing << "/30, sweep rows differing: " << rows_differing << "/3";
  return {differing == 0 && rows_differing == 0, os.str()};
}

// 5. Hysteresis sweep trends on 21 values x 10 seeds.
Verdict trends(const SweepReport& rep) {
  std::vector<double> h, worst, score;
  for (const auto& r : rep.rows) {
    h.push_back(r.value);
    worst.push_back(static_cast<double>(r.worst_ho));
    score.push_back(r.mean_score_rate);
  }
  const double rho_worst = spearman(h, worst), rho_score = spearman(h, score);
  const auto& zero = rep.rows.front();
  const SweepRow* found = nullptr;
  for (std::size_t i = 1; i < rep.rows.size() && found == nullptr; ++i) {
    const auto& r = rep.rows[i];
    if (r.value > 0.0 && static_cast<double>(r.worst_ho) <= 0.5 * static_cast<double>(zero.worst_ho) &&
        r.mean_score_rate >= 0.9 * zero.mean_score_rate)
      found = &r;
  }
  const bool a = rho_worst <= -0.8, b = rho_score <= -0.5, c = found != nullptr;
  std::ostringstream os;
  os << "(a) rho(H, worst HO)=" << rho_worst << (a ? " ok" : " FAIL") << "; (b) rho(H, Score_rate)=" << rho_score
     << (b ? " ok" : " FAIL") << "; (c) ";
  if (c)
    os << "H=" << found->value << " cuts worst HO " << zero.worst_ho << " -> " << found->worst_ho << ", Score_rate "
       << zero.mean_score_rate << " -> " << found->mean_score_rate;
  else
    os << "no H halves worst HO while keeping 90% Score_rate FAIL";
  return {a && b && c, os.str()};
}

// 6. Per seed: take the nonzero H and nonzero T whose HO_rate is closest to
// half the seed's no-strategy HO_rate; waiting time should spread handovers
// across MTs more unevenly (higher per-MT variance).
Verdict strategy_comparison(const SweepReport& hyst, const SweepReport& wait) {
  int wins = 0;
  std::ostringstream os;
  for (std::size_t si = 0; si < hyst.seeds.size(); ++si) {
    const double target = 0.5 * hyst.rows.front().runs[si].ho_rate;
    auto closest = [&](const SweepReport& r) {
      std::size_t best = 1;
      for (std::size_t i = 1; i < r.rows.size(); ++i)
        if (std::abs(r.rows[i].runs[si].ho_rate - target) < std::abs(r.rows[best].runs[si].ho_rate - target)) best = i;
      return best;
    };
    const std::size_t ih = closest(hyst), iw = closest(wait);
    const double vh = per_mt_variance(hyst.rows[ih].runs[si]), vw = per_mt_variance(wait.rows[iw].runs[si]);
    const bool win = vh > 0.0 ? vw / vh > 1.0 : vw > 0.0;
    wins += win;
    os << (si ? " " : "") << "s" << hyst.seeds[si] << ":" << (win ? "+" : "-");
  }
  std::ostringstream d;
  d << "variance ratio > 1 in " << wins << "/10 seeds (need 7) [" << os.str() << "]";
  return {wins >= 7, d.str()};
}

// 7. Property suites, >= 1000 cases each, all within 60 s.
Verdict properties() {
  const auto t0 = Clock::now();
  std::vector<std::string> failed;
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const int cases = 1000;

  // utility: strictly increasing within [0, 1) where doubles resolve it
  // (a*x <= 25); beyond that it saturates to 1.0, so non-decreasing and <= 1
  bool ok = true;
  for (int i = 0; i < cases; ++i) {
    const double a = 0.01 + 5.0 * u01(gen), x = 25.0 * u01(gen) / a;
    const double y = std::min(x + (1e-3 + 10.0 * u01(gen)) / a, 25.0 / a);
    if (y > x) ok = ok && utility(x, a) >= 0.0 && utility(x, a) < utility(y, a) && utility(y, a) < 1.0;
    const double far = x + 1000.0 * u01(gen) / a;
    ok = ok && utility(x, a) <= utility(far, a) && utility(far, a) <= 1.0;
  }
  if (!ok) failed.push_back("utility");

  // gating: an unmet requirement zeroes the objective score
  ok = true;
  const std::vector<DecisionCriterion> crit{{"bw", Direction::benefit, 0.5}, {"delay", Direction::cost, 1.0}};
  const ObjectiveSpec obj{"app", 1.0, {0, 1}, true};
  for (int i = 0; i < cases; ++i) {
    const QosVector offered{50.0 * u01(gen), 0.1 + 50.0 * u01(gen)};
    const QosVector required{50.0 * u01(gen), 0.1 + 50.0 * u01(gen)};
    const bool meets = offered[0] >= required[0] && offered[1] <= required[1];
    const auto s = objective_score(offered, required, crit, obj);
    ok = ok && (meets ? s.value > 0.0 : s.value == 0.0);
  }
  if (!ok) failed.push_back("gating");

  // hysteresis monotonicity: handover at H2 implies handover at every H1 <= H2
  ok = true;
  Rng rng(1);
  for (int i = 0; i < cases; ++i) {
    const double c = 3.0 * u01(gen), b = 3.0 * u01(gen), h1 = 2.0 * u01(gen), h2 = h1 + 2.0 * u01(gen);
    StrategyState s1{{StrategyKind::hysteresis, h1}, 0.0}, s2{{StrategyKind::hysteresis, h2}, 0.0};
    const bool ho1 = decide(c, CombinedScore{ApId{1}, b}, s1, 0.0, rng).action == Action::handover;
    const bool ho2 = decide(c, CombinedScore{ApId{1}, b}, s2, 0.0, rng).action == Action::handover;
    ok = ok && (!ho2 || ho1);
  }
  if (!ok) failed.push_back("hysteresis monotonicity");

  // knowledge staleness: one-hop records in an MT base are <= 2 periods old
  ok = true;
  const double period = 0.5;
  for (int i = 0; i < cases; ++i) {
    const std::uint32_t n = 2 + static_cast<std::uint32_t>(gen() % 6);
    std::vector<ApAgent> aps;
    for (std::uint32_t a = 0; a < n; ++a) aps.push_back({ApId{a}, {}, QosVector{0.0}, KnowledgeBase{ApId{a}}});
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = a + 1; b < n; ++b)
        if (gen() % 2) {
          aps[a].wired_neighbors.push_back(ApId{b});
          aps[b].wired_neighbors.push_back(ApId{a});
        }
    std::map<UserId, KnowledgeBase> mts{{UserId{0}, KnowledgeBase{UserId{0}}}};
    for (int round = 0; round < 8; ++round) {
      const double now = round * period;
      for (auto& a : aps) a.measured = QosVector{u01(gen)};
      const ApId at{static_cast<std::uint32_t>(gen() % n)};
      diffuse(aps, mts, {{UserId{0}, at}}, now);
      if (round == 0) continue;
      for (ApId nb : aps[at.value].wired_neighbors) {
        const auto* r = mts.at(UserId{0}).find(nb);
        ok = ok && r != nullptr && now - r->timestamp <= 2 * period + 1e-12;
      }
    }
  }
  if (!ok) failed.push_back("knowledge staleness");

  // mobility: in bounds, displacement <= speed * dt
  ok = true;
  for (int i = 0; i < cases; ++i) {
    const Area area{10.0 + 290.0 * u01(gen), 10.0 + 290.0 * u01(gen)};
    UserProfile u;
    u.mobile = true;
    u.initial_position = {area.width * u01(gen), area.height * u01(gen)};
    const double v = 0.1 + 3.0 * u01(gen);
    u.speed = {v, v + u01(gen)};
    u.pause = {0.0, 3.0 * u01(gen)};
    Rng r(static_cast<std::uint64_t>(i));
    auto s = init_mobility(u, area, r);
    const double dt = 0.05 + 2.0 * u01(gen);
    for (int k = 0; k < 100; ++k) {
      const auto next = step_mobility(s, dt, area, u, r);
      ok = ok && area.contains(next.position) && distance(s.position, next.position) <= u.speed.max * dt + 1e-9;
      s = next;
    }
  }
  if (!ok) failed.push_back("mobility bounds");

  // waypoint uniformity: chi-square over 4x4 cells, 10^4 waypoints, alpha 0.01
  Rng wr(4242);
  const Area area{200.0, 200.0};
  int cells[16] = {};
  for (int i = 0; i < 10000; ++i) {
    const Vec2 w = random_waypoint(area, wr);
    ++cells[std::min(3, static_cast<int>(w.y / 50.0)) * 4 + std::min(3, static_cast<int>(w.x / 50.0))];
  }
  double chi2 = 0.0;
  for (int c : cells) chi2 += (c - 625.0) * (c - 625.0) / 625.0;
  const double critical = boost::math::quantile(boost::math::complement(boost::math::chi_squared(15.0), 0.01));
  if (!(chi2 < critical)) failed.push_back("waypoint uniformity");

  const double elapsed = seconds_since(t0);
  std::ostringstream os;
  os << "6 suites x >=" << cases << " cases in " << elapsed << " s (limit 60 s), chi2=" << chi2 << " < " << critical;
  for (const auto& f : failed) os << "; failed: " << f;
  return {failed.empty() && elapsed < 60.0, os.str()};
}

// 8. Empirical coverage of the 95% Student-t interval.
Verdict ci_coverage() {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> draw(5.0, 2.0);
  const int reps = 1000;
  int covered = 0;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> xs(10);
    for (auto& x : xs) x = draw(gen);
    const auto ci = confidence_interval(xs);
    covered += ci.low <= 5.0 && 5.0 <= ci.high;
  }
  const double rate = static_cast<double>(covered) / reps;
  std::ostringstream os;
  os << "coverage " << 100.0 * rate << "% over " << reps << " samples of n=10 (need 94-96%)";
  return {rate >= 0.94 && rate <= 0.96, os.str()};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const Verdict& v) {
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << id << " " << name << ": " << v.detail << std::endl;
    failures += !v.pass;
  };
  auto guarded = [](const std::function<Verdict()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      return Verdict{false, std::string("exception: ") + e.what()};
    }
  };

  report(1, "determinism", guarded(determinism));
  report(2, "equation fidelity", guarded(equation_fidelity));
  report(3, "step count", guarded(step_count));
  report(4, "baseline equivalence", guarded(baseline_equivalence));

  const auto config = default_scenario();
  const auto seeds = seeds_1_to_10();
  std::optional<SweepReport> hyst, wait;
  try {
    hyst = sweep(config, StrategyKind::hysteresis, parse_value_grid("0:1:0.05"), seeds);
    wait = sweep(config, StrategyKind::waiting_time, parse_value_grid("0:10:0.5"), seeds);
  } catch (const std::exception& e) {
    std::cout << "sweep error: " << e.what() << std::endl;
  }
  report(5, "hysteresis trends", hyst ? guarded([&] { return trends(*hyst); }) : Verdict{false, "sweep failed"});
  report(6, "strategy comparison",
         hyst && wait ? guarded([&] { return strategy_comparison(*hyst, *wait); }) : Verdict{false, "sweep failed"});
  report(7, "property suites", guarded(properties));
  report(8, "confidence interval coverage", guarded(ci_coverage));
  return failures == 0 ? 0 : 1;
}
