#include <map>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "hodstat/metrics.hpp"

using namespace hodstat;

namespace {

MtLog mt_with(std::uint32_t id, std::size_t handovers, std::vector<double> scores) {
  MtLog m;
  m.mt = UserId{id};
  m.handovers = handovers;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    DecisionOutcome o;
    o.mt = m.mt;
    o.time = 0.5 * static_cast<double>(i + 1);
    o.c_asso = scores[i];
    m.outcomes.push_back(o);
  }
  return m;
}

EventLog log_of(std::vector<MtLog> mts, std::size_t steps) {
  EventLog log;
  log.nb_steps = steps;
  log.decision_step = 0.5;
  log.mts = std::move(mts);
  return log;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

TEST(HoRate, MeanOfCounts) {
  EXPECT_EQ(ho_rate(log_of({mt_with(0, 4, {}), mt_with(1, 6, {})}, 0)), 5.0);
  EXPECT_EQ(ho_rate(log_of({mt_with(0, 0, {}), mt_with(1, 0, {})}, 0)), 0.0);
  EXPECT_THROW(ho_rate(log_of({}, 0)), std::invalid_argument);
}

TEST(ScoreRate, ConstantScore) {
  EXPECT_DOUBLE_EQ(score_rate(log_of({mt_with(0, 0, std::vector<double>(150, 0.5))}, 150)), 0.5);
}

TEST(ScoreRate, HalfOnHalfOff) {
  std::vector<double> s(150, 0.0);
  std::fill(s.begin(), s.begin() + 75, 1.0);
  EXPECT_DOUBLE_EQ(score_rate(log_of({mt_with(0, 0, s)}, 150)), 0.5);
}

TEST(ScoreRate, StepCountMismatchThrows) {
  EXPECT_THROW(score_rate(log_of({mt_with(0, 0, std::vector<double>(10, 0.5))}, 150)), std::invalid_argument);
  EXPECT_THROW(score_rate(log_of({}, 150)), std::invalid_argument);
}

// Recount both criteria from the CSV text alone.
TEST(RunMetricsTest, MatchesRecountFromEventsCsv) {
  auto c = default_scenario();
  c.strategy = {StrategyKind::none, 0.0};
  const auto log = run_simulation(c, 6);
  std::ostringstream os;
  write_events_csv(os, log);

  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::map<std::string, std::pair<int, std::vector<double>>> per_mt;
  while (std::getline(in, line)) {
    const auto cells = split(line);
    ASSERT_EQ(cells.size(), 8u) << line;
    auto& [ho, scores] = per_mt[cells[1]];
    if (cells[3] == "handover") ++ho;
    scores.push_back(std::stod(cells[5]));
  }
  double ho_sum = 0.0, score_sum = 0.0;
  for (const auto& [mt, v] : per_mt) {
    ho_sum += v.first;
    double s = 0.0;
    for (double x : v.second) s += x;
    score_sum += s / static_cast<double>(v.second.size());
  }
  const auto m = compute_metrics(log);
  ASSERT_EQ(per_mt.size(), 14u);
  EXPECT_GT(m.ho_rate, 0.0);
  EXPECT_DOUBLE_EQ(m.ho_rate, ho_sum / 14.0);
  EXPECT_NEAR(m.score_rate, score_sum / 14.0, 1e-12);
}

TEST(ConfidenceInterval, ZeroVariance) {
  const std::vector<double> xs(6, 3.0);
  const auto ci = confidence_interval(xs);
  EXPECT_EQ(ci.low, 3.0);
  EXPECT_EQ(ci.high, 3.0);
}

TEST(ConfidenceInterval, MatchesTTable) {
  // t_{0.975, 4} = 2.776 (table); s = sqrt(2.5); half-width = t s / sqrt(5).
  const std::vector<double> xs{1, 2, 3, 4, 5};
  const auto ci = confidence_interval(xs);
  const double half = 2.776 * std::sqrt(2.5) / std::sqrt(5.0);
  EXPECT_NEAR(ci.low, 3.0 - half, 1e-3);
  EXPECT_NEAR(ci.high, 3.0 + half, 1e-3);
  EXPECT_DOUBLE_EQ((ci.low + ci.high) / 2.0, 3.0);
}

TEST(ConfidenceInterval, TooFewSamples) {
  const std::vector<double> one{1.0};
  EXPECT_THROW(confidence_interval(one), std::invalid_argument);
  EXPECT_THROW(confidence_interval({}), std::invalid_argument);
}

TEST(ConfidenceInterval, CoverageNearNominal) {
  std::mt19937_64 rng(2010);
  std::normal_distribution<double> draw(10.0, 3.0);
  int covered = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<double> xs(20);
    for (auto& x : xs) x = draw(rng);
    const auto ci = confidence_interval(xs);
    if (ci.low <= 10.0 && 10.0 <= ci.high) ++covered;
  }
  EXPECT_GE(covered, 930);
  EXPECT_LE(covered, 970);
}

TEST(Spearman, KnownValues) {
  const std::vector<double> x{1, 2, 3, 4}, up{10, 20, 30, 40}, down{4, 3, 2, 1}, flat{1, 1, 1, 1};
  EXPECT_DOUBLE_EQ(spearman(x, up), 1.0);
  EXPECT_DOUBLE_EQ(spearman(x, down), -1.0);
  EXPECT_TRUE(std::isnan(spearman(x, flat)));
  const std::vector<double> ties{1, 1, 2, 3};
  EXPECT_EQ(average_ranks(ties), (std::vector<double>{1.5, 1.5, 3, 4}));
}

TEST(ValueGrid, HysteresisGridHasTwentyOneValues) {
  const auto v = parse_value_grid("0:1:0.05");
  ASSERT_EQ(v.size(), 21u);
  EXPECT_EQ(v.front(), 0.0);
  EXPECT_EQ(v[3], 0.15);
  EXPECT_EQ(v.back(), 1.0);
  EXPECT_EQ(parse_value_grid("0:10:0.5").size(), 21u);
  EXPECT_EQ(parse_value_grid("0.3"), std::vector<double>{0.3});
}

TEST(ValueGrid, Malformed) {
  for (const char* s : {"", "1:0:0.1", "0:1:0", "0:1", "a:b:c", "0:1:0.1:2"})
    EXPECT_THROW(parse_value_grid(s), std::invalid_argument) << s;
}

TEST(Sweep, SingletonEqualsRun) {
  const auto c = default_scenario();
  const std::vector<double> v{0.0};
  const std::vector<std::uint64_t> s{3};
  const auto report = sweep(c, StrategyKind::hysteresis, v, s);
  ASSERT_EQ(report.rows.size(), 1u);
  const auto direct = compute_metrics(run_simulation(with_strategy(c, StrategyKind::hysteresis, 0.0), 3));
  EXPECT_EQ(report.rows[0].mean_ho_rate, direct.ho_rate);
  EXPECT_EQ(report.rows[0].mean_score_rate, direct.score_rate);
  std::size_t worst = 0;
  for (const auto& m : direct.per_mt) worst = std::max(worst, m.handovers);
  EXPECT_EQ(report.rows[0].worst_ho, worst);
}

TEST(Sweep, FullGridShapeAndDeterminism) {
  const auto c = default_scenario();
  const auto v = parse_value_grid("0:1:0.05");
  std::vector<std::uint64_t> s;
  for (std::uint64_t i = 1; i <= 10; ++i) s.push_back(i);
  const auto a = sweep(c, StrategyKind::hysteresis, v, s, 1);
  const auto b = sweep(c, StrategyKind::hysteresis, v, s, 4);
  ASSERT_EQ(a.rows.size(), 21u);
  std::size_t runs = 0;
  for (const auto& r : a.rows) {
    runs += r.runs.size();
    EXPECT_GE(static_cast<double>(r.worst_ho), r.mean_ho_rate);
    EXPECT_LE(r.ci.low, r.ci.high);
  }
  EXPECT_EQ(runs, 210u);
  std::ostringstream ca, cb;
  write_sweep_csv(ca, a);
  write_sweep_csv(cb, b);
  EXPECT_EQ(ca.str(), cb.str());
  EXPECT_EQ(ca.str().substr(0, ca.str().find('\n')), "value,runs,mean_ho_rate,worst_ho,ci_low,ci_high,mean_score_rate");
}

TEST(Sweep, WaitingTimeAxis) {
  const auto c = default_scenario();
  const auto v = parse_value_grid("0:10:5");
  const std::vector<std::uint64_t> s{1, 2};
  const auto r = sweep(c, StrategyKind::waiting_time, v, s);
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_EQ(r.rows[2].value, 10.0);
  EXPECT_EQ(r.kind, StrategyKind::waiting_time);
}

TEST(Sweep, ErrorsNameValueAndSeed) {
  const auto c = default_scenario();
  const std::vector<double> v{-1.0};
  const std::vector<std::uint64_t> s{7};
  try {
    sweep(c, StrategyKind::hysteresis, v, s);
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("value=-1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("seed=7"), std::string::npos) << msg;
  }
  EXPECT_THROW(sweep(c, StrategyKind::hysteresis, {}, s), std::invalid_argument);
}
