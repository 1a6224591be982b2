#pragma once

// Utility-based network scoring and the handover decision rule with its
// stability strategies (hysteresis margin, waiting time, randomized wait).
//
//   U(x)      = 1 - exp(-alpha * x)                 per normalized criterion
//   S_n(a)    = sum_i U_i(x_i)        (0 if gated)  per objective a, in [0, k)
//   C_n       = sum_a w_a * S_n(a)                  combined score of network n
//   C_best    = max over sensed candidates of C_n
//   handover  iff C_best > C_asso + H               (H = 0 without hysteresis)

#include <cassert>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hodstat/rng.hpp"
#include "hodstat/scenario.hpp"
#include "hodstat/types.hpp"

namespace hodstat {

struct ObjectiveScore {
  std::string objective;
  double value{0.0};
  bool gated_out{false};
};

struct CombinedScore {
  ApId ap;
  double value{0.0};
  friend bool operator==(const CombinedScore&, const CombinedScore&) = default;
};

// Objective with its criterion ids resolved to indices into the criteria list.
struct ObjectiveSpec {
  std::string id;
  double weight{1.0};
  std::vector<std::size_t> criteria;
  bool gated{true};
};

// In double precision the result rounds to exactly 1.0 once alpha*x > ~37.
inline double utility(double x, double alpha) {
  assert(x >= 0.0 && alpha > 0.0);
  return -std::expm1(-alpha * x);
}

// Benefit criteria pass through; cost criteria are inverted (1/raw), capped at
// max_benefit so that a zero cost does not overflow.
inline double normalize_criterion(double raw, const DecisionCriterion& criterion, double max_benefit = 1e6) {
  if (criterion.direction == Direction::benefit) return raw;
  if (raw <= 0.0) return max_benefit;
  return std::min(1.0 / raw, max_benefit);
}

// Benefit: offered must reach the minimum. Cost: offered must not exceed the
// maximum; a zero maximum means the application sets no bound.
inline bool meets_requirement(double offered, double required, Direction direction) {
  if (direction == Direction::benefit) return offered >= required;
  return required <= 0.0 || offered <= required;
}

inline ObjectiveScore objective_score(const QosVector& offered, const QosVector& required,
                                      std::span<const DecisionCriterion> criteria, const ObjectiveSpec& objective,
                                      bool apply_gate = true, double max_benefit = 1e6) {
  if (offered.size() != criteria.size() || required.size() != criteria.size())
    throw std::invalid_argument("objective_score: QoS vectors do not match the criterion set");
  ObjectiveScore s{objective.id, 0.0, false};
  if (apply_gate && objective.gated) {
    for (std::size_t i : objective.criteria) {
      if (!meets_requirement(offered[i], required[i], criteria[i].direction)) {
        s.gated_out = true;
        return s;
      }
    }
  }
  for (std::size_t i : objective.criteria)
    s.value += utility(normalize_criterion(offered[i], criteria[i], max_benefit), criteria[i].alpha);
  return s;
}

inline double combine(std::span<const ObjectiveScore> scores, const std::map<std::string, double, std::less<>>& weights) {
  double c = 0.0;
  for (const auto& s : scores) {
    auto it = weights.find(s.objective);
    if (it == weights.end()) throw std::invalid_argument("combine: no weight for objective '" + s.objective + "'");
    c += it->second * s.value;
  }
  return c;
}

// Highest combined score; ties go to the lowest AP id.
inline std::optional<CombinedScore> best_candidate(std::span<const CombinedScore> candidates) {
  std::optional<CombinedScore> best;
  for (const auto& c : candidates)
    if (!best || c.value > best->value || (c.value == best->value && c.ap < best->ap)) best = c;
  return best;
}

// Scores networks for terminals of one scenario.
class ScoringModel {
 public:
  explicit ScoringModel(const ScenarioConfig& config)
      : criteria_(config.criteria), gate_candidates_(config.gate_candidates), max_benefit_(config.max_benefit) {
    for (const auto& o : config.objectives) {
      ObjectiveSpec spec{o.id, o.weight, {}, o.gated};
      for (const auto& id : o.criteria) {
        auto idx = criterion_index(config, id);
        if (!idx) throw std::invalid_argument("objective '" + o.id + "' names unknown criterion '" + id + "'");
        spec.criteria.push_back(*idx);
      }
      weights_[o.id] = o.weight;
      objectives_.push_back(std::move(spec));
    }
  }

  ScoringModel(std::vector<DecisionCriterion> criteria, std::vector<ObjectiveSpec> objectives,
               bool gate_candidates = true, double max_benefit = 1e6)
      : criteria_(std::move(criteria)), objectives_(std::move(objectives)),
        gate_candidates_(gate_candidates), max_benefit_(max_benefit) {
    for (const auto& o : objectives_) weights_[o.id] = o.weight;
  }

  std::vector<ObjectiveScore> objective_scores(const QosVector& offered, const QosVector& required, bool apply_gate) const {
    std::vector<ObjectiveScore> out;
    out.reserve(objectives_.size());
    for (const auto& o : objectives_)
      out.push_back(objective_score(offered, required, criteria_, o, apply_gate, max_benefit_));
    return out;
  }

  // Combined score of the network the terminal is attached to.
  double associated(const QosVector& offered, const QosVector& required) const {
    return combine(objective_scores(offered, required, true), weights_);
  }

  // Combined score of a candidate; gating follows gate_candidates.
  double candidate(const QosVector& offered, const QosVector& required) const {
    return combine(objective_scores(offered, required, gate_candidates_), weights_);
  }

  std::size_t criterion_count() const { return criteria_.size(); }
  const std::vector<DecisionCriterion>& criteria() const { return criteria_; }
  const std::vector<ObjectiveSpec>& objectives() const { return objectives_; }

 private:
  std::vector<DecisionCriterion> criteria_;
  std::vector<ObjectiveSpec> objectives_;
  std::map<std::string, double, std::less<>> weights_;
  bool gate_candidates_{true};
  double max_benefit_{1e6};
};

enum class Action { stay, handover, associate };

inline std::string_view to_string(Action a) {
  switch (a) {
    case Action::stay: return "stay";
    case Action::handover: return "handover";
    case Action::associate: return "associate";
  }
  return "stay";
}

struct StrategyState {
  StabilityStrategy strategy;
  double wait_until{0.0};  // waiting strategies: no handover before this time
};

struct Decision {
  Action action{Action::stay};
  std::optional<ApId> target;
  bool suppressed{false};  // the plain rule wanted a handover, the strategy vetoed it
  friend bool operator==(const Decision&, const Decision&) = default;
};

// Applies the decision rule of the configured strategy and, on an executed
// handover, arms the waiting window. Equal scores never trigger a handover.
inline Decision decide(double c_asso, const std::optional<CombinedScore>& best, StrategyState& state, double now,
                       Rng& rng) {
  Decision d;
  if (!best) return d;
  const auto [target, c_best] = *best;
  const bool better = c_best > c_asso;
  const auto& [kind, param] = state.strategy;

  switch (kind) {
    case StrategyKind::none:
      if (better) d = {Action::handover, target, false};
      break;
    case StrategyKind::hysteresis:
      if (c_best > c_asso + param)
        d = {Action::handover, target, false};
      else if (better)
        d.suppressed = true;
      break;
    case StrategyKind::waiting_time:
    case StrategyKind::randomized_wait:
      if (!better) break;
      if (now < state.wait_until) {
        d.suppressed = true;
        break;
      }
      d = {Action::handover, target, false};
      state.wait_until = now + (kind == StrategyKind::waiting_time ? param : uniform(rng, 0.0, param));
      break;
  }
  return d;
}

}  // namespace hodstat
