#pragma once

// Discrete-time simulation loop. Each decision step runs, in order:
//   1. Random Way Point move for every mobile terminal; terminals that left
//      the disk of their AP lose the link and become unassociated;
//   2. AP loads and offered QoS are recomputed;
//   3. on a diffusion boundary, the knowledge plane runs one round;
//   4. every terminal scores its associated AP and its candidates and decides;
//   5. association changes are applied together (they take effect next step).
// A run is a pure function of (config, seed).

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hodstat/decision.hpp"
#include "hodstat/knowledge.hpp"
#include "hodstat/mobility.hpp"
#include "hodstat/radio.hpp"
#include "hodstat/rng.hpp"
#include "hodstat/scenario.hpp"

namespace hodstat {

struct DecisionOutcome {
  UserId mt;
  double time{0.0};
  std::optional<ApId> associated;
  double c_asso{0.0};  // 0 while unassociated or disconnected by a handover
  std::vector<CombinedScore> candidates;
  std::optional<CombinedScore> best;
  Action action{Action::stay};
  std::optional<ApId> target;
  bool suppressed{false};
  bool disconnected{false};  // switching step of a break-before-make handover
};

struct AssociationInterval {
  std::optional<ApId> ap;
  double start{0.0};
  double end{0.0};
};

struct MtLog {
  UserId mt;
  std::vector<DecisionOutcome> outcomes;
  std::vector<AssociationInterval> history;
  std::size_t handovers{0};
  std::vector<Vec2> trajectory;  // position after each step's move
};

struct EventLog {
  std::uint64_t seed{0};
  double decision_step{0.0};
  std::size_t nb_steps{0};
  std::vector<MtLog> mts;  // ascending MT id
};

namespace detail {

struct MtRuntime {
  const UserProfile* profile{nullptr};
  MobilityState mobility;
  Rng mobility_rng;
  Rng strategy_rng;
  StrategyState strategy;
  std::optional<ApId> assoc;
  std::optional<ApId> pending;
  Action pending_action{Action::stay};
  int disconnect_remaining{0};
};

// Intervals cover outcome times in (start, end].
inline void switch_association(MtLog& log, std::optional<ApId> ap, double at) {
  if (!log.history.empty() && log.history.back().start == at) {
    log.history.back().ap = ap;
    return;
  }
  if (!log.history.empty()) log.history.back().end = at;
  log.history.push_back({ap, at, at});
}

}  // namespace detail

// Runs one simulation. `model` defaults to the load-sharing QoS model.
inline EventLog run_simulation(const ScenarioConfig& config, std::uint64_t seed,
                               const QosModel* model = nullptr) {
  if (auto v = validate(config); !v.empty()) throw ValidationError(std::move(v));

  LoadSharingModel default_model(config.radio.load_response);
  const QosModel& qos_model = model != nullptr ? *model : default_model;
  const ScoringModel scoring(config);

  std::vector<ApProfile> aps = config.aps;
  std::sort(aps.begin(), aps.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::vector<const UserProfile*> users;
  for (const auto& u : config.users) users.push_back(&u);
  std::sort(users.begin(), users.end(), [](auto* a, auto* b) { return a->id < b->id; });

  const double dt = config.decision_step;
  const std::size_t steps = nb_steps(config);
  const auto diffusion_every =
      static_cast<std::size_t>(std::max<long long>(1, std::llround(config.diffusion_period / dt)));

  auto ap_index = [&](ApId id) {
    auto it = std::lower_bound(aps.begin(), aps.end(), id, [](const ApProfile& a, ApId v) { return a.id < v; });
    return static_cast<std::size_t>(it - aps.begin());
  };

  // Association of every user (stationary users never move or re-decide).
  std::vector<std::optional<ApId>> assoc(users.size());
  auto loads = [&] {
    std::vector<std::size_t> n(aps.size(), 0);
    for (const auto& a : assoc)
      if (a) ++n[ap_index(*a)];
    return n;
  };
  auto offered = [&](std::size_t ap_i, std::size_t load) {
    return ap_qos(aps[ap_i], ApLoadState{aps[ap_i].id, load}, qos_model);
  };

  // Initial association: in id order, best sensed AP given the load so far.
  {
    std::vector<std::size_t> n(aps.size(), 0);
    for (std::size_t u = 0; u < users.size(); ++u) {
      std::vector<CombinedScore> scores;
      for (ApId id : sensed_aps(users[u]->initial_position, aps)) {
        const std::size_t i = ap_index(id);
        scores.push_back({id, scoring.candidate(offered(i, n[i]), users[u]->app_requirements)});
      }
      if (auto best = best_candidate(scores)) {
        assoc[u] = best->ap;
        ++n[ap_index(best->ap)];
      }
    }
  }

  std::vector<Rng> jitter_rng;
  for (const auto& ap : aps) jitter_rng.push_back(make_stream(seed, StreamTag::jitter, ap.id.value));

  std::vector<ApAgent> agents;
  for (const auto& ap : aps) agents.push_back({ap.id, ap.wired_neighbors, {}, KnowledgeBase{ap.id}});

  auto measure = [&](bool with_jitter) {
    const auto n = loads();
    for (std::size_t i = 0; i < aps.size(); ++i) {
      QosVector q = offered(i, n[i]);
      if (with_jitter) q = apply_jitter(std::move(q), config.radio.jitter_sigma, jitter_rng[i]);
      agents[i].measured = std::move(q);
    }
  };

  EventLog log;
  log.seed = seed;
  log.decision_step = dt;
  log.nb_steps = steps;

  std::vector<std::size_t> mt_user;  // index into users for each MT
  std::vector<detail::MtRuntime> mts;
  std::map<UserId, KnowledgeBase> mt_bases;
  for (std::size_t u = 0; u < users.size(); ++u) {
    if (!users[u]->mobile) continue;
    detail::MtRuntime rt;
    rt.profile = users[u];
    rt.mobility_rng = make_stream(seed, StreamTag::mobility, users[u]->id.value);
    rt.strategy_rng = make_stream(seed, StreamTag::strategy, users[u]->id.value);
    rt.mobility = init_mobility(*users[u], config.area, rt.mobility_rng);
    rt.strategy = StrategyState{config.strategy, 0.0};
    rt.assoc = assoc[u];
    mts.push_back(std::move(rt));
    mt_user.push_back(u);
    mt_bases.emplace(users[u]->id, KnowledgeBase{users[u]->id});

    MtLog ml;
    ml.mt = users[u]->id;
    ml.outcomes.reserve(steps);
    ml.trajectory.reserve(steps);
    detail::switch_association(ml, assoc[u], 0.0);
    log.mts.push_back(std::move(ml));
  }

  auto associations = [&] {
    std::map<UserId, ApId> m;
    for (const auto& rt : mts)
      if (rt.assoc) m.emplace(rt.profile->id, *rt.assoc);
    return m;
  };

  measure(false);
  {
    auto a = associations();
    diffuse(agents, mt_bases, a, 0.0);
  }

  for (std::size_t step = 0; step < steps; ++step) {
    const double now = static_cast<double>(step + 1) * dt;

    // 1. mobility and link loss
    for (std::size_t m = 0; m < mts.size(); ++m) {
      auto& rt = mts[m];
      rt.mobility = step_mobility(rt.mobility, dt, config.area, *rt.profile, rt.mobility_rng);
      log.mts[m].trajectory.push_back(rt.mobility.position);
      if (rt.assoc) {
        const auto& ap = aps[ap_index(*rt.assoc)];
        if (distance(rt.mobility.position, ap.position) > ap.coverage_radius) {
          rt.assoc.reset();
          rt.disconnect_remaining = 0;
          assoc[mt_user[m]].reset();
          mt_bases[rt.profile->id].clear();
          detail::switch_association(log.mts[m], std::nullopt, now - dt);
        }
      }
    }

    // 2. loads and offered QoS
    measure(true);

    // 3. knowledge diffusion
    if ((step + 1) % diffusion_every == 0) {
      auto a = associations();
      diffuse(agents, mt_bases, a, now);
    }

    // 4. decisions on a frozen snapshot
    for (std::size_t m = 0; m < mts.size(); ++m) {
      auto& rt = mts[m];
      const auto& req = rt.profile->app_requirements;
      DecisionOutcome out;
      out.mt = rt.profile->id;
      out.time = now;
      out.associated = rt.assoc;

      if (rt.disconnect_remaining > 0) {
        --rt.disconnect_remaining;
        out.disconnected = true;
      } else if (!rt.assoc) {
        for (ApId id : sensed_aps(rt.mobility.position, aps)) {
          const auto* self = agents[ap_index(id)].base.find(id);
          if (self != nullptr && scoring.associated(self->qos, req) > 0.0) {
            out.action = Action::associate;
            out.target = id;
            break;
          }
        }
      } else {
        const KnowledgeBase& base = mt_bases[rt.profile->id];
        if (const auto* own = base.find(*rt.assoc)) out.c_asso = scoring.associated(own->qos, req);
        const auto sensed = sensed_aps(rt.mobility.position, aps);
        for (const auto& c : candidate_view(base, sensed, rt.assoc, now))
          out.candidates.push_back({c.ap, scoring.candidate(c.qos, req)});
        out.best = best_candidate(out.candidates);
        const Decision d = decide(out.c_asso, out.best, rt.strategy, now, rt.strategy_rng);
        out.action = d.action;
        out.target = d.target;
        out.suppressed = d.suppressed;
      }

      if (out.action != Action::stay) {
        rt.pending = out.target;
        rt.pending_action = out.action;
      }
      if (out.action == Action::handover) ++log.mts[m].handovers;
      log.mts[m].outcomes.push_back(std::move(out));
    }

    // 5. apply association changes
    for (std::size_t m = 0; m < mts.size(); ++m) {
      auto& rt = mts[m];
      if (!rt.pending) continue;
      rt.assoc = rt.pending;
      assoc[mt_user[m]] = rt.pending;
      if (rt.pending_action == Action::handover) rt.disconnect_remaining = config.handover_cost_steps;
      detail::switch_association(log.mts[m], rt.pending, now);
      rt.pending.reset();
      rt.pending_action = Action::stay;
    }
  }

  for (auto& ml : log.mts)
    if (!ml.history.empty()) ml.history.back().end = static_cast<double>(steps) * dt;
  return log;
}

// ---------------------------------------------------------------------------
// CSV form: one row per MT per step, rows ordered by (step, mt).

inline constexpr int kEventsCsvVersion = 1;

namespace detail {

inline std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace detail

inline void write_events_csv(std::ostream& os, const EventLog& log) {
  os << "# hodstat events v" << kEventsCsvVersion << " seed=" << log.seed << "\n";
  os << "time,mt,associated_ap,action,target_ap,c_asso,c_best,suppressed\n";
  for (std::size_t step = 0; step < log.nb_steps; ++step) {
    for (const auto& ml : log.mts) {
      if (step >= ml.outcomes.size()) continue;
      const auto& o = ml.outcomes[step];
      os << detail::format_number(o.time) << ',' << o.mt.value << ',';
      if (o.associated) os << o.associated->value;
      os << ',' << to_string(o.action) << ',';
      if (o.target) os << o.target->value;
      os << ',' << detail::format_number(o.c_asso) << ',';
      if (o.best) os << detail::format_number(o.best->value);
      os << ',' << (o.suppressed ? 1 : 0) << '\n';
    }
  }
}

}  // namespace hodstat
