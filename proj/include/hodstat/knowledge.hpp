#pragma once

// Knowledge plane. AP agents periodically push their own measurement to their
// one-hop wired neighbours and their whole knowledge base to the terminal
// agents associated with them. Terminals therefore learn about unassociated
// APs only through the AP they are attached to.

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "hodstat/types.hpp"

namespace hodstat {

struct KnowledgeRecord {
  ApId ap;
  QosVector qos;
  double timestamp{0.0};  // simulated time of the measurement
  friend bool operator==(const KnowledgeRecord&, const KnowledgeRecord&) = default;
};

using AgentId = std::variant<ApId, UserId>;

class KnowledgeBase {
 public:
  KnowledgeBase() = default;
  explicit KnowledgeBase(AgentId owner) : owner_(owner) {}

  const AgentId& owner() const { return owner_; }
  const std::map<ApId, KnowledgeRecord>& records() const { return records_; }

  const KnowledgeRecord* find(ApId ap) const {
    auto it = records_.find(ap);
    return it == records_.end() ? nullptr : &it->second;
  }

  // Latest measurement wins; an older record never replaces a newer one.
  bool merge(const KnowledgeRecord& r) {
    auto [it, inserted] = records_.try_emplace(r.ap, r);
    if (inserted) return true;
    if (r.timestamp > it->second.timestamp) {
      it->second = r;
      return true;
    }
    return false;
  }

  // Replaces the content with another base's records, keeping the owner.
  void assign_records(const KnowledgeBase& other) { records_ = other.records_; }
  void clear() { records_.clear(); }
  bool empty() const { return records_.empty(); }

  friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;

 private:
  AgentId owner_{ApId{}};
  std::map<ApId, KnowledgeRecord> records_;
};

struct ApAgent {
  ApId id;
  std::vector<ApId> wired_neighbors;
  QosVector measured;  // what the AP offers right now
  KnowledgeBase base;
};

// One synchronous diffusion round at time `now`:
//  1. every AP refreshes its own record (timestamp = now);
//  2. every AP receives each wired neighbour's own record as it stood before
//     this round (one hop, no relaying of third-party records);
//  3. every associated terminal's base becomes a copy of its AP's base;
//     terminals absent from `associations` end up with an empty base.
// `ap_agents` must be sorted by id.
inline void diffuse(std::span<ApAgent> ap_agents, std::map<UserId, KnowledgeBase>& mt_bases,
                    const std::map<UserId, ApId>& associations, double now) {
  auto by_id = [&](ApId id) -> ApAgent* {
    auto it = std::lower_bound(ap_agents.begin(), ap_agents.end(), id,
                               [](const ApAgent& a, ApId v) { return a.id < v; });
    return (it != ap_agents.end() && it->id == id) ? &*it : nullptr;
  };

  // Snapshot of each AP's own record before the round.
  std::map<ApId, KnowledgeRecord> previous_self;
  for (const auto& agent : ap_agents)
    if (const auto* r = agent.base.find(agent.id)) previous_self.emplace(agent.id, *r);

  for (auto& agent : ap_agents) {
    agent.base.merge({agent.id, agent.measured, now});
    for (ApId n : agent.wired_neighbors) {
      auto it = previous_self.find(n);
      if (it != previous_self.end()) agent.base.merge(it->second);
    }
  }

  for (auto& [mt, base] : mt_bases) {
    auto assoc = associations.find(mt);
    const ApAgent* ap = assoc == associations.end() ? nullptr : by_id(assoc->second);
    if (ap == nullptr)
      base.clear();
    else
      base.assign_records(ap->base);
  }
}

struct CandidateInfo {
  ApId ap;
  QosVector qos;
  double age{0.0};
};

// Sensed APs that the terminal holds a record for, minus its associated AP,
// ordered by AP id.
inline std::vector<CandidateInfo> candidate_view(const KnowledgeBase& mt_base, std::span<const ApId> sensed,
                                                 std::optional<ApId> associated, double now) {
  std::vector<CandidateInfo> out;
  for (ApId ap : sensed) {
    if (associated && ap == *associated) continue;
    if (const auto* r = mt_base.find(ap)) out.push_back({ap, r->qos, now - r->timestamp});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.ap < b.ap; });
  return out;
}

}  // namespace hodstat
