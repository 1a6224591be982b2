#pragma once

// Synthetic radio layer: disk coverage and load-dependent QoS. No propagation
// physics; APs differ only through their base QoS and how many users they serve.

#include <algorithm>
#include <cstddef>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "hodstat/rng.hpp"
#include "hodstat/scenario.hpp"
#include "hodstat/types.hpp"

namespace hodstat {

struct ApLoadState {
  ApId ap;
  std::size_t associated_user_count{0};
};

// APs whose coverage disk contains `position`, in ascending id order.
inline std::vector<ApId> sensed_aps(Vec2 position, std::span<const ApProfile> aps) {
  std::vector<ApId> out;
  for (const auto& ap : aps)
    if (distance(position, ap.position) <= ap.coverage_radius) out.push_back(ap.id);
  std::sort(out.begin(), out.end());
  return out;
}

// Maps an AP and its current load to the QoS vector it offers.
class QosModel {
 public:
  virtual ~QosModel() = default;
  virtual QosVector offered(const ApProfile& ap, const ApLoadState& load) const = 0;
};

// Default model. Per criterion:
//   share: base / max(1, n)   (bandwidth split among associated users)
//   grow:  base * (1 + n)     (queueing delay grows with load)
//   fixed: base
class LoadSharingModel final : public QosModel {
 public:
  explicit LoadSharingModel(std::vector<LoadResponse> responses) : responses_(std::move(responses)) {}

  QosVector offered(const ApProfile& ap, const ApLoadState& load) const override {
    if (load.ap != ap.id) throw std::invalid_argument("ap_qos: load snapshot belongs to another AP");
    const double n = static_cast<double>(load.associated_user_count);
    std::vector<double> out(ap.base_qos.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      const LoadResponse r = i < responses_.size() ? responses_[i] : LoadResponse::fixed;
      switch (r) {
        case LoadResponse::share: out[i] = ap.base_qos[i] / std::max(1.0, n); break;
        case LoadResponse::grow: out[i] = ap.base_qos[i] * (1.0 + n); break;
        case LoadResponse::fixed: out[i] = ap.base_qos[i]; break;
      }
    }
    return QosVector{std::move(out)};
  }

 private:
  std::vector<LoadResponse> responses_;
};

inline QosVector ap_qos(const ApProfile& ap, const ApLoadState& load, const QosModel& model) {
  return model.offered(ap, load);
}

// Zero-mean Gaussian perturbation of every component, floored at zero.
inline QosVector apply_jitter(QosVector q, double sigma, Rng& rng) {
  if (sigma <= 0.0) return q;
  std::normal_distribution<double> noise{0.0, sigma};
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = std::max(0.0, q[i] + noise(rng));
  return q;
}

}  // namespace hodstat
