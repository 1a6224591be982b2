#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <ostream>
#include <span>
#include <vector>

namespace hodstat {

// Identifier of an access point. Ordering is used for deterministic tie-breaks.
struct ApId {
  std::uint32_t value{0};
  friend constexpr auto operator<=>(ApId, ApId) = default;
  friend std::ostream& operator<<(std::ostream& os, ApId id) { return os << id.value; }
};

struct UserId {
  std::uint32_t value{0};
  friend constexpr auto operator<=>(UserId, UserId) = default;
  friend std::ostream& operator<<(std::ostream& os, UserId id) { return os << id.value; }
};

struct Vec2 {
  double x{0.0};
  double y{0.0};
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Axis-aligned simulation area anchored at the origin: [0,width] x [0,height].
struct Area {
  double width{0.0};
  double height{0.0};

  bool contains(Vec2 p) const {
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= width && p.y <= height;
  }
  friend constexpr bool operator==(Area, Area) = default;
};

// One value per decision criterion, in the order of ScenarioConfig::criteria.
class QosVector {
 public:
  QosVector() = default;
  explicit QosVector(std::vector<double> values) : values_(std::move(values)) {}
  QosVector(std::initializer_list<double> values) : values_(values) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  friend bool operator==(const QosVector&, const QosVector&) = default;

 private:
  std::vector<double> values_;
};

}  // namespace hodstat

template <>
struct std::hash<hodstat::ApId> {
  std::size_t operator()(hodstat::ApId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};

template <>
struct std::hash<hodstat::UserId> {
  std::size_t operator()(hodstat::UserId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
