#pragma once

// Random Way Point mobility: pause, pick a uniform waypoint, travel to it in a
// straight line at a uniformly drawn speed, pause again.

#include <algorithm>
#include <stdexcept>

#include "hodstat/rng.hpp"
#include "hodstat/scenario.hpp"
#include "hodstat/types.hpp"

namespace hodstat {

enum class MobilityPhase { paused, moving };

struct MobilityState {
  Vec2 position;
  Vec2 waypoint;
  MobilityPhase phase{MobilityPhase::paused};
  double pause_remaining{0.0};
  double speed{0.0};
  friend bool operator==(const MobilityState&, const MobilityState&) = default;
};

// Remaining distance at or below which a terminal counts as arrived.
inline constexpr double kArrivalTolerance = 1e-6;

inline Vec2 random_waypoint(Area area, Rng& rng) {
  return {uniform(rng, 0.0, area.width), uniform(rng, 0.0, area.height)};
}

inline MobilityState init_mobility(const UserProfile& profile, Area area, Rng& rng) {
  if (!profile.mobile) throw std::invalid_argument("init_mobility: user " + std::to_string(profile.id.value) + " is not mobile");
  if (!area.contains(profile.initial_position))
    throw std::invalid_argument("init_mobility: initial position of user " + std::to_string(profile.id.value) +
                                " is outside the area");
  MobilityState s;
  s.position = profile.initial_position;
  s.waypoint = profile.initial_position;
  s.phase = MobilityPhase::paused;
  s.pause_remaining = uniform(rng, profile.pause.min, profile.pause.max);
  return s;
}

// Advances one terminal by dt seconds. Time left over after a pause expires or
// after an arrival is dropped; the terminal starts the next phase on the next step.
inline MobilityState step_mobility(MobilityState s, double dt, Area area, const UserProfile& profile, Rng& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_mobility: dt must be > 0");

  if (s.phase == MobilityPhase::paused) {
    s.pause_remaining = std::max(0.0, s.pause_remaining - dt);
    if (s.pause_remaining <= 0.0) {
      s.waypoint = random_waypoint(area, rng);
      s.speed = uniform(rng, profile.speed.min, profile.speed.max);
      s.phase = MobilityPhase::moving;
    }
    return s;
  }

  const double remaining = distance(s.position, s.waypoint);
  const double travel = s.speed * dt;
  if (remaining <= travel) {
    s.position = s.waypoint;
  } else {
    const double f = travel / remaining;
    s.position.x += (s.waypoint.x - s.position.x) * f;
    s.position.y += (s.waypoint.y - s.position.y) * f;
  }
  s.position.x = std::clamp(s.position.x, 0.0, area.width);
  s.position.y = std::clamp(s.position.y, 0.0, area.height);

  if (distance(s.position, s.waypoint) <= kArrivalTolerance) {
    s.phase = MobilityPhase::paused;
    s.pause_remaining = uniform(rng, profile.pause.min, profile.pause.max);
  }
  return s;
}

}  // namespace hodstat
