#pragma once

// Scenario configuration: every knob of one simulated WLAN world, its JSON
// document form, and validation of the cross-field invariants.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hodstat/rng.hpp"
#include "hodstat/types.hpp"

namespace hodstat {

enum class Direction { benefit, cost };
enum class StrategyKind { none, hysteresis, waiting_time, randomized_wait };
enum class LoadResponse { share, grow, fixed };

struct DecisionCriterion {
  std::string id;
  Direction direction{Direction::benefit};
  double alpha{1.0};
  friend bool operator==(const DecisionCriterion&, const DecisionCriterion&) = default;
};

// A protagonist objective (application, user, operator, ...). The combined
// score of a network is the weight-sum of objective scores.
struct Objective {
  std::string id;
  double weight{1.0};
  std::vector<std::string> criteria;  // subset of criterion ids scored for this objective
  bool gated{true};                   // zero the score when requirements are not met
  friend bool operator==(const Objective&, const Objective&) = default;
};

struct StabilityStrategy {
  StrategyKind kind{StrategyKind::none};
  double parameter{0.0};  // H (score units), T or T_max (seconds)
  friend bool operator==(const StabilityStrategy&, const StabilityStrategy&) = default;
};

struct Range {
  double min{0.0};
  double max{0.0};
  friend bool operator==(const Range&, const Range&) = default;
};

struct ApProfile {
  ApId id;
  Vec2 position;
  double coverage_radius{0.0};
  QosVector base_qos;
  std::vector<ApId> wired_neighbors;
  friend bool operator==(const ApProfile&, const ApProfile&) = default;
};

struct UserProfile {
  UserId id;
  bool mobile{false};
  Vec2 initial_position;
  Range speed{0.8, 0.8};
  Range pause{1.0, 5.0};
  QosVector app_requirements;  // benefit: minimum; cost: maximum (0 = unconstrained)
  friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

struct RadioSettings {
  double jitter_sigma{0.0};
  std::vector<LoadResponse> load_response;  // one entry per criterion
  friend bool operator==(const RadioSettings&, const RadioSettings&) = default;
};

struct ScenarioConfig {
  double sim_time{75.0};
  double decision_step{0.5};
  double diffusion_period{0.5};
  Area area{200.0, 200.0};
  double mobility_ratio{0.27};
  std::vector<ApProfile> aps;
  std::vector<UserProfile> users;
  std::vector<DecisionCriterion> criteria;
  std::vector<Objective> objectives;
  bool gate_candidates{true};
  double max_benefit{1e6};
  int handover_cost_steps{1};
  RadioSettings radio;
  StabilityStrategy strategy{StrategyKind::hysteresis, 0.5};
  std::uint64_t rng_seed{0};
  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct Violation {
  std::string field;
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class ParseError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class ValidationError : public ConfigError {
 public:
  explicit ValidationError(std::vector<Violation> violations)
      : ConfigError(violations.empty() ? std::string{} : violations.front().field, summarize(violations)),
        violations_(std::move(violations)) {}
  ValidationError(std::string field, const std::string& message)
      : ValidationError(std::vector<Violation>{{std::move(field), message}}) {}
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  static std::string summarize(const std::vector<Violation>& v) {
    if (v.empty()) return "invalid configuration";
    std::string out = v.front().message;
    if (v.size() > 1) out += " (+" + std::to_string(v.size() - 1) + " more)";
    return out;
  }
  std::vector<Violation> violations_;
};

// ---------------------------------------------------------------------------
// enum <-> text

inline std::string_view to_string(Direction d) { return d == Direction::benefit ? "benefit" : "cost"; }

inline std::string_view to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::none: return "none";
    case StrategyKind::hysteresis: return "hysteresis";
    case StrategyKind::waiting_time: return "waiting_time";
    case StrategyKind::randomized_wait: return "randomized_wait";
  }
  return "none";
}

inline std::string_view to_string(LoadResponse r) {
  switch (r) {
    case LoadResponse::share: return "share";
    case LoadResponse::grow: return "grow";
    case LoadResponse::fixed: return "fixed";
  }
  return "fixed";
}

// Accepts the CLI short forms ("waiting", "randomized") as well.
inline std::optional<StrategyKind> parse_strategy_kind(std::string_view s) {
  if (s == "none") return StrategyKind::none;
  if (s == "hysteresis") return StrategyKind::hysteresis;
  if (s == "waiting_time" || s == "waiting") return StrategyKind::waiting_time;
  if (s == "randomized_wait" || s == "randomized") return StrategyKind::randomized_wait;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// helpers

inline std::optional<std::size_t> criterion_index(const ScenarioConfig& c, std::string_view id) {
  for (std::size_t i = 0; i < c.criteria.size(); ++i)
    if (c.criteria[i].id == id) return i;
  return std::nullopt;
}

inline const ApProfile* find_ap(const ScenarioConfig& c, ApId id) {
  for (const auto& ap : c.aps)
    if (ap.id == id) return &ap;
  return nullptr;
}

inline std::size_t mobile_count(const ScenarioConfig& c) {
  return static_cast<std::size_t>(std::count_if(c.users.begin(), c.users.end(), [](const auto& u) { return u.mobile; }));
}

// Fraction of users that are mobile terminals (14/52 ~ 0.269 for the default world).
inline double observed_mobility_ratio(const ScenarioConfig& c) {
  return c.users.empty() ? 0.0 : static_cast<double>(mobile_count(c)) / static_cast<double>(c.users.size());
}

// True when `total / step` is an integer within floating tolerance.
inline bool is_integer_multiple(double total, double step) {
  if (!(step > 0.0) || !(total > 0.0)) return false;
  const double q = total / step;
  return std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, q);
}

inline LoadResponse default_load_response(std::string_view criterion_id) {
  if (criterion_id == "bandwidth") return LoadResponse::share;
  if (criterion_id == "delay") return LoadResponse::grow;
  return LoadResponse::fixed;
}

// ---------------------------------------------------------------------------
// defaults

inline std::vector<DecisionCriterion> default_criteria() {
  return {
      {"bandwidth", Direction::benefit, 0.03},  // Mb/s
      {"delay", Direction::cost, 3.0},          // ms, scored as 1/delay
      {"error", Direction::cost, 0.01},         // frame error rate, scored as 1/error
  };
}

inline std::vector<Objective> default_objectives() {
  return {{"application", 1.0, {"bandwidth", "delay", "error"}, true}};
}

inline std::map<std::string, double, std::less<>> default_requirements() {
  return {{"bandwidth", 2.0}, {"delay", 40.0}, {"error", 0.05}};
}

// 3x3 grid of APs over the default 200 m x 200 m area, 66.7 m pitch, 56 m
// radius: adjacent disks overlap ~29% of their area and the whole area is
// covered. Wired backbone links are the 4-neighbour grid edges.
inline std::vector<ApProfile> default_ap_grid(const std::vector<DecisionCriterion>& criteria, Area area = {200.0, 200.0}) {
  constexpr int kSide = 3;
  constexpr double kRadiusToPitch = 0.84;
  const double pitch_x = area.width / kSide;
  const double pitch_y = area.height / kSide;
  // Three AP flavours (fast/clean, slow/lossy, middle), assigned along
  // diagonals so that wired neighbours always differ.
  const std::map<std::string, std::array<double, 3>, std::less<>> flavours{
      {"bandwidth", {54.0, 11.0, 24.0}},
      {"delay", {2.0, 6.0, 4.0}},
      {"error", {0.005, 0.030, 0.015}},
  };
  std::vector<ApProfile> aps;
  for (int row = 0; row < kSide; ++row) {
    for (int col = 0; col < kSide; ++col) {
      ApProfile ap;
      ap.id = ApId{static_cast<std::uint32_t>(row * kSide + col)};
      ap.position = {pitch_x / 2 + col * pitch_x, pitch_y / 2 + row * pitch_y};
      ap.coverage_radius = kRadiusToPitch * std::max(pitch_x, pitch_y);
      const auto flavour = static_cast<std::size_t>((row + col) % 3);
      std::vector<double> qos;
      for (const auto& c : criteria) {
        auto it = flavours.find(c.id);
        if (it == flavours.end())
          throw ValidationError("aps", "default AP grid has no base value for criterion '" + c.id + "'");
        qos.push_back(it->second[flavour]);
      }
      ap.base_qos = QosVector{std::move(qos)};
      auto link = [&](int r, int cc) {
        if (r >= 0 && r < kSide && cc >= 0 && cc < kSide)
          ap.wired_neighbors.push_back(ApId{static_cast<std::uint32_t>(r * kSide + cc)});
      };
      link(row - 1, col);
      link(row, col - 1);
      link(row, col + 1);
      link(row + 1, col);
      aps.push_back(std::move(ap));
    }
  }
  return aps;
}

struct PopulationSpec {
  std::size_t users{52};
  std::size_t mobile{14};
  std::uint64_t layout_seed{2010};
};

// Users placed uniformly over the area; ids [0, mobile) are the mobile terminals.
inline std::vector<UserProfile> make_population(const PopulationSpec& spec, Area area,
                                                const std::vector<DecisionCriterion>& criteria) {
  const auto reqs = default_requirements();
  std::vector<double> req;
  for (const auto& c : criteria) {
    auto it = reqs.find(c.id);
    req.push_back(it == reqs.end() ? 0.0 : it->second);
  }
  std::vector<UserProfile> users;
  for (std::size_t i = 0; i < spec.users; ++i) {
    auto rng = make_stream(spec.layout_seed, StreamTag::population, i);
    UserProfile u;
    u.id = UserId{static_cast<std::uint32_t>(i)};
    u.mobile = i < spec.mobile;
    u.initial_position = {uniform(rng, 0.0, area.width), uniform(rng, 0.0, area.height)};
    u.app_requirements = QosVector{req};
    users.push_back(std::move(u));
  }
  return users;
}

// The shipped default world: 75 s, 0.5 s decision step, 52 users of which 14
// move at 0.8 m/s under Random Way Point.
inline ScenarioConfig default_scenario(std::uint64_t seed = 1) {
  ScenarioConfig c;
  c.criteria = default_criteria();
  c.objectives = default_objectives();
  for (const auto& cr : c.criteria) c.radio.load_response.push_back(default_load_response(cr.id));
  c.aps = default_ap_grid(c.criteria, c.area);
  c.users = make_population(PopulationSpec{}, c.area, c.criteria);
  c.rng_seed = seed;
  return c;
}

// ---------------------------------------------------------------------------
// validation

inline std::vector<Violation> validate(const ScenarioConfig& c) {
  std::vector<Violation> out;
  auto bad = [&](std::string field, std::string msg) { out.push_back({std::move(field), std::move(msg)}); };
  auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };

  if (!(c.sim_time > 0.0) || !std::isfinite(c.sim_time)) bad("sim_time", "must be > 0");
  if (!(c.decision_step > 0.0) || !std::isfinite(c.decision_step)) bad("decision_step", "must be > 0");
  if (c.sim_time > 0.0 && c.decision_step > 0.0 && !is_integer_multiple(c.sim_time, c.decision_step))
    bad("sim_time", "sim_time not multiple of step");
  if (!(c.diffusion_period > 0.0))
    bad("diffusion_period", "must be > 0");
  else if (c.decision_step > 0.0 && !is_integer_multiple(c.diffusion_period, c.decision_step))
    bad("diffusion_period", "must be an integer multiple of decision_step");
  if (!(c.area.width > 0.0) || !(c.area.height > 0.0)) bad("area", "width and height must be > 0");
  if (!(c.mobility_ratio >= 0.0 && c.mobility_ratio <= 1.0)) bad("mobility_ratio", "must lie in [0,1]");
  if (!(c.max_benefit > 0.0)) bad("max_benefit", "must be > 0");
  if (c.handover_cost_steps < 0) bad("handover_cost_steps", "must be >= 0");
  if (!finite_nonneg(c.radio.jitter_sigma)) bad("radio.jitter_sigma", "must be >= 0");
  if (!finite_nonneg(c.strategy.parameter)) bad("strategy.parameter", "must be >= 0");

  const std::size_t k = c.criteria.size();
  if (k == 0) bad("criteria", "at least one criterion required");
  std::set<std::string, std::less<>> crit_ids;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& cr = c.criteria[i];
    const std::string f = "criteria[" + std::to_string(i) + "]";
    if (cr.id.empty()) bad(f + ".id", "must not be empty");
    if (!crit_ids.insert(cr.id).second) bad(f + ".id", "duplicate criterion '" + cr.id + "'");
    if (!(cr.alpha > 0.0) || !std::isfinite(cr.alpha)) bad(f + ".alpha", "must be > 0");
  }
  if (c.radio.load_response.size() != k) bad("radio.load_response", "must name every criterion");

  if (c.objectives.empty()) bad("objectives", "at least one objective required");
  double wsum = 0.0;
  std::set<std::string, std::less<>> obj_ids;
  for (std::size_t i = 0; i < c.objectives.size(); ++i) {
    const auto& o = c.objectives[i];
    const std::string f = "objectives[" + std::to_string(i) + "]";
    if (!obj_ids.insert(o.id).second) bad(f + ".id", "duplicate objective '" + o.id + "'");
    if (!finite_nonneg(o.weight)) bad(f + ".weight", "must be >= 0");
    wsum += o.weight;
    if (o.criteria.empty()) bad(f + ".criteria", "must list at least one criterion");
    for (const auto& id : o.criteria)
      if (!crit_ids.contains(id)) bad(f + ".criteria", "unknown criterion '" + id + "'");
  }
  if (!c.objectives.empty() && std::abs(wsum - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "weights sum ≠ 1 (sum = " << wsum << ")";
    bad("objectives.weight", os.str());
  }

  std::set<ApId> ap_ids;
  for (const auto& ap : c.aps) ap_ids.insert(ap.id);
  if (c.aps.empty()) bad("aps", "at least one AP required");
  if (ap_ids.size() != c.aps.size()) bad("aps", "duplicate AP id");
  for (std::size_t i = 0; i < c.aps.size(); ++i) {
    const auto& ap = c.aps[i];
    const std::string f = "aps[" + std::to_string(i) + "]";
    if (!(ap.coverage_radius > 0.0)) bad(f + ".coverage_radius", "must be > 0");
    if (ap.base_qos.size() != k) bad(f + ".base_qos", "must give a value for every criterion");
    for (double v : ap.base_qos)
      if (!finite_nonneg(v)) bad(f + ".base_qos", "values must be >= 0");
    for (ApId n : ap.wired_neighbors) {
      const ApProfile* other = find_ap(c, n);
      if (n == ap.id) {
        bad(f + ".wired_neighbors", "an AP cannot neighbour itself");
      } else if (other == nullptr) {
        bad(f + ".wired_neighbors", "unknown AP " + std::to_string(n.value));
      } else if (std::find(other->wired_neighbors.begin(), other->wired_neighbors.end(), ap.id) ==
                 other->wired_neighbors.end()) {
        bad(f + ".wired_neighbors", "neighbour relation with AP " + std::to_string(n.value) + " is not symmetric");
      }
    }
  }

  if (c.users.empty()) bad("users", "at least one user required");
  std::set<UserId> user_ids;
  for (std::size_t i = 0; i < c.users.size(); ++i) {
    const auto& u = c.users[i];
    const std::string f = "users[" + std::to_string(i) + "]";
    if (!user_ids.insert(u.id).second) bad(f + ".id", "duplicate user id");
    if (!c.area.contains(u.initial_position)) bad(f + ".initial_position", "outside area");
    if (!(u.speed.min >= 0.0) || u.speed.min > u.speed.max) bad(f + ".speed", "need 0 <= min <= max");
    if (u.mobile && !(u.speed.min > 0.0)) bad(f + ".speed", "mobile users need speed > 0");
    if (!(u.pause.min >= 0.0) || u.pause.min > u.pause.max) bad(f + ".pause_range", "need 0 <= min <= max");
    if (u.app_requirements.size() != k) bad(f + ".app_requirements", "must give a value for every criterion");
    for (double v : u.app_requirements)
      if (!finite_nonneg(v)) bad(f + ".app_requirements", "values must be >= 0");
  }
  if (!c.users.empty() &&
      std::abs(static_cast<double>(mobile_count(c)) - c.mobility_ratio * static_cast<double>(c.users.size())) > 1.0)
    bad("mobility_ratio", "mobile user count disagrees with mobility_ratio by more than one user");

  return out;
}

// ---------------------------------------------------------------------------
// JSON document form

namespace detail {

using json = nlohmann::json;

// Walks one JSON object, remembering which keys were consumed so that
// leftovers can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_.empty() ? "<document>" : path_, "expected an object");
  }

  std::string field(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }
  bool has(std::string_view key) const { return j_.contains(key); }

  const json* get(std::string_view key) {
    seen_.insert(std::string(key));
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  const json& require(std::string_view key) {
    const json* v = get(key);
    if (v == nullptr) throw ValidationError(field(key), "required field missing");
    return *v;
  }

  double number(std::string_view key, std::optional<double> fallback = std::nullopt) {
    const json* v = get(key);
    if (v == nullptr) {
      if (!fallback) throw ValidationError(field(key), "required field missing");
      return *fallback;
    }
    if (!v->is_number()) throw ValidationError(field(key), "expected a number");
    return v->get<double>();
  }
  bool boolean(std::string_view key, bool fallback) {
    const json* v = get(key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) throw ValidationError(field(key), "expected true/false");
    return v->get<bool>();
  }
  std::string string(std::string_view key, std::optional<std::string> fallback = std::nullopt) {
    const json* v = get(key);
    if (v == nullptr) {
      if (!fallback) throw ValidationError(field(key), "required field missing");
      return *fallback;
    }
    if (!v->is_string()) throw ValidationError(field(key), "expected a string");
    return v->get<std::string>();
  }
  std::uint64_t unsigned_integer(std::string_view key) {
    const json& v = require(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      throw ValidationError(field(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.contains(it.key())) throw ValidationError(field(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

inline Vec2 read_vec2(const json& j, const std::string& f) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ValidationError(f, "expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Range read_range(const json& j, const std::string& f) {
  if (j.is_number()) return {j.get<double>(), j.get<double>()};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ValidationError(f, "expected a number or [min, max]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline QosVector read_qos(const json& j, const std::string& f, const std::vector<DecisionCriterion>& criteria,
                          const std::map<std::string, double, std::less<>>* fallback) {
  if (!j.is_object()) throw ValidationError(f, "expected an object keyed by criterion id");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(criteria.begin(), criteria.end(), [&](const auto& c) { return c.id == it.key(); }))
      throw ValidationError(f + "." + it.key(), "unknown criterion");
    if (!it->is_number()) throw ValidationError(f + "." + it.key(), "expected a number");
  }
  std::vector<double> values;
  for (const auto& c : criteria) {
    if (j.contains(c.id)) {
      values.push_back(j[c.id].get<double>());
    } else if (fallback != nullptr) {
      auto it = fallback->find(c.id);
      values.push_back(it == fallback->end() ? 0.0 : it->second);
    } else {
      throw ValidationError(f + "." + c.id, "required field missing");
    }
  }
  return QosVector{std::move(values)};
}

inline json write_qos(const QosVector& q, const std::vector<DecisionCriterion>& criteria) {
  json j = json::object();
  for (std::size_t i = 0; i < criteria.size() && i < q.size(); ++i) j[criteria[i].id] = q[i];
  return j;
}

inline json write_range(Range r) {
  if (r.min == r.max) return r.min;
  return json::array({r.min, r.max});
}

}  // namespace detail

inline constexpr int kScenarioSchemaVersion = 1;

// Parses and validates a scenario document. Absent fields take the defaults
// listed in docs/scenario-schema.md; `rng_seed` is always required.
inline ScenarioConfig scenario_from_json(const nlohmann::json& doc) {
  using detail::ObjectReader;
  using json = nlohmann::json;
  ObjectReader root(doc, "");
  ScenarioConfig c;

  if (const json* v = root.get("schema_version")) {
    if (!v->is_number_integer() || v->get<int>() != kScenarioSchemaVersion)
      throw ValidationError("schema_version", "unsupported schema version");
  }
  c.sim_time = root.number("sim_time", 75.0);
  c.decision_step = root.number("decision_step", 0.5);
  c.diffusion_period = root.number("diffusion_period", c.decision_step);
  if (const json* a = root.get("area")) {
    ObjectReader ar(*a, "area");
    c.area = {ar.number("width"), ar.number("height")};
    ar.finish();
  }
  c.mobility_ratio = root.number("mobility_ratio", 0.27);
  c.gate_candidates = root.boolean("gate_candidates", true);
  c.max_benefit = root.number("max_benefit", 1e6);
  {
    const double steps = root.number("handover_cost_steps", 1.0);
    if (steps != std::floor(steps)) throw ValidationError("handover_cost_steps", "expected an integer");
    c.handover_cost_steps = static_cast<int>(steps);
  }
  if (!root.has("rng_seed")) throw ValidationError("rng_seed", "required field missing");
  c.rng_seed = root.unsigned_integer("rng_seed");

  if (const json* arr = root.get("criteria")) {
    if (!arr->is_array()) throw ValidationError("criteria", "expected an array");
    for (std::size_t i = 0; i < arr->size(); ++i) {
      ObjectReader r((*arr)[i], "criteria[" + std::to_string(i) + "]");
      DecisionCriterion cr;
      cr.id = r.string("id");
      const std::string dir = r.string("direction", "benefit");
      if (dir == "benefit") cr.direction = Direction::benefit;
      else if (dir == "cost") cr.direction = Direction::cost;
      else throw ValidationError(r.field("direction"), "expected 'benefit' or 'cost'");
      cr.alpha = r.number("alpha");
      r.finish();
      c.criteria.push_back(std::move(cr));
    }
  } else {
    c.criteria = default_criteria();
  }

  if (const json* arr = root.get("objectives")) {
    if (!arr->is_array()) throw ValidationError("objectives", "expected an array");
    for (std::size_t i = 0; i < arr->size(); ++i) {
      ObjectReader r((*arr)[i], "objectives[" + std::to_string(i) + "]");
      Objective o;
      o.id = r.string("id");
      o.weight = r.number("weight");
      if (const json* cl = r.get("criteria")) {
        if (!cl->is_array()) throw ValidationError(r.field("criteria"), "expected an array of criterion ids");
        for (const auto& id : *cl) {
          if (!id.is_string()) throw ValidationError(r.field("criteria"), "expected an array of criterion ids");
          o.criteria.push_back(id.get<std::string>());
        }
      } else {
        for (const auto& cr : c.criteria) o.criteria.push_back(cr.id);
      }
      o.gated = r.boolean("gated", true);
      r.finish();
      c.objectives.push_back(std::move(o));
    }
  } else {
    Objective app{"application", 1.0, {}, true};
    for (const auto& cr : c.criteria) app.criteria.push_back(cr.id);
    c.objectives.push_back(std::move(app));
  }

  for (const auto& cr : c.criteria) c.radio.load_response.push_back(default_load_response(cr.id));
  if (const json* rj = root.get("radio")) {
    ObjectReader r(*rj, "radio");
    c.radio.jitter_sigma = r.number("jitter_sigma", 0.0);
    if (const json* lr = r.get("load_response")) {
      if (!lr->is_object()) throw ValidationError("radio.load_response", "expected an object keyed by criterion id");
      for (auto it = lr->begin(); it != lr->end(); ++it) {
        const std::string f = "radio.load_response." + it.key();
        auto idx = criterion_index(c, it.key());
        if (!idx) throw ValidationError(f, "unknown criterion");
        const std::string s = it->is_string() ? it->get<std::string>() : "";
        if (s == "share") c.radio.load_response[*idx] = LoadResponse::share;
        else if (s == "grow") c.radio.load_response[*idx] = LoadResponse::grow;
        else if (s == "fixed") c.radio.load_response[*idx] = LoadResponse::fixed;
        else throw ValidationError(f, "expected 'share', 'grow' or 'fixed'");
      }
    }
    r.finish();
  }

  if (const json* sj = root.get("strategy")) {
    ObjectReader r(*sj, "strategy");
    auto kind = parse_strategy_kind(r.string("kind"));
    if (!kind) throw ValidationError("strategy.kind", "expected none|hysteresis|waiting_time|randomized_wait");
    c.strategy.kind = *kind;
    c.strategy.parameter = r.number("parameter", 0.0);
    r.finish();
  }

  if (const json* arr = root.get("aps")) {
    if (!arr->is_array()) throw ValidationError("aps", "expected an array");
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const std::string f = "aps[" + std::to_string(i) + "]";
      ObjectReader r((*arr)[i], f);
      ApProfile ap;
      ap.id = ApId{static_cast<std::uint32_t>(r.unsigned_integer("id"))};
      ap.position = detail::read_vec2(r.require("position"), r.field("position"));
      ap.coverage_radius = r.number("coverage_radius");
      ap.base_qos = detail::read_qos(r.require("base_qos"), r.field("base_qos"), c.criteria, nullptr);
      if (const json* nb = r.get("wired_neighbors")) {
        if (!nb->is_array()) throw ValidationError(r.field("wired_neighbors"), "expected an array of AP ids");
        for (const auto& n : *nb) {
          if (!n.is_number_unsigned()) throw ValidationError(r.field("wired_neighbors"), "expected an array of AP ids");
          ap.wired_neighbors.push_back(ApId{n.get<std::uint32_t>()});
        }
      }
      r.finish();
      c.aps.push_back(std::move(ap));
    }
  } else {
    c.aps = default_ap_grid(c.criteria, c.area);
  }

  const json* users = root.get("users");
  const json* population = root.get("population");
  if (users != nullptr && population != nullptr)
    throw ValidationError("population", "cannot be combined with an explicit users list");
  if (users != nullptr) {
    if (!users->is_array()) throw ValidationError("users", "expected an array");
    const auto reqs = default_requirements();
    for (std::size_t i = 0; i < users->size(); ++i) {
      const std::string f = "users[" + std::to_string(i) + "]";
      ObjectReader r((*users)[i], f);
      UserProfile u;
      u.id = UserId{static_cast<std::uint32_t>(r.unsigned_integer("id"))};
      u.mobile = r.boolean("mobile", false);
      u.initial_position = detail::read_vec2(r.require("initial_position"), r.field("initial_position"));
      if (const json* s = r.get("speed")) u.speed = detail::read_range(*s, r.field("speed"));
      if (const json* p = r.get("pause_range")) u.pause = detail::read_range(*p, r.field("pause_range"));
      if (const json* q = r.get("app_requirements"))
        u.app_requirements = detail::read_qos(*q, r.field("app_requirements"), c.criteria, &reqs);
      else
        u.app_requirements = detail::read_qos(json::object(), r.field("app_requirements"), c.criteria, &reqs);
      r.finish();
      c.users.push_back(std::move(u));
    }
  } else {
    PopulationSpec spec;
    if (population != nullptr) {
      ObjectReader r(*population, "population");
      spec.users = static_cast<std::size_t>(r.number("users", 52));
      spec.mobile = static_cast<std::size_t>(r.number("mobile", 14));
      if (r.has("layout_seed")) spec.layout_seed = r.unsigned_integer("layout_seed");
      r.finish();
    }
    c.users = make_population(spec, c.area, c.criteria);
  }

  root.finish();

  if (auto v = validate(c); !v.empty()) throw ValidationError(std::move(v));
  return c;
}

inline ScenarioConfig load_scenario(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document.begin(), document.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("<document>", std::string("malformed JSON: ") + e.what());
  }
  return scenario_from_json(doc);
}

// Full document form: every field written explicitly, users always listed.
inline nlohmann::json to_json(const ScenarioConfig& c) {
  using json = nlohmann::json;
  json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["sim_time"] = c.sim_time;
  j["decision_step"] = c.decision_step;
  j["diffusion_period"] = c.diffusion_period;
  j["area"] = {{"width", c.area.width}, {"height", c.area.height}};
  j["mobility_ratio"] = c.mobility_ratio;
  j["rng_seed"] = c.rng_seed;
  j["gate_candidates"] = c.gate_candidates;
  j["max_benefit"] = c.max_benefit;
  j["handover_cost_steps"] = c.handover_cost_steps;
  j["strategy"] = {{"kind", std::string(to_string(c.strategy.kind))}, {"parameter", c.strategy.parameter}};

  json crit = json::array();
  for (const auto& cr : c.criteria)
    crit.push_back({{"id", cr.id}, {"direction", std::string(to_string(cr.direction))}, {"alpha", cr.alpha}});
  j["criteria"] = std::move(crit);

  json objs = json::array();
  for (const auto& o : c.objectives)
    objs.push_back({{"id", o.id}, {"weight", o.weight}, {"criteria", o.criteria}, {"gated", o.gated}});
  j["objectives"] = std::move(objs);

  json lr = json::object();
  for (std::size_t i = 0; i < c.criteria.size() && i < c.radio.load_response.size(); ++i)
    lr[c.criteria[i].id] = std::string(to_string(c.radio.load_response[i]));
  j["radio"] = {{"jitter_sigma", c.radio.jitter_sigma}, {"load_response", std::move(lr)}};

  json aps = json::array();
  for (const auto& ap : c.aps) {
    json nb = json::array();
    for (ApId n : ap.wired_neighbors) nb.push_back(n.value);
    aps.push_back({{"id", ap.id.value},
                   {"position", {ap.position.x, ap.position.y}},
                   {"coverage_radius", ap.coverage_radius},
                   {"base_qos", detail::write_qos(ap.base_qos, c.criteria)},
                   {"wired_neighbors", std::move(nb)}});
  }
  j["aps"] = std::move(aps);

  json users = json::array();
  for (const auto& u : c.users) {
    users.push_back({{"id", u.id.value},
                     {"mobile", u.mobile},
                     {"initial_position", {u.initial_position.x, u.initial_position.y}},
                     {"speed", detail::write_range(u.speed)},
                     {"pause_range", {u.pause.min, u.pause.max}},
                     {"app_requirements", detail::write_qos(u.app_requirements, c.criteria)}});
  }
  j["users"] = std::move(users);
  return j;
}

inline std::string serialize(const ScenarioConfig& c) { return to_json(c).dump(2) + "\n"; }

// Number of decision steps in one run: sim_time / decision_step.
inline std::size_t nb_steps(double sim_time, double decision_step) {
  if (!is_integer_multiple(sim_time, decision_step))
    throw std::invalid_argument("sim_time is not an integer multiple of decision_step");
  return static_cast<std::size_t>(std::llround(sim_time / decision_step));
}

inline std::size_t nb_steps(const ScenarioConfig& c) { return nb_steps(c.sim_time, c.decision_step); }

}  // namespace hodstat
