#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "quroute/errors.hpp"
#include "quroute/instance.hpp"

namespace quroute {

// Monetary coefficients of the reward: alpha1 per travel minute, alpha2 per
// minute of late arrival.
struct RewardParams {
  double alpha1 = 0.6;
  double alpha2 = 0.05;
};

// Which infeasibility rules are masked out of the action set. Time windows
// are never masked: relax_time_windows is kept as an explicit switch, but
// both settings leave the mask untouched and lateness acts through the
// reward's delay term only.
struct MaskConfig {
  bool mask_revisit = true;
  bool mask_capacity = true;
  bool mask_precedence = true;
  bool relax_time_windows = true;
};

struct VehicleState {
  int load = 0;
  double clock_min = 0.0;
  int position = 0;
  std::vector<double> arrival_min;  // per node, -1 when not visited by this vehicle
};

struct EnvState {
  int active_vehicle = 0;
  std::vector<VehicleState> vehicles;
  std::vector<std::uint8_t> visited;  // depot entry stays 0
  std::vector<std::uint8_t> onboard;  // pickups picked up in the current trip, undelivered
  int trip_visits = 0;                // non-depot visits in the current trip
  int trips_started = 0;
  int step_count = 0;

  const VehicleState& active() const { return vehicles[active_vehicle]; }
  VehicleState& active() { return vehicles[active_vehicle]; }
};

struct StepInfo {
  double travel_min = 0.0;
  double delay_min = 0.0;
};

struct StepOutcome {
  EnvState next_state;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

using ActionMask = std::vector<std::uint8_t>;

// Flags raised when a candidate action would break a constraint; used both
// for masking and for penalty-instead-of-mask training modes.
struct ViolationFlags {
  bool revisit = false;
  bool capacity = false;
  bool precedence = false;
  bool any() const { return revisit || capacity || precedence; }
};

struct CostBreakdown {
  double travel_min = 0.0;
  double delay_min = 0.0;
  double cost = 0.0;
  int revisit_violations = 0;
  int capacity_violations = 0;
  int precedence_violations = 0;
  int unserved = 0;
  bool feasible() const {
    return revisit_violations == 0 && capacity_violations == 0 &&
           precedence_violations == 0 && unserved == 0;
  }
};

// The CPDPTW Markov decision process. Vehicles are dispatched sequentially:
// selecting the depot closes the active trip and hands over to the next
// vehicle with a fresh clock; a single-vehicle fleet may run several trips.
class Env {
 public:
  Env(const Instance& instance, RewardParams reward = RewardParams{},
      MaskConfig masks = MaskConfig{})
      : inst_(&instance), reward_(reward), masks_(masks) {}

  const Instance& instance() const { return *inst_; }
  const RewardParams& reward_params() const { return reward_; }
  const MaskConfig& mask_config() const { return masks_; }
  int num_actions() const { return inst_->num_nodes(); }

  EnvState reset() const {
    EnvState s;
    const int n = inst_->num_nodes();
    VehicleState v;
    v.arrival_min.assign(n, -1.0);
    s.vehicles.assign(std::max(1, inst_->fleet.num_vehicles), v);
    s.visited.assign(n, 0);
    s.onboard.assign(n, 0);
    s.trips_started = 1;
    return s;
  }

  bool done(const EnvState& s) const {
    return all_served(s) && s.active().position == 0;
  }

  ViolationFlags violation_flags(const EnvState& s, int action) const {
    ViolationFlags f;
    if (action == 0) {
      f.precedence = !depot_allowed(s);
      return f;
    }
    const RequestNode& node = inst_->nodes[action];
    if (s.visited[action]) f.revisit = true;
    if (node.kind == NodeKind::pickup && !s.visited[action] &&
        s.active().load + node.demand > inst_->fleet.capacity)
      f.capacity = true;
    if (node.kind == NodeKind::delivery && !s.visited[node.partner]) f.precedence = true;
    return f;
  }

  ActionMask feasible_actions(const EnvState& s) const {
    if (done(s)) throw no_feasible_action_error("terminal state has no feasible action");
    const int n = inst_->num_nodes();
    ActionMask mask(n, 0);
    for (int a = 0; a < n; ++a) {
      const ViolationFlags f = violation_flags(s, a);
      bool ok = true;
      if (masks_.mask_revisit && f.revisit) ok = false;
      if (masks_.mask_capacity && f.capacity) ok = false;
      if (masks_.mask_precedence && f.precedence) ok = false;
      mask[a] = ok ? 1 : 0;
    }
    return mask;
  }

  StepOutcome step(const EnvState& s, int action) const {
    if (action < 0 || action >= inst_->num_nodes())
      throw std::invalid_argument("action out of range: " + std::to_string(action));
    if (done(s)) throw illegal_action_error("step on terminal state");
    {
      const ViolationFlags f = violation_flags(s, action);
      if ((masks_.mask_revisit && f.revisit) || (masks_.mask_capacity && f.capacity) ||
          (masks_.mask_precedence && f.precedence))
        throw illegal_action_error("action " + std::to_string(action) +
                                   " is masked in the current state");
    }

    StepOutcome out;
    out.next_state = s;
    EnvState& ns = out.next_state;
    VehicleState& vehicle = ns.active();

    const double travel = inst_->travel.at(vehicle.position, action);
    vehicle.clock_min += travel;
    out.info.travel_min = travel;

    if (action != 0) {
      const RequestNode& node = inst_->nodes[action];
      if (!ns.visited[action]) {
        out.info.delay_min = std::max(vehicle.clock_min - node.late_window_min, 0.0);
        vehicle.load += node.demand;
        vehicle.arrival_min[action] = vehicle.clock_min;
        ns.visited[action] = 1;
        ns.trip_visits += 1;
        if (node.kind == NodeKind::pickup) ns.onboard[action] = 1;
        else ns.onboard[node.partner] = 0;
      }
      vehicle.position = action;
    } else {
      // Trip closes. The next vehicle (or, for K=1, the next trip of the
      // same vehicle) starts at the depot with zero load and time.
      vehicle.position = 0;
      vehicle.load = 0;
      std::fill(ns.onboard.begin(), ns.onboard.end(), 0);
      ns.trip_visits = 0;
      if (!all_served(ns)) {
        const int k = static_cast<int>(ns.vehicles.size());
        if (ns.active_vehicle + 1 < k) ns.active_vehicle += 1;
        ns.active().clock_min = 0.0;
        ns.active().load = 0;
        ns.active().position = 0;
        ns.trips_started += 1;
      }
    }

    ns.step_count += 1;
    out.reward = -(reward_.alpha1 * out.info.travel_min + reward_.alpha2 * out.info.delay_min);
    out.done = done(ns);
    return out;
  }

 private:
  bool all_served(const EnvState& s) const {
    for (int i = 1; i < inst_->num_nodes(); ++i)
      if (!s.visited[i]) return false;
    return true;
  }

  bool onboard_empty(const EnvState& s) const {
    for (int i = 1; i < inst_->num_nodes(); ++i)
      if (s.onboard[i]) return false;
    return true;
  }

  // Depot closes a trip only when the trip served something and every picked
  // request was delivered; when work remains there must be a trip slot left.
  bool depot_allowed(const EnvState& s) const {
    if (all_served(s)) return true;
    if (s.trip_visits == 0) return false;
    if (!onboard_empty(s)) return false;
    const int k = inst_->fleet.num_vehicles;
    return k == 1 || s.active_vehicle + 1 < k;
  }

  const Instance* inst_;
  RewardParams reward_;
  MaskConfig masks_;
};

// Splits a rollout's action sequence into depot-to-depot routes.
inline std::vector<std::vector<int>> routes_from_actions(const std::vector<int>& actions) {
  std::vector<std::vector<int>> routes;
  std::vector<int> current{0};
  for (int a : actions) {
    current.push_back(a);
    if (a == 0) {
      if (current.size() > 2) routes.push_back(current);
      current = {0};
    }
  }
  if (current.size() > 1) {
    current.push_back(0);
    routes.push_back(current);
  }
  return routes;
}

// Evaluates a set of depot-to-depot routes against Eq.-7-style cost:
// alpha1 * total travel + alpha2 * total lateness, with demand and lateness
// applied on a node's first visit. Constraint violations are reported, not
// thrown, so infeasible routes can still be priced.
inline CostBreakdown route_cost(const Instance& inst,
                                const std::vector<std::vector<int>>& routes,
                                const RewardParams& reward = RewardParams{}) {
  CostBreakdown out;
  std::vector<std::uint8_t> visited(inst.num_nodes(), 0);
  std::vector<std::uint8_t> onboard(inst.num_nodes(), 0);
  for (const std::vector<int>& route : routes) {
    if (route.size() < 2 || route.front() != 0 || route.back() != 0)
      throw std::invalid_argument("each route must start and end at the depot");
    int position = 0;
    int load = 0;
    double clock = 0.0;
    std::fill(onboard.begin(), onboard.end(), 0);
    for (std::size_t step = 1; step < route.size(); ++step) {
      const int node_id = route[step];
      if (node_id < 0 || node_id >= inst.num_nodes())
        throw std::invalid_argument("route visits unknown node " + std::to_string(node_id));
      clock += inst.travel.at(position, node_id);
      out.travel_min += inst.travel.at(position, node_id);
      position = node_id;
      if (node_id == 0) {
        for (int i = 1; i < inst.num_nodes(); ++i)
          if (onboard[i]) out.precedence_violations += 1;
        break;  // routes are depot-terminated by construction
      }
      const RequestNode& node = inst.nodes[node_id];
      if (visited[node_id]) {
        out.revisit_violations += 1;
        continue;
      }
      visited[node_id] = 1;
      out.delay_min += std::max(clock - node.late_window_min, 0.0);
      load += node.demand;
      if (node.kind == NodeKind::pickup) {
        onboard[node_id] = 1;
        if (load > inst.fleet.capacity) out.capacity_violations += 1;
      } else {
        if (!onboard[node.partner]) out.precedence_violations += 1;
        onboard[node.partner] = 0;
      }
    }
  }
  for (int i = 1; i < inst.num_nodes(); ++i)
    if (!visited[i]) out.unserved += 1;
  out.cost = reward.alpha1 * out.travel_min + reward.alpha2 * out.delay_min;
  return out;
}

}  // namespace quroute
