#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "quroute/env.hpp"
#include "quroute/errors.hpp"
#include "quroute/instance.hpp"

namespace quroute {

struct BruteForceResult {
  std::vector<std::vector<int>> routes;  // depot-wrapped
  double cost = 0.0;
  CostBreakdown breakdown;
  long long candidates = 0;  // complete solutions enumerated
};

inline constexpr int kMaxBruteForceRequests = 4;

namespace detail {

struct BruteForceSearch {
  const Instance* inst;
  RewardParams reward;
  int n_nodes;
  std::vector<std::uint8_t> visited;
  std::vector<std::uint8_t> onboard;
  std::vector<int> current_route;
  std::vector<std::vector<int>> routes;
  double best_cost = 0.0;
  bool have_best = false;
  std::vector<std::vector<int>> best_routes;
  long long candidates = 0;

  int remaining = 0;
  int load = 0;

  void dfs(int position, double clock, double acc_cost, int trips_used, int trip_visits) {
    if (have_best && acc_cost >= best_cost) return;  // legs and delays only add cost
    const int k = inst->fleet.num_vehicles;

    if (remaining == 0 && trip_visits > 0) {
      const double leg = inst->travel.at(position, 0);
      const double total = acc_cost + reward.alpha1 * leg;
      candidates += 1;
      if (!have_best || total < best_cost) {
        best_cost = total;
        have_best = true;
        best_routes = routes;
        std::vector<int> closed = current_route;
        closed.push_back(0);
        best_routes.push_back(closed);
      }
      return;
    }

    // close the trip and dispatch the next one
    if (trip_visits > 0 && load == 0 && remaining > 0 && (k == 1 || trips_used < k)) {
      const double leg = inst->travel.at(position, 0);
      std::vector<int> closed = current_route;
      closed.push_back(0);
      routes.push_back(closed);
      std::vector<int> saved_route = current_route;
      current_route = {0};
      dfs(0, 0.0, acc_cost + reward.alpha1 * leg, trips_used + 1, 0);
      current_route = saved_route;
      routes.pop_back();
    }

    for (int node = 1; node < n_nodes; ++node) {
      if (visited[node]) continue;
      const RequestNode& rn = inst->nodes[node];
      if (rn.kind == NodeKind::pickup) {
        if (load + rn.demand > inst->fleet.capacity) continue;
      } else {
        if (!onboard[rn.partner]) continue;
      }
      const double leg = inst->travel.at(position, node);
      const double arrival = clock + leg;
      const double delay = std::max(arrival - rn.late_window_min, 0.0);
      visited[node] = 1;
      if (rn.kind == NodeKind::pickup) onboard[node] = 1;
      else onboard[rn.partner] = 0;
      load += rn.demand;
      remaining -= 1;
      current_route.push_back(node);
      dfs(node, arrival, acc_cost + reward.alpha1 * leg + reward.alpha2 * delay, trips_used,
          trip_visits + 1);
      current_route.pop_back();
      remaining += 1;
      load -= rn.demand;
      if (rn.kind == NodeKind::pickup) onboard[node] = 0;
      else onboard[rn.partner] = 1;
      visited[node] = 0;
    }
  }
};

}  // namespace detail

// Exhaustive minimum of the Eq.-7-style cost over every precedence- and
// capacity-valid visit order and trip split, matching the environment's
// sequential-dispatch semantics (K vehicles, or unlimited trips when K=1).
inline BruteForceResult brute_force_solve(const Instance& inst,
                                          const RewardParams& reward = RewardParams{}) {
  if (inst.num_requests() > kMaxBruteForceRequests)
    throw capacity_error("brute force capped at " + std::to_string(kMaxBruteForceRequests) +
                         " requests");
  BruteForceResult result;
  if (inst.num_customers() == 0) {
    result.breakdown = route_cost(inst, {}, reward);
    return result;
  }
  detail::BruteForceSearch search;
  search.inst = &inst;
  search.reward = reward;
  search.n_nodes = inst.num_nodes();
  search.visited.assign(search.n_nodes, 0);
  search.onboard.assign(search.n_nodes, 0);
  search.current_route = {0};
  search.remaining = inst.num_customers();
  search.dfs(0, 0.0, 0.0, 1, 0);
  if (!search.have_best) throw infeasible_error("no feasible route exists for this instance");
  result.routes = search.best_routes;
  result.cost = search.best_cost;
  result.candidates = search.candidates;
  result.breakdown = route_cost(inst, result.routes, reward);
  return result;
}

}  // namespace quroute
