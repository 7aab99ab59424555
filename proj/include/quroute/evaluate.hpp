#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "quroute/brute_force.hpp"
#include "quroute/qnet.hpp"
#include "quroute/rollout.hpp"

namespace quroute {

struct EvalRow {
  int instance_id = 0;
  double cost = 0.0;
  double gap = 0.0;  // (cost - optimum)/optimum where the oracle is in reach
  bool has_gap = false;
  bool feasible = true;
};

struct DistributionStats {
  int count = 0;
  double median = 0.0, q1 = 0.0, q3 = 0.0, mean = 0.0;
};

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * (static_cast<double>(sorted.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

inline DistributionStats distribution_stats(std::vector<double> values) {
  DistributionStats s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.median = quantile_sorted(values, 0.5);
  s.q1 = quantile_sorted(values, 0.25);
  s.q3 = quantile_sorted(values, 0.75);
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / static_cast<double>(values.size());
  return s;
}

struct EvalReport {
  std::vector<EvalRow> rows;
  DistributionStats cost_stats;
};

// Greedy (epsilon = 0) rollouts with full masking; `policy` maps a snapshot
// to an action. The optimality gap is attached on oracle-sized instances.
template <typename Policy>
EvalReport evaluate(Policy&& policy, const std::vector<Instance>& instances,
                    const RewardParams& reward = RewardParams{},
                    const MaskConfig& masks = MaskConfig{}, bool with_gap = true) {
  EvalReport report;
  std::vector<double> costs;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Instance& inst = instances[i];
    EncodedRoutingEnv env(inst, static_cast<int>(i), reward, masks);
    StateSnapshot snap = env.reset();
    double cost = 0.0;
    bool done = snap.terminal;
    int steps = 0;
    const int cap = env.max_episode_steps();
    while (!done && steps < cap) {
      const int action = policy(snap);
      auto result = env.step(action);
      cost -= result.reward;
      snap = std::move(result.snapshot);
      done = result.done;
      ++steps;
    }
    EvalRow row;
    row.instance_id = static_cast<int>(i);
    row.cost = cost;
    const CostBreakdown breakdown = route_cost(inst, routes_from_actions(env.actions_taken()), reward);
    row.feasible = breakdown.feasible() && done;
    if (with_gap && inst.num_requests() <= kMaxBruteForceRequests && inst.num_requests() > 0) {
      const BruteForceResult oracle = brute_force_solve(inst, reward);
      row.has_gap = true;
      row.gap = oracle.cost > 1e-12 ? (cost - oracle.cost) / oracle.cost : 0.0;
    }
    report.rows.push_back(row);
    costs.push_back(cost);
  }
  report.cost_stats = distribution_stats(std::move(costs));
  return report;
}

// Policy adapters.
struct GreedyQPolicy {
  const QNetwork* net;
  int operator()(const StateSnapshot& snap) const {
    return argmax_masked(net->forward(snap), snap.mask);
  }
};

struct RandomFeasiblePolicy {
  mutable Rng rng;
  explicit RandomFeasiblePolicy(std::uint64_t seed) : rng(seed) {}
  int operator()(const StateSnapshot& snap) const { return random_masked(snap.mask, rng); }
};

}  // namespace quroute
