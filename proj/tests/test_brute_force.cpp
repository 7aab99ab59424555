#include <algorithm>
#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "quroute/brute_force.hpp"
#include "quroute/evaluate.hpp"

using namespace quroute;
using oracles::manual_instance;

namespace {

// Independent iterative oracle: enumerate permutations of all customers and
// binary trip-split choices, filter by precedence/capacity, price with
// route_cost. Cross-checks the recursive search.
double iterative_minimum(const Instance& inst, const RewardParams& reward) {
  std::vector<int> nodes;
  for (int i = 1; i < inst.num_nodes(); ++i) nodes.push_back(i);
  std::sort(nodes.begin(), nodes.end());
  double best = std::numeric_limits<double>::infinity();
  const int k = inst.fleet.num_vehicles;
  do {
    const int slots = static_cast<int>(nodes.size()) - 1;
    for (std::uint32_t split = 0; split < (1u << slots); ++split) {
      std::vector<std::vector<int>> routes;
      std::vector<int> route{0};
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        route.push_back(nodes[i]);
        const bool cut = i + 1 < nodes.size() && (split >> i & 1);
        if (cut) {
          route.push_back(0);
          routes.push_back(route);
          route = {0};
        }
      }
      route.push_back(0);
      routes.push_back(route);
      if (k > 1 && static_cast<int>(routes.size()) > k) continue;
      const CostBreakdown cb = route_cost(inst, routes, reward);
      if (!cb.feasible()) continue;
      best = std::min(best, cb.cost);
    }
  } while (std::next_permutation(nodes.begin(), nodes.end()));
  return best;
}

}  // namespace

TEST_CASE("the single-request optimum is the unique admissible loop") {
  const Instance inst = manual_instance({{0, 0}, {0.3, 0.4}, {0.6, 0.8}}, {2}, {100, 100});
  const BruteForceResult r = brute_force_solve(inst);
  REQUIRE(r.routes == std::vector<std::vector<int>>{{0, 1, 2, 0}});
  const double want = 0.6 * (inst.travel.at(0, 1) + inst.travel.at(1, 2) + inst.travel.at(2, 0));
  REQUIRE(r.cost == Catch::Approx(want).margin(1e-12));
  REQUIRE(r.breakdown.feasible());
}

TEST_CASE("recursive and iterative enumerations agree") {
  for (std::uint64_t seed : {1ull, 4ull, 9ull, 16ull}) {
    const Instance inst = generate_instance(seed, 2);
    const BruteForceResult r = brute_force_solve(inst);
    REQUIRE(r.cost == Catch::Approx(iterative_minimum(inst, RewardParams{})).margin(1e-9));
  }
  // delays matter: shrink the windows and compare again
  const Instance tight = manual_instance({{0, 0}, {0.9, 0.9}, {0.1, 0.8}, {0.2, 0.1}, {0.8, 0.3}},
                                         {2, 3}, {1.0, 1.2, 0.9, 1.5});
  const BruteForceResult r = brute_force_solve(tight);
  REQUIRE(r.cost == Catch::Approx(iterative_minimum(tight, RewardParams{})).margin(1e-9));
}

TEST_CASE("mirrored twin requests cost the same either way round") {
  const Instance inst = manual_instance(
      {{0.5, 0.5}, {0.25, 0.5}, {0.1, 0.5}, {0.75, 0.5}, {0.9, 0.5}}, {2, 2}, {50, 50, 50, 50});
  const BruteForceResult r = brute_force_solve(inst);
  // swap the two requests in the found routes; cost must match exactly
  auto swapped = r.routes;
  for (auto& route : swapped)
    for (int& node : route) {
      if (node == 1) node = 3;
      else if (node == 3) node = 1;
      else if (node == 2) node = 4;
      else if (node == 4) node = 2;
    }
  REQUIRE(route_cost(inst, swapped).cost == Catch::Approx(r.cost).margin(1e-12));
}

TEST_CASE("oversized instances are refused") {
  const Instance inst = generate_instance(1, 5);
  REQUIRE_THROWS_AS(brute_force_solve(inst), capacity_error);
}

TEST_CASE("trip splits are searched and priced consistently under tight capacity") {
  // Capacity 3 forbids carrying both requests at once; one round trip that
  // delivers between pickups stays legal, so the search must weigh both the
  // split and the interleaved single trip and still match the oracle.
  const Instance inst = manual_instance({{0, 0}, {0.1, 0}, {0.2, 0}, {0.0, 0.1}, {0.0, 0.2}},
                                        {3, 3}, {100, 100, 100, 100}, 3, 2);
  const BruteForceResult r = brute_force_solve(inst);
  REQUIRE(r.breakdown.feasible());
  REQUIRE(!r.routes.empty());
  REQUIRE(r.routes.size() <= 2);
  REQUIRE(r.cost == Catch::Approx(iterative_minimum(inst, RewardParams{})).margin(1e-9));
}

TEST_CASE("evaluate reports zero gap for an oracle policy") {
  const Instance inst = generate_instance(53, 1);
  const BruteForceResult oracle = brute_force_solve(inst);
  std::size_t cursor = 1;  // skip the leading depot
  auto oracle_policy = [&](const StateSnapshot&) {
    return oracle.routes[0][cursor++];
  };
  const EvalReport report = evaluate(oracle_policy, std::vector<Instance>{inst});
  REQUIRE(report.rows[0].has_gap);
  REQUIRE(report.rows[0].gap == Catch::Approx(0.0).margin(1e-9));
  REQUIRE(report.rows[0].feasible);
}

TEST_CASE("random policies never beat the oracle") {
  std::vector<Instance> instances;
  for (int i = 0; i < 6; ++i) instances.push_back(generate_instance(Rng::derive_seed(3, i), 2));
  RandomFeasiblePolicy policy(12);
  const EvalReport report = evaluate(policy, instances);
  for (const EvalRow& row : report.rows) {
    REQUIRE(row.has_gap);
    REQUIRE(row.gap >= -1e-9);
  }
}

TEST_CASE("evaluation statistics are deterministic for a fixed seed") {
  std::vector<Instance> instances;
  for (int i = 0; i < 4; ++i) instances.push_back(generate_instance(Rng::derive_seed(8, i), 2));
  const EvalReport a = evaluate(RandomFeasiblePolicy(77), instances);
  const EvalReport b = evaluate(RandomFeasiblePolicy(77), instances);
  REQUIRE(a.cost_stats.median == b.cost_stats.median);
  REQUIRE(a.cost_stats.mean == b.cost_stats.mean);
  for (std::size_t i = 0; i < a.rows.size(); ++i) REQUIRE(a.rows[i].cost == b.rows[i].cost);
}

TEST_CASE("distribution statistics match a hand computation") {
  const DistributionStats s = distribution_stats({4.0, 1.0, 3.0, 2.0});
  REQUIRE(s.median == Catch::Approx(2.5));
  REQUIRE(s.q1 == Catch::Approx(1.75));
  REQUIRE(s.q3 == Catch::Approx(3.25));
  REQUIRE(s.mean == Catch::Approx(2.5));
  REQUIRE(distribution_stats({}).count == 0);
}
