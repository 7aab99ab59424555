#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "quroute/brute_force.hpp"
#include "quroute/env.hpp"

using namespace quroute;
using oracles::manual_instance;

namespace {

// depot (0,0), P1 (0.3,0.4), D1 (0.6,0.8): legs 0.41667 / 0.41667 / 0.83333 min
Instance triangle_instance(double pickup_window = 100.0, double delivery_window = 100.0,
                           int demand = 2) {
  return manual_instance({{0.0, 0.0}, {0.3, 0.4}, {0.6, 0.8}}, {demand},
                         {pickup_window, delivery_window});
}

}  // namespace

TEST_CASE("reset dispatches vehicle 0 at the depot with zero load and time") {
  const Instance inst = generate_instance(3, 2);
  const Env env(inst);
  const EnvState s = env.reset();
  REQUIRE(s.active_vehicle == 0);
  REQUIRE(s.active().load == 0);
  REQUIRE(s.active().clock_min == 0.0);
  REQUIRE(s.active().position == 0);
  for (int i = 0; i < inst.num_nodes(); ++i) REQUIRE_FALSE(s.visited[i]);

  const EnvState s2 = env.reset();
  REQUIRE(s.visited == s2.visited);
  REQUIRE(s.step_count == s2.step_count);
}

TEST_CASE("empty instance resets straight into a terminal state") {
  const Instance inst = generate_instance(3, 0);
  const Env env(inst);
  const EnvState s = env.reset();
  REQUIRE(env.done(s));
  REQUIRE_THROWS_AS(env.feasible_actions(s), no_feasible_action_error);
}

TEST_CASE("masks enumerate the hand-derived rules on a single request") {
  const Instance inst = triangle_instance();
  const Env env(inst);
  EnvState s = env.reset();

  ActionMask mask = env.feasible_actions(s);
  REQUIRE(mask == ActionMask{0, 1, 0});  // only the pickup; depot closed on an empty trip

  s = env.step(s, 1).next_state;  // load 2 of 5
  mask = env.feasible_actions(s);
  REQUIRE(mask == ActionMask{0, 0, 1});  // only the delivery

  s = env.step(s, 2).next_state;
  mask = env.feasible_actions(s);
  REQUIRE(mask == ActionMask{1, 0, 0});  // close the route
}

TEST_CASE("disabling every mask frees every unvisited node including the depot") {
  const Instance inst = triangle_instance();
  const MaskConfig off{false, false, false, true};
  const Env env(inst, RewardParams{}, off);
  const EnvState s = env.reset();
  REQUIRE(env.feasible_actions(s) == ActionMask{1, 1, 1});
}

TEST_CASE("capacity masking blocks pickups that overflow the load") {
  const Instance inst = manual_instance({{0.0, 0.0}, {0.1, 0.0}, {0.2, 0.0}, {0.0, 0.1}, {0.0, 0.2}},
                                        {3, 3}, {100, 100, 100, 100});
  const Env env(inst);
  EnvState s = env.reset();
  s = env.step(s, 1).next_state;  // pick request 1: load 3 of 5
  const ActionMask mask = env.feasible_actions(s);
  REQUIRE_FALSE(mask[3]);  // second pickup would hit 6 of 5
  REQUIRE(mask[2]);        // own delivery stays open
}

TEST_CASE("step reproduces the Eq.-7 hand evaluation on the 3-4-5 route") {
  const Instance inst = triangle_instance();
  const Env env(inst);  // alpha1=0.6, alpha2=0.05
  EnvState s = env.reset();

  StepOutcome o1 = env.step(s, 1);
  REQUIRE(o1.info.travel_min == Catch::Approx(0.5 * 1000 / (20 * 60)).epsilon(1e-12));
  StepOutcome o2 = env.step(o1.next_state, 2);
  StepOutcome o3 = env.step(o2.next_state, 0);
  REQUIRE(o3.done);
  const double total_cost = -(o1.reward + o2.reward + o3.reward);
  REQUIRE(total_cost == Catch::Approx(0.6 * (5.0 / 3.0)).epsilon(1e-9));  // = 1.0000
  REQUIRE(total_cost == Catch::Approx(1.0).epsilon(1e-9));
  REQUIRE(o1.info.delay_min == 0.0);
  REQUIRE(o2.info.delay_min == 0.0);
}

TEST_CASE("late arrival adds the alpha2-weighted delay") {
  const Instance inst = triangle_instance(100.0, 0.0);  // delivery window at t=0
  const Env env(inst);
  EnvState s = env.reset();
  StepOutcome o1 = env.step(s, 1);
  StepOutcome o2 = env.step(o1.next_state, 2);
  // arrival at D1: 0.41667 + 0.41667 = 0.83333 min late by itself
  REQUIRE(o2.info.delay_min == Catch::Approx(5.0 / 6.0).epsilon(1e-9));
  REQUIRE(-o2.reward ==
          Catch::Approx(0.6 * (5.0 / 12.0) + 0.05 * (5.0 / 6.0)).epsilon(1e-9));
}

TEST_CASE("zero-length revisit with masks off changes nothing but the step counter") {
  const Instance inst = triangle_instance();
  const MaskConfig off{false, false, false, true};
  const Env env(inst, RewardParams{}, off);
  EnvState s = env.reset();
  s = env.step(s, 1).next_state;
  const StepOutcome again = env.step(s, 1);  // stand still on a visited node
  REQUIRE(again.reward == 0.0);
  REQUIRE(again.info.travel_min == 0.0);
  REQUIRE(again.info.delay_min == 0.0);
  REQUIRE(again.next_state.active().load == s.active().load);
  REQUIRE(again.next_state.visited == s.visited);
  REQUIRE(again.next_state.step_count == s.step_count + 1);
}

TEST_CASE("step rejects masked and out-of-range actions") {
  const Instance inst = triangle_instance();
  const Env env(inst);
  EnvState s = env.reset();
  REQUIRE_THROWS_AS(env.step(s, 2), illegal_action_error);  // delivery before pickup
  REQUIRE_THROWS_AS(env.step(s, 0), illegal_action_error);  // empty trip
  REQUIRE_THROWS_AS(env.step(s, 7), std::invalid_argument);
}

TEST_CASE("route_cost prices an empty plan at zero") {
  const Instance inst = triangle_instance();
  const CostBreakdown cb = route_cost(inst, {});
  REQUIRE(cb.cost == 0.0);
  REQUIRE(cb.unserved == 2);
}

TEST_CASE("route_cost equals a step replay on the unique single-request route") {
  const Instance inst = triangle_instance(40.0, 0.5);
  const Env env(inst);
  EnvState s = env.reset();
  double total = 0.0;
  std::vector<int> actions;
  for (int a : {1, 2, 0}) {
    const StepOutcome o = env.step(s, a);
    total -= o.reward;
    s = o.next_state;
    actions.push_back(a);
  }
  const CostBreakdown cb = route_cost(inst, routes_from_actions(actions));
  REQUIRE(cb.cost == Catch::Approx(total).margin(1e-9));
  REQUIRE(cb.feasible());
}

TEST_CASE("route_cost flags violations instead of throwing") {
  const Instance inst = manual_instance({{0, 0}, {0.1, 0}, {0.2, 0}, {0.3, 0}, {0.4, 0}}, {3, 3},
                                        {100, 100, 100, 100});
  // overload: both pickups before any delivery
  const CostBreakdown overload = route_cost(inst, {{0, 1, 3, 2, 4, 0}});
  REQUIRE(overload.capacity_violations > 0);
  // precedence: delivery first
  const CostBreakdown disorder = route_cost(inst, {{0, 2, 1, 3, 4, 0}});
  REQUIRE(disorder.precedence_violations > 0);
  // cost still computed
  REQUIRE(overload.cost > 0.0);
  REQUIRE_THROWS_AS(route_cost(inst, {{1, 2, 0}}), std::invalid_argument);
}

TEST_CASE("masked rollouts keep every invariant over many seeds") {
  int episodes = 0;
  for (std::uint64_t seed = 0; seed < 250; ++seed) {
    const int n = 1 + static_cast<int>(seed % 3);
    const int vehicles = 1 + static_cast<int>(seed % 2);
    const Instance inst = generate_instance(Rng::derive_seed(99, seed), n,
                                            FleetSpec{vehicles, 5, 20.0});
    for (int rollout = 0; rollout < 4; ++rollout) {
      Rng rng(Rng::derive_seed(seed, rollout));
      const Env env(inst);
      EnvState s = env.reset();
      double reward_sum = 0.0;
      std::vector<int> actions;
      const int cap = 2 * inst.num_nodes() * inst.fleet.num_vehicles;
      int steps = 0;
      while (!env.done(s)) {
        REQUIRE(steps <= cap);
        const ActionMask mask = env.feasible_actions(s);
        // mask completeness and relax-toggle invariance
        int allowed = 0;
        for (std::uint8_t m : mask) allowed += m;
        REQUIRE(allowed >= 1);
        MaskConfig toggled = env.mask_config();
        toggled.relax_time_windows = !toggled.relax_time_windows;
        REQUIRE(Env(inst, env.reward_params(), toggled).feasible_actions(s) == mask);

        std::vector<int> choices;
        for (int a = 0; a < static_cast<int>(mask.size()); ++a)
          if (mask[a]) choices.push_back(a);
        const int action = choices[rng.uniform_index(choices.size())];
        const StepOutcome o = env.step(s, action);
        reward_sum += o.reward;
        actions.push_back(action);
        s = o.next_state;
        REQUIRE(s.active().load >= 0);
        REQUIRE(s.active().load <= inst.fleet.capacity);
        ++steps;
      }
      for (int i = 1; i < inst.num_nodes(); ++i) REQUIRE(s.visited[i]);
      const CostBreakdown cb = route_cost(inst, routes_from_actions(actions));
      REQUIRE(cb.feasible());
      REQUIRE(cb.cost == Catch::Approx(-reward_sum).margin(1e-9));
      ++episodes;
    }
  }
  REQUIRE(episodes == 1000);
}

TEST_CASE("fixed policies reproduce identical trajectories") {
  const Instance inst = generate_instance(17, 2);
  auto run = [&] {
    Rng rng(5);
    const Env env(inst);
    EnvState s = env.reset();
    std::vector<int> actions;
    while (!env.done(s)) {
      const ActionMask mask = env.feasible_actions(s);
      std::vector<int> choices;
      for (int a = 0; a < static_cast<int>(mask.size()); ++a)
        if (mask[a]) choices.push_back(a);
      const int action = choices[rng.uniform_index(choices.size())];
      actions.push_back(action);
      s = env.step(s, action).next_state;
    }
    return actions;
  };
  REQUIRE(run() == run());
}

TEST_CASE("two vehicles split the work across sequential trips") {
  // capacity 3 forces one request per trip
  const Instance inst = manual_instance({{0, 0}, {0.1, 0}, {0.2, 0}, {0.0, 0.1}, {0.0, 0.2}},
                                        {3, 3}, {100, 100, 100, 100}, 3, 2);
  const Env env(inst);
  EnvState s = env.reset();
  s = env.step(s, 1).next_state;
  {
    const ActionMask mid = env.feasible_actions(s);
    REQUIRE_FALSE(mid[3]);  // second pickup would overload mid-trip
    REQUIRE_FALSE(mid[0]);  // cannot abandon the onboard request
  }
  s = env.step(s, 2).next_state;
  const ActionMask mask = env.feasible_actions(s);
  REQUIRE(mask[0]);  // load is back to zero, the trip may close
  REQUIRE(mask[3]);  // or the emptied vehicle may take the next pickup
  s = env.step(s, 0).next_state;
  REQUIRE(s.active_vehicle == 1);
  REQUIRE(s.active().clock_min == 0.0);
  s = env.step(s, 3).next_state;
  s = env.step(s, 4).next_state;
  const StepOutcome last = env.step(s, 0);
  REQUIRE(last.done);
}
