#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "quroute/env.hpp"
#include "quroute/errors.hpp"
#include "quroute/instance.hpp"

namespace quroute {

struct PenaltyWeights {
  double visit = 1.0;       // Eq. 2 exactly-once (also guards one node per step)
  double capacity = 1.0;    // Eq. 3
  double window = 1.0;      // Eq. 5
  double precedence = 1.0;  // Eq. 6
};

// One shared scale: any single violation must cost more than the longest
// possible tour, so 2 * max travel leg * steps.
inline PenaltyWeights calibrated_penalties(double w_max, int num_steps) {
  const double scale = std::max(2.0 * w_max * num_steps, 1.0);
  return {scale, scale, scale, scale};
}

// Raw ingredients of the time-indexed binary model; customer indices run
// 0..N-1 (the depot is not a decision variable).
struct QuboProblem {
  int num_customers = 0;
  int num_steps = 0;     // T position steps, 1..T
  int num_vehicles = 1;  // K
  int capacity = 0;
  std::vector<double> travel;       // N x N minutes between customers
  std::vector<int> demand;          // signed, per customer
  std::vector<double> late_window;  // minutes, per customer
  std::vector<std::pair<int, int>> precedence;  // (pickup, delivery) customer pairs
  std::vector<int> node_of_customer;            // instance node id per customer

  double travel_at(int i, int j) const {
    return travel[static_cast<std::size_t>(i) * num_customers + j];
  }
  double& travel_ref(int i, int j) {
    return travel[static_cast<std::size_t>(i) * num_customers + j];
  }
};

inline QuboProblem qubo_problem_from_instance(const Instance& inst, int num_steps,
                                              int num_vehicles) {
  QuboProblem p;
  p.num_customers = inst.num_customers();
  p.num_steps = num_steps;
  p.num_vehicles = num_vehicles;
  p.capacity = inst.fleet.capacity;
  p.travel.assign(static_cast<std::size_t>(p.num_customers) * p.num_customers, 0.0);
  for (int i = 0; i < p.num_customers; ++i)
    for (int j = 0; j < p.num_customers; ++j) p.travel_ref(i, j) = inst.travel.at(i + 1, j + 1);
  for (int i = 1; i < inst.num_nodes(); ++i) {
    p.demand.push_back(inst.nodes[i].demand);
    p.late_window.push_back(inst.nodes[i].late_window_min);
    p.node_of_customer.push_back(i);
    if (inst.nodes[i].kind == NodeKind::pickup)
      p.precedence.emplace_back(i - 1, inst.nodes[i].partner - 1);
  }
  return p;
}

// Binary model over x_{i,t}^k with flat index k*(T*N) + (t-1)*N + i.
// Energy = constant + sum l_a x_a + sum_{a<b} Q_ab x_a x_b.
struct QuboModel {
  int num_customers = 0;
  int num_steps = 0;
  int num_vehicles = 1;
  int num_vars = 0;
  double constant = 0.0;
  std::vector<double> linear;
  std::vector<double> quadratic;  // dense row-major, upper triangle holds coefficients
  PenaltyWeights penalties;
  std::vector<int> node_of_customer;

  int var(int customer, int step, int vehicle) const {
    return vehicle * (num_steps * num_customers) + (step - 1) * num_customers + customer;
  }
  // Inverse of var(): (customer, step, vehicle).
  std::array<int, 3> var_coords(int flat) const {
    const int per_vehicle = num_steps * num_customers;
    const int vehicle = flat / per_vehicle;
    const int rem = flat % per_vehicle;
    return {rem % num_customers, rem / num_customers + 1, vehicle};
  }
  void add_linear(int a, double v) { linear[a] += v; }
  void add_quadratic(int a, int b, double v) {
    if (a == b) {
      linear[a] += v;  // x^2 = x for binaries
      return;
    }
    if (a > b) std::swap(a, b);
    quadratic[static_cast<std::size_t>(a) * num_vars + b] += v;
  }
};

inline constexpr int kMaxQuboVars = 256;  // dense desk-scale guard

inline QuboModel build_qubo(const QuboProblem& p, const PenaltyWeights& penalties) {
  const int n = p.num_customers;
  const int t_steps = p.num_steps;
  const int k_vehicles = p.num_vehicles;
  if (n > 0 && static_cast<long long>(t_steps) * k_vehicles < n)
    throw infeasible_error("T*K position steps cannot host all customers");
  QuboModel m;
  m.num_customers = n;
  m.num_steps = t_steps;
  m.num_vehicles = k_vehicles;
  m.num_vars = n * t_steps * k_vehicles;
  if (m.num_vars > kMaxQuboVars)
    throw capacity_error("QUBO with " + std::to_string(m.num_vars) + " variables exceeds the " +
                         std::to_string(kMaxQuboVars) + "-variable desk-scale cap");
  m.penalties = penalties;
  m.node_of_customer = p.node_of_customer;
  if (m.node_of_customer.empty())
    for (int i = 0; i < n; ++i) m.node_of_customer.push_back(i + 1);
  m.linear.assign(m.num_vars, 0.0);
  m.quadratic.assign(static_cast<std::size_t>(m.num_vars) * m.num_vars, 0.0);

  // Objective: travel between consecutive position steps of one vehicle.
  for (int k = 0; k < k_vehicles; ++k)
    for (int t = 1; t < t_steps; ++t)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          m.add_quadratic(m.var(i, t, k), m.var(j, t + 1, k), p.travel_at(i, j));
        }

  // Visit each customer exactly once: (sum x - 1)^2.
  for (int i = 0; i < n; ++i) {
    std::vector<int> vars;
    for (int k = 0; k < k_vehicles; ++k)
      for (int t = 1; t <= t_steps; ++t) vars.push_back(m.var(i, t, k));
    m.constant += penalties.visit;
    for (int a : vars) m.add_linear(a, -penalties.visit);
    for (std::size_t a = 0; a < vars.size(); ++a)
      for (std::size_t b = a + 1; b < vars.size(); ++b)
        m.add_quadratic(vars[a], vars[b], 2.0 * penalties.visit);
  }

  // At most one customer per (vehicle, step) slot.
  for (int k = 0; k < k_vehicles; ++k)
    for (int t = 1; t <= t_steps; ++t)
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          m.add_quadratic(m.var(i, t, k), m.var(j, t, k), penalties.visit);

  // Capacity, slack-free: two consecutive pickups whose joint demand exceeds
  // the capacity put at least that much on board, whatever else happened.
  // Quadratic in x and never charges a feasible order; longer overloaded
  // pickup runs are only caught pairwise.
  for (int k = 0; k < k_vehicles; ++k)
    for (int t = 1; t < t_steps; ++t)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j || p.demand[i] <= 0 || p.demand[j] <= 0) continue;
          const double overload = p.demand[i] + p.demand[j] - p.capacity;
          if (overload > 0)
            m.add_quadratic(m.var(i, t, k), m.var(j, t + 1, k),
                            penalties.capacity * overload * overload);
        }

  // Time windows, linearized: charge a leg (i at t) -> (j at t+1) when even
  // the fastest possible prefix plus that leg already misses l_j.
  double w_min = 0.0;
  {
    bool found = false;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && (!found || p.travel_at(i, j) < w_min)) {
          w_min = p.travel_at(i, j);
          found = true;
        }
  }
  for (int k = 0; k < k_vehicles; ++k)
    for (int t = 1; t < t_steps; ++t)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          const double earliest_arrival = (t - 1) * w_min + p.travel_at(i, j);
          const double viol = earliest_arrival - p.late_window[j];
          if (viol > 0)
            m.add_quadratic(m.var(i, t, k), m.var(j, t + 1, k), penalties.window * viol * viol);
        }

  // Precedence: a delivery may not sit at or before its pickup's step, nor on
  // a different vehicle.
  for (const auto& [pickup, delivery] : p.precedence) {
    for (int k = 0; k < k_vehicles; ++k)
      for (int tp = 1; tp <= t_steps; ++tp)
        for (int td = 1; td <= tp; ++td)
          m.add_quadratic(m.var(pickup, tp, k), m.var(delivery, td, k), penalties.precedence);
    for (int kp = 0; kp < k_vehicles; ++kp)
      for (int kd = 0; kd < k_vehicles; ++kd) {
        if (kp == kd) continue;
        for (int tp = 1; tp <= t_steps; ++tp)
          for (int td = 1; td <= t_steps; ++td)
            m.add_quadratic(m.var(pickup, tp, kp), m.var(delivery, td, kd),
                            penalties.precedence);
      }
  }
  return m;
}

inline QuboModel build_qubo(const Instance& inst, int num_steps, int num_vehicles,
                            const PenaltyWeights& penalties) {
  return build_qubo(qubo_problem_from_instance(inst, num_steps, num_vehicles), penalties);
}

inline QuboModel build_qubo(const Instance& inst, int num_steps, int num_vehicles) {
  return build_qubo(inst, num_steps, num_vehicles,
                    calibrated_penalties(inst.travel.max_entry(), num_steps));
}

inline double qubo_energy(const QuboModel& m, const std::vector<std::uint8_t>& bits) {
  if (static_cast<int>(bits.size()) != m.num_vars)
    throw std::invalid_argument("assignment length mismatch");
  double e = m.constant;
  for (int a = 0; a < m.num_vars; ++a) {
    if (!bits[a]) continue;
    e += m.linear[a];
    const std::size_t row = static_cast<std::size_t>(a) * m.num_vars;
    for (int b = a + 1; b < m.num_vars; ++b)
      if (bits[b]) e += m.quadratic[row + b];
  }
  return e;
}

inline std::vector<std::uint8_t> bits_from_index(std::uint64_t index, int num_vars) {
  std::vector<std::uint8_t> bits(num_vars, 0);
  for (int a = 0; a < num_vars; ++a) bits[a] = (index >> a) & 1u;
  return bits;
}

// Routes plus per-constraint violation counts extracted from a bitstring.
struct DecodedAssignment {
  std::vector<std::vector<int>> routes;  // instance node ids, depot-wrapped
  int visit_violations = 0;              // Eq. 2 (and slot double-occupancy)
  int capacity_violations = 0;           // Eq. 3, replayed running load
  int window_violations = 0;             // Eq. 5, cumulative travel reading
  int precedence_violations = 0;         // Eq. 6
  bool feasible() const {
    return visit_violations == 0 && capacity_violations == 0 && window_violations == 0 &&
           precedence_violations == 0;
  }
};

inline DecodedAssignment decode_assignment(const QuboProblem& p, const QuboModel& m,
                                           const std::vector<std::uint8_t>& bits) {
  if (static_cast<int>(bits.size()) != m.num_vars)
    throw std::invalid_argument("assignment length mismatch");
  DecodedAssignment out;
  const int n = m.num_customers;
  std::vector<int> visit_count(n, 0);
  std::vector<int> vehicle_of(n, -1), step_of(n, -1);

  for (int k = 0; k < m.num_vehicles; ++k) {
    std::vector<int> route{0};
    double clock = 0.0;
    int load = 0;
    int previous = -1;
    for (int t = 1; t <= m.num_steps; ++t) {
      std::vector<int> here;
      for (int i = 0; i < n; ++i)
        if (bits[m.var(i, t, k)]) here.push_back(i);
      if (here.size() > 1) out.visit_violations += static_cast<int>(here.size()) - 1;
      for (int i : here) {
        visit_count[i] += 1;
        if (vehicle_of[i] < 0) {
          vehicle_of[i] = k;
          step_of[i] = t;
        }
        if (previous >= 0) clock += p.travel_at(previous, i);
        if (clock > p.late_window[i]) out.window_violations += 1;
        load += p.demand[i];
        if (load > p.capacity) out.capacity_violations += 1;
        route.push_back(m.node_of_customer[i]);
        previous = i;
      }
    }
    route.push_back(0);
    if (route.size() > 2) out.routes.push_back(route);
  }

  for (int i = 0; i < n; ++i)
    if (visit_count[i] != 1) out.visit_violations += std::abs(visit_count[i] - 1);
  for (const auto& [pickup, delivery] : p.precedence) {
    if (vehicle_of[pickup] < 0 || vehicle_of[delivery] < 0) continue;  // visit violation already
    if (vehicle_of[pickup] != vehicle_of[delivery] || step_of[delivery] <= step_of[pickup])
      out.precedence_violations += 1;
  }
  return out;
}

// ---- JSON export ------------------------------------------------------------

inline nlohmann::json qubo_to_json(const QuboModel& m) {
  nlohmann::json idx = nlohmann::json::array();
  for (int a = 0; a < m.num_vars; ++a) {
    const auto [customer, step, vehicle] = m.var_coords(a);
    idx.push_back({m.node_of_customer[customer], step, vehicle});
  }
  nlohmann::json quad = nlohmann::json::array();
  for (int a = 0; a < m.num_vars; ++a)
    for (int b = a + 1; b < m.num_vars; ++b) {
      const double v = m.quadratic[static_cast<std::size_t>(a) * m.num_vars + b];
      if (v != 0.0) quad.push_back({a, b, v});
    }
  return nlohmann::json{{"num_vars", m.num_vars},
                        {"var_index", idx},
                        {"quadratic", quad},
                        {"linear", m.linear},
                        {"constant", m.constant},
                        {"penalties",
                         {{"visit", m.penalties.visit},
                          {"capacity", m.penalties.capacity},
                          {"window", m.penalties.window},
                          {"precedence", m.penalties.precedence}}}};
}

}  // namespace quroute
