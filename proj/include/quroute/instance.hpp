#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "quroute/errors.hpp"
#include "quroute/rng.hpp"

namespace quroute {

enum class NodeKind { depot, pickup, delivery };

inline std::string to_string(NodeKind k) {
  switch (k) {
    case NodeKind::depot: return "depot";
    case NodeKind::pickup: return "pickup";
    case NodeKind::delivery: return "delivery";
  }
  return "depot";
}

inline NodeKind node_kind_from_string(const std::string& s) {
  if (s == "depot") return NodeKind::depot;
  if (s == "pickup") return NodeKind::pickup;
  if (s == "delivery") return NodeKind::delivery;
  throw std::invalid_argument("unknown node kind: " + s);
}

// One vertex of the request graph. Coordinates are kilometres, windows are
// minutes. demand is positive for pickups and the negated pickup demand for
// the paired delivery; the depot carries demand 0 and no window.
struct RequestNode {
  int id = 0;
  NodeKind kind = NodeKind::depot;
  std::array<double, 2> coord{0.0, 0.0};
  int demand = 0;
  double late_window_min = 0.0;  // l_i; meaningless for the depot
  int partner = -1;              // paired pickup/delivery; -1 for the depot
};

struct FleetSpec {
  int num_vehicles = 1;  // K
  int capacity = 5;      // Q_k, uniform across the fleet
  double speed_mps = 20.0;
};

// Symmetric minute-valued travel times, zero diagonal.
struct TravelMatrix {
  int size = 0;
  std::vector<double> entries;  // row-major (size x size)

  double at(int i, int j) const { return entries[static_cast<std::size_t>(i) * size + j]; }
  double& at(int i, int j) { return entries[static_cast<std::size_t>(i) * size + j]; }

  double max_entry() const {
    double m = 0.0;
    for (double v : entries) m = std::max(m, v);
    return m;
  }
  // Smallest strictly positive off-diagonal entry; 0 when none exists.
  double min_positive_entry() const {
    double m = 0.0;
    bool found = false;
    for (double v : entries)
      if (v > 0.0 && (!found || v < m)) { m = v; found = true; }
    return found ? m : 0.0;
  }
};

struct Instance {
  std::vector<RequestNode> nodes;  // depot at index 0
  FleetSpec fleet;
  TravelMatrix travel;
  double horizon_min = 0.0;  // T = max late window + travel diameter
  std::uint64_t seed = 0;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_customers() const { return num_nodes() - 1; }
  int num_requests() const { return num_customers() / 2; }
};

struct GenParams {
  double coord_lo_km = 0.0;
  double coord_hi_km = 1.0;
  int demand_lo = 1;
  int demand_hi = 3;
  double window_lo_min = 20.0;
  double window_hi_min = 40.0;
};

// w_ij = Euclidean distance (km) converted to minutes at the fleet speed.
inline TravelMatrix travel_time_matrix(const std::vector<RequestNode>& nodes,
                                       double speed_mps) {
  if (speed_mps <= 0.0) throw std::invalid_argument("vehicle speed must be positive");
  const int n = static_cast<int>(nodes.size());
  TravelMatrix m;
  m.size = n;
  m.entries.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (const RequestNode& node : nodes)
    if (!std::isfinite(node.coord[0]) || !std::isfinite(node.coord[1]))
      throw std::invalid_argument("non-finite node coordinate");
  const double min_per_km = 1000.0 / (speed_mps * 60.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dx = nodes[i].coord[0] - nodes[j].coord[0];
      const double dy = nodes[i].coord[1] - nodes[j].coord[1];
      const double w = std::sqrt(dx * dx + dy * dy) * min_per_km;
      m.at(i, j) = w;
      m.at(j, i) = w;
    }
  }
  return m;
}

inline void validate_instance(const Instance& inst) {
  const int n = inst.num_nodes();
  if (n < 1 || inst.nodes[0].kind != NodeKind::depot)
    throw std::invalid_argument("instance must have a depot at node 0");
  if ((n - 1) % 2 != 0)
    throw std::invalid_argument("customer count must be even (pickup/delivery pairs)");
  if (inst.fleet.num_vehicles < 1) throw std::invalid_argument("fleet needs >= 1 vehicle");
  for (int i = 1; i < n; ++i) {
    const RequestNode& node = inst.nodes[i];
    if (node.kind == NodeKind::depot) throw std::invalid_argument("duplicate depot");
    if (node.partner < 1 || node.partner >= n || node.partner == i)
      throw std::invalid_argument("node " + std::to_string(i) + " has invalid partner");
    const RequestNode& mate = inst.nodes[node.partner];
    if (mate.partner != i)
      throw std::invalid_argument("partner relation is not symmetric at node " + std::to_string(i));
    if (node.kind == NodeKind::pickup) {
      if (node.demand <= 0) throw std::invalid_argument("pickup demand must be positive");
      if (mate.kind != NodeKind::delivery || mate.demand != -node.demand)
        throw std::invalid_argument("delivery demand must negate its pickup");
      if (node.demand > inst.fleet.capacity)
        throw infeasible_error("pickup demand exceeds vehicle capacity");
    }
  }
  if (inst.travel.size != n) throw std::invalid_argument("travel matrix size mismatch");
}

// Deterministic instance sampler. Coordinates uniform on the square,
// pickup demands uniform integers, delivery windows at or after the paired
// pickup window so instances stay servable on time.
inline Instance generate_instance(std::uint64_t seed, int n_requests,
                                  const FleetSpec& fleet = FleetSpec{},
                                  const GenParams& gen = GenParams{}) {
  if (n_requests < 0) throw std::invalid_argument("n_requests must be >= 0");
  if (fleet.capacity < gen.demand_hi)
    throw infeasible_error("fleet capacity " + std::to_string(fleet.capacity) +
                           " cannot carry the largest demand " + std::to_string(gen.demand_hi));
  Rng rng(seed);
  Instance inst;
  inst.seed = seed;
  inst.fleet = fleet;
  inst.nodes.reserve(1 + 2 * n_requests);

  RequestNode depot;
  depot.id = 0;
  depot.kind = NodeKind::depot;
  depot.coord = {rng.uniform(gen.coord_lo_km, gen.coord_hi_km),
                 rng.uniform(gen.coord_lo_km, gen.coord_hi_km)};
  inst.nodes.push_back(depot);

  for (int r = 0; r < n_requests; ++r) {
    RequestNode pickup;
    pickup.id = 1 + 2 * r;
    pickup.kind = NodeKind::pickup;
    pickup.coord = {rng.uniform(gen.coord_lo_km, gen.coord_hi_km),
                    rng.uniform(gen.coord_lo_km, gen.coord_hi_km)};
    pickup.demand = rng.uniform_int(gen.demand_lo, gen.demand_hi);
    pickup.late_window_min = rng.uniform(gen.window_lo_min, gen.window_hi_min);
    pickup.partner = pickup.id + 1;

    RequestNode delivery;
    delivery.id = pickup.id + 1;
    delivery.kind = NodeKind::delivery;
    delivery.coord = {rng.uniform(gen.coord_lo_km, gen.coord_hi_km),
                      rng.uniform(gen.coord_lo_km, gen.coord_hi_km)};
    delivery.demand = -pickup.demand;
    delivery.late_window_min = rng.uniform(pickup.late_window_min, gen.window_hi_min);
    delivery.partner = pickup.id;

    inst.nodes.push_back(pickup);
    inst.nodes.push_back(delivery);
  }

  inst.travel = travel_time_matrix(inst.nodes, fleet.speed_mps);
  double max_window = 0.0;
  for (int i = 1; i < inst.num_nodes(); ++i)
    max_window = std::max(max_window, inst.nodes[i].late_window_min);
  inst.horizon_min = max_window + inst.travel.max_entry();
  validate_instance(inst);
  return inst;
}

// ---- JSON wire format -----------------------------------------------------
//
// {nodes:[{id,kind,coord:[x,y],demand,late_window_min,partner}],
//  fleet:{num_vehicles,capacity,speed_mps}, seed}
// Travel times and the horizon are derived fields and are recomputed on load.

inline nlohmann::json to_json(const Instance& inst) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const RequestNode& n : inst.nodes) {
    nlohmann::json jn{{"id", n.id},
                      {"kind", to_string(n.kind)},
                      {"coord", {n.coord[0], n.coord[1]}},
                      {"demand", n.demand}};
    if (n.kind != NodeKind::depot) {
      jn["late_window_min"] = n.late_window_min;
      jn["partner"] = n.partner;
    }
    nodes.push_back(jn);
  }
  return nlohmann::json{{"nodes", nodes},
                        {"fleet",
                         {{"num_vehicles", inst.fleet.num_vehicles},
                          {"capacity", inst.fleet.capacity},
                          {"speed_mps", inst.fleet.speed_mps}}},
                        {"seed", inst.seed}};
}

inline Instance instance_from_json(const nlohmann::json& j) {
  Instance inst;
  inst.seed = j.value("seed", std::uint64_t{0});
  const auto& jf = j.at("fleet");
  inst.fleet.num_vehicles = jf.at("num_vehicles").get<int>();
  inst.fleet.capacity = jf.at("capacity").get<int>();
  inst.fleet.speed_mps = jf.at("speed_mps").get<double>();
  for (const auto& jn : j.at("nodes")) {
    RequestNode n;
    n.id = jn.at("id").get<int>();
    n.kind = node_kind_from_string(jn.at("kind").get<std::string>());
    n.coord = {jn.at("coord")[0].get<double>(), jn.at("coord")[1].get<double>()};
    n.demand = jn.at("demand").get<int>();
    if (n.kind != NodeKind::depot) {
      n.late_window_min = jn.at("late_window_min").get<double>();
      n.partner = jn.at("partner").get<int>();
    }
    inst.nodes.push_back(n);
  }
  inst.travel = travel_time_matrix(inst.nodes, inst.fleet.speed_mps);
  double max_window = 0.0;
  for (int i = 1; i < inst.num_nodes(); ++i)
    max_window = std::max(max_window, inst.nodes[i].late_window_min);
  inst.horizon_min = max_window + inst.travel.max_entry();
  validate_instance(inst);
  return inst;
}

// JSON-lines datasets: one instance object per line.
inline void write_dataset(const std::string& path, const std::vector<Instance>& instances) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  for (const Instance& inst : instances) out << to_json(inst).dump() << '\n';
  if (!out) throw io_error("write failed: " + path);
}

inline std::vector<Instance> read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open for reading: " + path);
  std::vector<Instance> instances;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    instances.push_back(instance_from_json(nlohmann::json::parse(line)));
  }
  return instances;
}

}  // namespace quroute
