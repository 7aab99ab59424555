#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"
#include "quroute/circuit.hpp"
#include "quroute/env.hpp"
#include "quroute/errors.hpp"
#include "quroute/instance.hpp"
#include "quroute/rng.hpp"

namespace quroute {

struct CircuitConfig {
  int layers = 1;          // p
  bool reupload = true;    // repeat the feature encodings in every layer
  double isingzz_scale = 1.0;
};

// Trainable parameter counts: p*(2N + N/2 + 2) quantum angles and a full
// affine readout of (N+1)^2 + (N+1) classical weights.
inline std::pair<int, int> num_trainable(const CircuitConfig& config, int n_customers) {
  if (n_customers < 0 || n_customers % 2 != 0)
    throw std::invalid_argument("customer count must be even (pickup/delivery pairs)");
  if (config.layers < 1) throw std::invalid_argument("layers must be >= 1");
  const int per_layer = 2 * n_customers + n_customers / 2 + 2;
  const int width = n_customers + 1;
  return {config.layers * per_layer, width * width + width};
}

// Two encoding angles per qubit: load then time, clamped to [-pi, pi].
// Qubit 0 is the depot and encodes (u_k/Q, t_k/T); qubit i encodes
// ((u_k - q_i)/Q, (t_k - l_i)/T) for node i.
inline std::vector<double> encode_features(const Instance& inst, const EnvState& state) {
  const int width = inst.num_nodes();
  const VehicleState& v = state.vehicles[state.active_vehicle];
  const double capacity = static_cast<double>(inst.fleet.capacity);
  const double horizon = inst.horizon_min;
  auto clamp_angle = [](double x) {
    return std::numbers::pi * std::clamp(x, -1.0, 1.0);
  };
  std::vector<double> f(2 * static_cast<std::size_t>(width), 0.0);
  f[0] = clamp_angle(v.load / capacity);
  f[1] = horizon > 0.0 ? clamp_angle(v.clock_min / horizon) : 0.0;
  for (int i = 1; i < width; ++i) {
    const RequestNode& node = inst.nodes[i];
    f[2 * i] = clamp_angle((v.load - node.demand) / capacity);
    f[2 * i + 1] =
        horizon > 0.0 ? clamp_angle((v.clock_min - node.late_window_min) / horizon) : 0.0;
  }
  return f;
}

// The problem-specific ansatz: a superposition layer, per-node load/time
// Y-rotations, a trainable CRZ entangler from each pickup to its delivery,
// fixed distance-scaled IsingZZ couplings inside the pickup set and inside
// the delivery set, and an RZ+RY variational pair on every qubit. Feature
// rotations repeat in every layer when reuploading is on; every layer owns
// fresh trainable angles.
inline CircuitSpec build_pqc(const Instance& inst, const CircuitConfig& config) {
  const int n_customers = inst.num_customers();
  if (n_customers % 2 != 0)
    throw std::invalid_argument("PQC needs an even customer count");
  if (config.layers < 1) throw std::invalid_argument("layers must be >= 1");
  const int width = n_customers + 1;
  if (width > kMaxSimQubits)
    throw capacity_error("instance needs " + std::to_string(width) + " qubits, max " +
                         std::to_string(kMaxSimQubits));

  CircuitSpec spec;
  spec.num_qubits = width;
  spec.init = BasisInit::all_zero;
  spec.num_feature_slots = 2 * width;
  const int per_layer = 2 * n_customers + n_customers / 2 + 2;
  spec.num_param_slots = config.layers * per_layer;

  std::vector<int> pickups, deliveries;
  for (int i = 1; i < width; ++i) {
    if (inst.nodes[i].kind == NodeKind::pickup) pickups.push_back(i);
    else deliveries.push_back(i);
  }
  const double w_max = inst.travel.max_entry();

  for (int layer = 0; layer < config.layers; ++layer) {
    const int base = layer * per_layer;
    if (layer == 0)
      for (int q = 0; q < width; ++q) spec.add({GateKind::H, q, -1, {}});
    if (layer == 0 || config.reupload) {
      for (int q = 0; q < width; ++q) {
        spec.add({GateKind::RY, q, -1, AngleSource::feature(2 * q)});
        spec.add({GateKind::RY, q, -1, AngleSource::feature(2 * q + 1)});
      }
    }
    for (std::size_t r = 0; r < pickups.size(); ++r) {
      const int pickup = pickups[r];
      const int delivery = inst.nodes[pickup].partner;
      spec.add({GateKind::CRZ, pickup, delivery, AngleSource::param(base + static_cast<int>(r))});
    }
    auto add_zz_pairs = [&](const std::vector<int>& group) {
      for (std::size_t a = 0; a < group.size(); ++a) {
        for (std::size_t b = a + 1; b < group.size(); ++b) {
          const double w = inst.travel.at(group[a], group[b]);
          const double angle =
              w_max > 0.0 ? std::numbers::pi * (w / w_max) * config.isingzz_scale : 0.0;
          spec.add({GateKind::IsingZZ, group[a], group[b], AngleSource::fixed(angle)});
        }
      }
    };
    add_zz_pairs(pickups);
    add_zz_pairs(deliveries);
    const int rot_base = base + n_customers / 2;
    for (int q = 0; q < width; ++q) {
      spec.add({GateKind::RZ, q, -1, AngleSource::param(rot_base + 2 * q)});
      spec.add({GateKind::RY, q, -1, AngleSource::param(rot_base + 2 * q + 1)});
    }
  }
  validate_spec(spec);
  return spec;
}

// PQC Q-network: the circuit, its trainable angles, and an affine readout
// from the N+1 Pauli-Z expectations to N+1 action values.
struct PQCNetwork {
  CircuitConfig config;
  CircuitSpec spec;
  int num_nodes = 0;
  std::vector<double> theta;
  std::vector<double> readout_weight;  // row-major (num_nodes x num_nodes)
  std::vector<double> readout_bias;
};

inline PQCNetwork make_pqc_network(const Instance& inst, const CircuitConfig& config, Rng& rng) {
  PQCNetwork net;
  net.config = config;
  net.spec = build_pqc(inst, config);
  net.num_nodes = inst.num_nodes();
  net.theta.resize(net.spec.num_param_slots);
  for (double& t : net.theta) t = rng.uniform(-0.1, 0.1);
  const int w = net.num_nodes;
  net.readout_weight.resize(static_cast<std::size_t>(w) * w);
  const double scale = 1.0 / std::sqrt(static_cast<double>(w));
  for (double& x : net.readout_weight) x = rng.uniform(-scale, scale);
  net.readout_bias.assign(w, 0.0);
  return net;
}

inline std::vector<double> z_values(const CircuitSpec& spec, std::span<const double> theta,
                                    std::span<const double> features, Statevector& scratch) {
  run_circuit_into(spec, theta, features, scratch);
  std::vector<double> z(spec.num_qubits);
  for (int q = 0; q < spec.num_qubits; ++q) z[q] = expectation_z(scratch, q);
  return z;
}

inline std::vector<double> affine_readout(std::span<const double> weight,
                                          std::span<const double> bias,
                                          std::span<const double> z) {
  const int w = static_cast<int>(bias.size());
  std::vector<double> q(w, 0.0);
  for (int a = 0; a < w; ++a) {
    double acc = bias[a];
    for (int i = 0; i < w; ++i) acc += weight[static_cast<std::size_t>(a) * w + i] * z[i];
    q[a] = acc;
  }
  return q;
}

inline std::vector<double> q_values(const PQCNetwork& net, const Instance& inst,
                                    const EnvState& state) {
  if (inst.num_nodes() != net.num_nodes)
    throw std::invalid_argument("network was built for a different instance size");
  Statevector scratch;
  const std::vector<double> features = encode_features(inst, state);
  const std::vector<double> z = z_values(net.spec, net.theta, features, scratch);
  return affine_readout(net.readout_weight, net.readout_bias, z);
}

// Full gradient of q[action] with respect to (theta, readout_weight, bias).
struct PqcGradient {
  std::vector<double> theta;
  std::vector<double> readout_weight;  // only the action's row is nonzero
  std::vector<double> readout_bias;
};

inline PqcGradient grad_q(const PQCNetwork& net, const Instance& inst, const EnvState& state,
                          int action) {
  const int w = net.num_nodes;
  if (action < 0 || action >= w) throw std::invalid_argument("action out of range");
  PqcGradient g;
  Statevector scratch;
  const std::vector<double> features = encode_features(inst, state);
  const std::vector<double> z = z_values(net.spec, net.theta, features, scratch);

  const std::span<const double> row(net.readout_weight.data() + static_cast<std::size_t>(action) * w,
                                    static_cast<std::size_t>(w));
  g.theta = parameter_shift_weighted(net.spec, net.theta, features, row);
  g.readout_weight.assign(static_cast<std::size_t>(w) * w, 0.0);
  for (int i = 0; i < w; ++i) g.readout_weight[static_cast<std::size_t>(action) * w + i] = z[i];
  g.readout_bias.assign(w, 0.0);
  g.readout_bias[action] = 1.0;
  return g;
}

// ---- checkpoint format ------------------------------------------------------

inline nlohmann::json pqc_network_to_json(const PQCNetwork& net) {
  const int w = net.num_nodes;
  nlohmann::json weight = nlohmann::json::array();
  for (int a = 0; a < w; ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (int i = 0; i < w; ++i) row.push_back(net.readout_weight[static_cast<std::size_t>(a) * w + i]);
    weight.push_back(row);
  }
  return nlohmann::json{{"config",
                         {{"layers", net.config.layers},
                          {"reupload", net.config.reupload},
                          {"isingzz_scale", net.config.isingzz_scale}}},
                        {"theta", net.theta},
                        {"readout_weight", weight},
                        {"readout_bias", net.readout_bias},
                        {"instance_size", w}};
}

// Rebuilds the circuit from the instance the checkpoint will be applied to;
// the stored angles are portable across instances of the same size.
inline PQCNetwork pqc_network_from_json(const nlohmann::json& j, const Instance& inst) {
  PQCNetwork net;
  net.config.layers = j.at("config").at("layers").get<int>();
  net.config.reupload = j.at("config").at("reupload").get<bool>();
  net.config.isingzz_scale = j.at("config").at("isingzz_scale").get<double>();
  net.num_nodes = j.at("instance_size").get<int>();
  if (inst.num_nodes() != net.num_nodes)
    throw std::invalid_argument("checkpoint instance_size " + std::to_string(net.num_nodes) +
                                " does not match dataset node count " +
                                std::to_string(inst.num_nodes()));
  net.spec = build_pqc(inst, net.config);
  net.theta = j.at("theta").get<std::vector<double>>();
  if (static_cast<int>(net.theta.size()) != net.spec.num_param_slots)
    throw std::invalid_argument("checkpoint theta length mismatch");
  const int w = net.num_nodes;
  net.readout_weight.resize(static_cast<std::size_t>(w) * w);
  const auto& weight = j.at("readout_weight");
  for (int a = 0; a < w; ++a)
    for (int i = 0; i < w; ++i)
      net.readout_weight[static_cast<std::size_t>(a) * w + i] = weight[a][i].get<double>();
  net.readout_bias = j.at("readout_bias").get<std::vector<double>>();
  return net;
}

}  // namespace quroute
