// Test-side oracles, kept independent of the library's gate kernels: dense
// gate matrices assembled from the textbook definitions, matrix-chain
// circuit evaluation, finite differences, and the singular-subspace QSVT
// reference.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "quroute/circuit.hpp"
#include "quroute/instance.hpp"
#include "quroute/rng.hpp"

namespace oracles {

using quroute::AngleSource;
using quroute::CircuitSpec;
using quroute::Gate;
using quroute::GateKind;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using cplxd = std::complex<double>;

inline Mat gate_matrix_local(const Gate& g, double angle) {
  const cplxd i(0.0, 1.0);
  switch (g.kind) {
    case GateKind::H: {
      Mat m(2, 2);
      const double s = 1.0 / std::sqrt(2.0);
      m << s, s, s, -s;
      return m;
    }
    case GateKind::RY: {
      Mat m(2, 2);
      m << std::cos(angle / 2), -std::sin(angle / 2), std::sin(angle / 2), std::cos(angle / 2);
      return m;
    }
    case GateKind::RZ: {
      Mat m = Mat::Zero(2, 2);
      m(0, 0) = std::exp(-i * angle / 2.0);
      m(1, 1) = std::exp(i * angle / 2.0);
      return m;
    }
    case GateKind::PhaseZ: {
      Mat m = Mat::Zero(2, 2);
      m(0, 0) = 1.0;
      m(1, 1) = std::exp(i * angle);
      return m;
    }
    // two-qubit gates: local bit 0 = q0 (control), local bit 1 = q1
    case GateKind::CNOT: {
      Mat m = Mat::Zero(4, 4);
      m(0, 0) = 1.0;
      m(2, 2) = 1.0;
      m(3, 1) = 1.0;  // control=1,target=0 -> target flips
      m(1, 3) = 1.0;
      return m;
    }
    case GateKind::CZ: {
      Mat m = Mat::Identity(4, 4);
      m(3, 3) = -1.0;
      return m;
    }
    case GateKind::CRZ: {
      Mat m = Mat::Identity(4, 4);
      m(1, 1) = std::exp(-i * angle / 2.0);  // control=1, target=0
      m(3, 3) = std::exp(i * angle / 2.0);   // control=1, target=1
      return m;
    }
    case GateKind::IsingZZ: {
      Mat m = Mat::Identity(4, 4);
      m(0, 0) = std::exp(-i * angle / 2.0);
      m(3, 3) = std::exp(-i * angle / 2.0);
      m(1, 1) = std::exp(i * angle / 2.0);
      m(2, 2) = std::exp(i * angle / 2.0);
      return m;
    }
  }
  return Mat::Identity(2, 2);
}

// Embeds a local gate matrix into the full 2^n space by index arithmetic.
inline Mat embed(const Mat& local, const std::vector<int>& qubits, int num_qubits) {
  const std::size_t dim = std::size_t{1} << num_qubits;
  const int k = static_cast<int>(qubits.size());
  Mat full = Mat::Zero(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t local_col = 0;
    for (int b = 0; b < k; ++b)
      if (col & (std::size_t{1} << qubits[b])) local_col |= std::size_t{1} << b;
    std::size_t base = col;
    for (int b = 0; b < k; ++b) base &= ~(std::size_t{1} << qubits[b]);
    for (std::size_t local_row = 0; local_row < (std::size_t{1} << k); ++local_row) {
      const cplxd v = local(local_row, local_col);
      if (v == cplxd(0.0, 0.0)) continue;
      std::size_t row = base;
      for (int b = 0; b < k; ++b)
        if (local_row & (std::size_t{1} << b)) row |= std::size_t{1} << qubits[b];
      full(row, col) = v;
    }
  }
  return full;
}

inline Mat gate_matrix_full(const Gate& g, double angle, int num_qubits) {
  const bool two = g.kind == GateKind::CNOT || g.kind == GateKind::CZ ||
                   g.kind == GateKind::CRZ || g.kind == GateKind::IsingZZ;
  std::vector<int> qubits{g.q0};
  if (two) qubits.push_back(g.q1);
  return embed(gate_matrix_local(g, angle), qubits, num_qubits);
}

inline double resolve(const Gate& g, const std::vector<double>& params,
                      const std::vector<double>& features) {
  switch (g.angle.kind) {
    case AngleSource::Kind::fixed: return g.angle.value;
    case AngleSource::Kind::feature_slot: return features[g.angle.index];
    case AngleSource::Kind::param_slot: return params[g.angle.index];
  }
  return 0.0;
}

inline Vec initial_vector(const CircuitSpec& spec) {
  const std::size_t dim = std::size_t{1} << spec.num_qubits;
  Vec v = Vec::Zero(dim);
  if (spec.init == quroute::BasisInit::all_zero) {
    v(0) = 1.0;
  } else {
    const double a = std::pow(2.0, -0.5 * spec.num_qubits);
    for (std::size_t x = 0; x < dim; ++x) v(x) = a;
  }
  return v;
}

// Reference statevector via dense matrix products.
inline Vec run_dense(const CircuitSpec& spec, const std::vector<double>& params = {},
                     const std::vector<double>& features = {}) {
  Vec v = initial_vector(spec);
  for (const Gate& g : spec.gates)
    v = gate_matrix_full(g, resolve(g, params, features), spec.num_qubits) * v;
  return v;
}

inline Mat unitary_dense(const CircuitSpec& spec, const std::vector<double>& params = {},
                         const std::vector<double>& features = {}) {
  const std::size_t dim = std::size_t{1} << spec.num_qubits;
  Mat u = Mat::Identity(dim, dim);
  for (const Gate& g : spec.gates)
    u = gate_matrix_full(g, resolve(g, params, features), spec.num_qubits) * u;
  return u;
}

inline double central_difference(const std::function<double(double)>& f, double x,
                                 double h = 1e-4) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Reference for the QSVT block: apply the alternating product inside each
// 2x2 singular subspace of A/alpha and resum over eigenpairs.
inline Mat qsvt_reference_block(const std::vector<double>& a, int dim, double alpha,
                                const std::vector<double>& phases) {
  Eigen::MatrixXd sub(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) sub(r, c) = a[static_cast<std::size_t>(r) * dim + c] / alpha;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
  const int d = static_cast<int>(phases.size()) - 1;
  Mat out = Mat::Zero(dim, dim);
  auto E = [](double phi) {
    Eigen::Matrix2cd e = Eigen::Matrix2cd::Zero();
    e(0, 0) = std::polar(1.0, phi);
    e(1, 1) = std::polar(1.0, -phi);
    return e;
  };
  for (int i = 0; i < dim; ++i) {
    const double lambda = es.eigenvalues()(i);
    const double sigma = std::abs(lambda);
    const double tau = std::sqrt(std::max(0.0, 1.0 - sigma * sigma));
    Eigen::Matrix2cd M;
    M << sigma, tau, tau, -sigma;
    Eigen::Matrix2cd P = Eigen::Matrix2cd::Identity();
    if (d % 2 == 0) {
      for (int k = 1; k <= d / 2; ++k) P = P * E(phases[2 * k - 2]) * M * E(phases[2 * k - 1]) * M;
      P = P * E(phases[d]);
    } else {
      P = E(phases[0]) * M;
      for (int k = 1; k <= (d - 1) / 2; ++k)
        P = P * E(phases[2 * k - 1]) * M * E(phases[2 * k]) * M;
      P = P * E(phases[d]);
    }
    const cplxd p = P(0, 0);
    const Eigen::VectorXd v = es.eigenvectors().col(i);
    const double sgn = lambda < 0.0 ? -1.0 : 1.0;
    const Mat vvt = (v * v.transpose()).cast<cplxd>();
    out += (d % 2 == 1 ? p * sgn : p) * vvt;
  }
  return out;
}

// Deterministic random circuit over the whole gate inventory.
inline CircuitSpec random_circuit(quroute::Rng& rng, int num_qubits, int num_gates,
                                  int param_slots, int feature_slots) {
  CircuitSpec spec;
  spec.num_qubits = num_qubits;
  spec.init = rng.uniform() < 0.5 ? quroute::BasisInit::all_zero : quroute::BasisInit::all_plus;
  spec.num_param_slots = param_slots;
  spec.num_feature_slots = feature_slots;
  const GateKind kinds[] = {GateKind::H,  GateKind::RY,      GateKind::RZ,    GateKind::CRZ,
                            GateKind::CNOT, GateKind::CZ,    GateKind::IsingZZ, GateKind::PhaseZ};
  for (int i = 0; i < num_gates; ++i) {
    Gate g;
    g.kind = kinds[rng.uniform_index(8)];
    g.q0 = static_cast<int>(rng.uniform_index(num_qubits));
    const bool two = g.kind == GateKind::CNOT || g.kind == GateKind::CZ ||
                     g.kind == GateKind::CRZ || g.kind == GateKind::IsingZZ;
    if (two) {
      if (num_qubits < 2) { g.kind = GateKind::RY; }
      else {
        do { g.q1 = static_cast<int>(rng.uniform_index(num_qubits)); } while (g.q1 == g.q0);
      }
    }
    if (quroute::gate_has_angle(g.kind)) {
      const double pick = rng.uniform();
      if (param_slots > 0 && pick < 0.4)
        g.angle = AngleSource::param(static_cast<int>(rng.uniform_index(param_slots)));
      else if (feature_slots > 0 && pick < 0.6)
        g.angle = AngleSource::feature(static_cast<int>(rng.uniform_index(feature_slots)));
      else
        g.angle = AngleSource::fixed(rng.uniform(-3.0, 3.0));
    }
    spec.add(g);
  }
  return spec;
}

inline std::vector<double> random_symmetric(quroute::Rng& rng, int dim, double lo = -1.0,
                                            double hi = 1.0) {
  std::vector<double> a(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      const double v = rng.uniform(lo, hi);
      a[static_cast<std::size_t>(i) * dim + j] = v;
      a[static_cast<std::size_t>(j) * dim + i] = v;
    }
  return a;
}

// Hand-assembled instance for tests that pin exact geometry.
inline quroute::Instance manual_instance(const std::vector<std::array<double, 2>>& coords,
                                         const std::vector<int>& pickup_demands,
                                         const std::vector<double>& windows, int capacity = 5,
                                         int vehicles = 1, double speed_mps = 20.0) {
  using namespace quroute;
  Instance inst;
  inst.fleet = FleetSpec{vehicles, capacity, speed_mps};
  RequestNode depot;
  depot.id = 0;
  depot.kind = NodeKind::depot;
  depot.coord = coords[0];
  inst.nodes.push_back(depot);
  const int n_requests = static_cast<int>(pickup_demands.size());
  for (int r = 0; r < n_requests; ++r) {
    RequestNode pickup;
    pickup.id = 1 + 2 * r;
    pickup.kind = NodeKind::pickup;
    pickup.coord = coords[1 + 2 * r];
    pickup.demand = pickup_demands[r];
    pickup.late_window_min = windows[2 * r];
    pickup.partner = pickup.id + 1;
    RequestNode delivery;
    delivery.id = pickup.id + 1;
    delivery.kind = NodeKind::delivery;
    delivery.coord = coords[2 + 2 * r];
    delivery.demand = -pickup.demand;
    delivery.late_window_min = windows[2 * r + 1];
    delivery.partner = pickup.id;
    inst.nodes.push_back(pickup);
    inst.nodes.push_back(delivery);
  }
  inst.travel = travel_time_matrix(inst.nodes, speed_mps);
  double max_window = 0.0;
  for (int i = 1; i < inst.num_nodes(); ++i)
    max_window = std::max(max_window, inst.nodes[i].late_window_min);
  inst.horizon_min = max_window + inst.travel.max_entry();
  validate_instance(inst);
  return inst;
}

}  // namespace oracles
