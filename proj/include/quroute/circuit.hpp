#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "quroute/errors.hpp"
#include "quroute/statevector.hpp"

namespace quroute {

enum class GateKind { H, RY, RZ, CRZ, CNOT, CZ, IsingZZ, PhaseZ };

inline std::string to_string(GateKind k) {
  switch (k) {
    case GateKind::H: return "H";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::CRZ: return "CRZ";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CZ: return "CZ";
    case GateKind::IsingZZ: return "IsingZZ";
    case GateKind::PhaseZ: return "PhaseZ";
  }
  return "?";
}

inline bool gate_has_angle(GateKind k) {
  return k == GateKind::RY || k == GateKind::RZ || k == GateKind::CRZ ||
         k == GateKind::IsingZZ || k == GateKind::PhaseZ;
}

// Where a parameterized gate takes its angle from: a literal value, one of
// the circuit's feature slots (state encoding) or trainable parameter slots.
struct AngleSource {
  enum class Kind { fixed, feature_slot, param_slot } kind = Kind::fixed;
  double value = 0.0;
  int index = -1;

  static AngleSource fixed(double v) { return {Kind::fixed, v, -1}; }
  static AngleSource feature(int i) { return {Kind::feature_slot, 0.0, i}; }
  static AngleSource param(int i) { return {Kind::param_slot, 0.0, i}; }
};

struct Gate {
  GateKind kind = GateKind::H;
  int q0 = 0;       // target; control for CRZ/CNOT/CZ
  int q1 = -1;      // second qubit (target of controlled gates)
  AngleSource angle;
};

// A replayable gate program. Feature slots carry encoded state data, param
// slots carry trainable angles; both are bound at execution time.
struct CircuitSpec {
  int num_qubits = 0;
  BasisInit init = BasisInit::all_zero;
  std::vector<Gate> gates;
  int num_param_slots = 0;
  int num_feature_slots = 0;

  void add(Gate g) { gates.push_back(g); }
};

inline void validate_spec(const CircuitSpec& spec) {
  for (const Gate& g : spec.gates) {
    const bool two_qubit = g.kind == GateKind::CRZ || g.kind == GateKind::CNOT ||
                           g.kind == GateKind::CZ || g.kind == GateKind::IsingZZ;
    if (g.q0 < 0 || g.q0 >= spec.num_qubits)
      throw std::invalid_argument("gate qubit out of range");
    if (two_qubit && (g.q1 < 0 || g.q1 >= spec.num_qubits || g.q1 == g.q0))
      throw std::invalid_argument("two-qubit gate needs distinct in-range qubits");
    if (g.angle.kind == AngleSource::Kind::feature_slot &&
        (g.angle.index < 0 || g.angle.index >= spec.num_feature_slots))
      throw std::invalid_argument("feature slot out of range");
    if (g.angle.kind == AngleSource::Kind::param_slot &&
        (g.angle.index < 0 || g.angle.index >= spec.num_param_slots))
      throw std::invalid_argument("param slot out of range");
  }
}

namespace detail {

// The gradient engine evaluates a circuit with exactly one gate's angle
// replaced; CRZ needs the two control branches shifted independently.
struct AngleOverride {
  int gate_index = -1;
  bool crz_branches = false;
  double a = 0.0;  // plain: replacement angle. crz: control-0 branch angle.
  double b = 0.0;  // crz: control-1 branch angle.
};

inline double resolve_angle(const Gate& g, std::span<const double> params,
                            std::span<const double> features) {
  switch (g.angle.kind) {
    case AngleSource::Kind::fixed: return g.angle.value;
    case AngleSource::Kind::feature_slot: return features[g.angle.index];
    case AngleSource::Kind::param_slot: return params[g.angle.index];
  }
  return 0.0;
}

inline void apply_gate_resolved(Statevector& sv, const Gate& g, double angle) {
  switch (g.kind) {
    case GateKind::H: apply_h(sv, g.q0); break;
    case GateKind::RY: apply_ry(sv, g.q0, angle); break;
    case GateKind::RZ: apply_rz(sv, g.q0, angle); break;
    case GateKind::CRZ: apply_crz(sv, g.q0, g.q1, angle); break;
    case GateKind::CNOT: apply_cnot(sv, g.q0, g.q1); break;
    case GateKind::CZ: apply_cz(sv, g.q0, g.q1); break;
    case GateKind::IsingZZ: apply_zz(sv, g.q0, g.q1, angle); break;
    case GateKind::PhaseZ: apply_phasez(sv, g.q0, angle); break;
  }
}

}  // namespace detail

// Single-gate application with an explicit resolved angle.
inline void apply_gate(Statevector& sv, const Gate& g, double resolved_angle = 0.0) {
  detail::apply_gate_resolved(sv, g, resolved_angle);
}

inline void run_circuit_into(const CircuitSpec& spec, std::span<const double> params,
                             std::span<const double> features, Statevector& sv,
                             const detail::AngleOverride* override_gate = nullptr) {
  if (static_cast<int>(params.size()) != spec.num_param_slots)
    throw std::invalid_argument("param vector length mismatch");
  if (static_cast<int>(features.size()) != spec.num_feature_slots)
    throw std::invalid_argument("feature vector length mismatch");
  if (sv.num_qubits != spec.num_qubits) {
    sv = init_state(spec.num_qubits, spec.init);
  } else {
    reset_state(sv, spec.init);
  }
  for (std::size_t i = 0; i < spec.gates.size(); ++i) {
    const Gate& g = spec.gates[i];
    if (override_gate && override_gate->gate_index == static_cast<int>(i)) {
      if (override_gate->crz_branches) {
        apply_crz_branches(sv, g.q0, g.q1, override_gate->a, override_gate->b);
      } else {
        detail::apply_gate_resolved(sv, g, override_gate->a);
      }
      continue;
    }
    detail::apply_gate_resolved(sv, g, detail::resolve_angle(g, params, features));
  }
}

inline Statevector run_circuit(const CircuitSpec& spec, std::span<const double> params = {},
                               std::span<const double> features = {}) {
  Statevector sv = init_state(spec.num_qubits, spec.init);
  run_circuit_into(spec, params, features, sv);
  return sv;
}

inline constexpr int kMaxUnitaryQubits = 12;

// Dense matrix of the circuit, column k = circuit applied to basis state k.
// Row-major, size 2^n x 2^n.
inline std::vector<cplx> unitary_of(const CircuitSpec& spec, std::span<const double> params = {},
                                    std::span<const double> features = {}) {
  if (spec.num_qubits > kMaxUnitaryQubits)
    throw capacity_error("unitary_of supports at most " + std::to_string(kMaxUnitaryQubits) +
                         " qubits");
  const std::uint64_t dim = std::uint64_t{1} << spec.num_qubits;
  std::vector<cplx> u(dim * dim, cplx(0.0, 0.0));
  Statevector sv = init_state(spec.num_qubits, BasisInit::all_zero);
  for (std::uint64_t col = 0; col < dim; ++col) {
    std::fill(sv.amps.begin(), sv.amps.end(), cplx(0.0, 0.0));
    sv.amps[col] = cplx(1.0, 0.0);
    for (const Gate& g : spec.gates)
      detail::apply_gate_resolved(sv, g, detail::resolve_angle(g, params, features));
    for (std::uint64_t row = 0; row < dim; ++row) u[row * dim + col] = sv.amps[row];
  }
  // Columns ignore spec.init on purpose: a unitary is basis-to-basis.
  return u;
}

// Columns of the circuit unitary restricted to the first `num_cols` basis
// states; enough for block-encoding checks without the full matrix.
inline std::vector<Statevector> circuit_columns(const CircuitSpec& spec, std::uint64_t num_cols,
                                                std::span<const double> params = {},
                                                std::span<const double> features = {}) {
  std::vector<Statevector> cols;
  cols.reserve(num_cols);
  for (std::uint64_t col = 0; col < num_cols; ++col) {
    Statevector sv = init_state(spec.num_qubits, BasisInit::all_zero);
    std::fill(sv.amps.begin(), sv.amps.end(), cplx(0.0, 0.0));
    sv.amps[col] = cplx(1.0, 0.0);
    for (const Gate& g : spec.gates)
      detail::apply_gate_resolved(sv, g, detail::resolve_angle(g, params, features));
    cols.push_back(std::move(sv));
  }
  return cols;
}

namespace detail {

// Z expectations on each observable qubit after a (possibly overridden) run.
inline void eval_observables(const CircuitSpec& spec, std::span<const double> params,
                             std::span<const double> features,
                             std::span<const int> observable_qubits, Statevector& scratch,
                             const AngleOverride* ov, std::span<double> out) {
  run_circuit_into(spec, params, features, scratch, ov);
  for (std::size_t i = 0; i < observable_qubits.size(); ++i)
    out[i] = expectation_z(scratch, observable_qubits[i]);
}

}  // namespace detail

// Parameter-shift Jacobian d<Z_obs>/d theta_j, exact for every gate kind in
// the inventory. Rotation generators with eigenvalues +-1 use the two-point
// +-pi/2 rule. CRZ has a three-eigenvalue generator, so each occurrence is
// differentiated through its RZ(theta/2) CNOT RZ(-theta/2) CNOT form: two
// +-pi/2 two-point rules on the half-angle branches (four evaluations).
// A slot feeding several gates accumulates the per-occurrence shifts.
inline std::vector<std::vector<double>> parameter_shift_gradient(
    const CircuitSpec& spec, std::span<const double> params, std::span<const double> features,
    std::span<const int> observable_qubits) {
  constexpr double half_pi = std::numbers::pi / 2.0;
  const std::size_t n_obs = observable_qubits.size();
  std::vector<std::vector<double>> jac(n_obs, std::vector<double>(spec.num_param_slots, 0.0));
  if (spec.num_param_slots == 0) return jac;

  Statevector scratch;
  std::vector<double> plus(n_obs), minus(n_obs);
  detail::AngleOverride ov;

  for (std::size_t gi = 0; gi < spec.gates.size(); ++gi) {
    const Gate& g = spec.gates[gi];
    if (g.angle.kind != AngleSource::Kind::param_slot) continue;
    const int slot = g.angle.index;
    const double theta = params[slot];
    ov.gate_index = static_cast<int>(gi);

    if (g.kind == GateKind::CRZ) {
      ov.crz_branches = true;
      // branch angles: control-0 gets s1+s2, control-1 gets theta+s1-s2
      const double shifts[2][2] = {{half_pi, 0.0}, {0.0, half_pi}};
      const double signs[2] = {0.5, -0.5};
      for (int which = 0; which < 2; ++which) {
        const double s1 = shifts[which][0], s2 = shifts[which][1];
        ov.a = s1 + s2;
        ov.b = theta + s1 - s2;
        detail::eval_observables(spec, params, features, observable_qubits, scratch, &ov, plus);
        ov.a = -(s1 + s2);
        ov.b = theta - s1 + s2;
        detail::eval_observables(spec, params, features, observable_qubits, scratch, &ov, minus);
        for (std::size_t o = 0; o < n_obs; ++o)
          jac[o][slot] += signs[which] * 0.5 * (plus[o] - minus[o]);
      }
    } else if (gate_has_angle(g.kind)) {
      ov.crz_branches = false;
      ov.a = theta + half_pi;
      detail::eval_observables(spec, params, features, observable_qubits, scratch, &ov, plus);
      ov.a = theta - half_pi;
      detail::eval_observables(spec, params, features, observable_qubits, scratch, &ov, minus);
      for (std::size_t o = 0; o < n_obs; ++o) jac[o][slot] += 0.5 * (plus[o] - minus[o]);
    }
  }
  return jac;
}

// Gradient of f = sum_i weights[i] * <Z_i> over the trainable slots; same
// shift rules as the Jacobian but combines observables per evaluation.
inline std::vector<double> parameter_shift_weighted(const CircuitSpec& spec,
                                                    std::span<const double> params,
                                                    std::span<const double> features,
                                                    std::span<const double> weights) {
  std::vector<int> qubits;
  std::vector<double> w;
  for (int q = 0; q < spec.num_qubits && q < static_cast<int>(weights.size()); ++q) {
    if (weights[q] != 0.0) {
      qubits.push_back(q);
      w.push_back(weights[q]);
    }
  }
  std::vector<double> grad(spec.num_param_slots, 0.0);
  if (qubits.empty() || spec.num_param_slots == 0) return grad;

  constexpr double half_pi = std::numbers::pi / 2.0;
  Statevector scratch;
  std::vector<double> zp(qubits.size()), zm(qubits.size());
  detail::AngleOverride ov;
  auto combine = [&](std::span<const double> z) {
    double f = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) f += w[i] * z[i];
    return f;
  };

  for (std::size_t gi = 0; gi < spec.gates.size(); ++gi) {
    const Gate& g = spec.gates[gi];
    if (g.angle.kind != AngleSource::Kind::param_slot) continue;
    const int slot = g.angle.index;
    const double theta = params[slot];
    ov.gate_index = static_cast<int>(gi);
    if (g.kind == GateKind::CRZ) {
      ov.crz_branches = true;
      const double shifts[2][2] = {{half_pi, 0.0}, {0.0, half_pi}};
      const double signs[2] = {0.5, -0.5};
      for (int which = 0; which < 2; ++which) {
        const double s1 = shifts[which][0], s2 = shifts[which][1];
        ov.a = s1 + s2;
        ov.b = theta + s1 - s2;
        detail::eval_observables(spec, params, features, qubits, scratch, &ov, zp);
        ov.a = -(s1 + s2);
        ov.b = theta - s1 + s2;
        detail::eval_observables(spec, params, features, qubits, scratch, &ov, zm);
        grad[slot] += signs[which] * 0.5 * (combine(zp) - combine(zm));
      }
    } else if (gate_has_angle(g.kind)) {
      ov.crz_branches = false;
      ov.a = theta + half_pi;
      detail::eval_observables(spec, params, features, qubits, scratch, &ov, zp);
      ov.a = theta - half_pi;
      detail::eval_observables(spec, params, features, qubits, scratch, &ov, zm);
      grad[slot] += 0.5 * (combine(zp) - combine(zm));
    }
  }
  return grad;
}

// Debug dump of a spec with its angle sources; used by golden-file tests.
inline nlohmann::json circuit_to_json(const CircuitSpec& spec) {
  nlohmann::json gates = nlohmann::json::array();
  for (const Gate& g : spec.gates) {
    nlohmann::json jg{{"kind", to_string(g.kind)}, {"q0", g.q0}};
    if (g.q1 >= 0) jg["q1"] = g.q1;
    switch (g.angle.kind) {
      case AngleSource::Kind::fixed:
        if (gate_has_angle(g.kind)) jg["angle"] = g.angle.value;
        break;
      case AngleSource::Kind::feature_slot: jg["feature_slot"] = g.angle.index; break;
      case AngleSource::Kind::param_slot: jg["param_slot"] = g.angle.index; break;
    }
    gates.push_back(jg);
  }
  return nlohmann::json{{"num_qubits", spec.num_qubits},
                        {"init", spec.init == BasisInit::all_plus ? "all_plus" : "all_zero"},
                        {"num_param_slots", spec.num_param_slots},
                        {"num_feature_slots", spec.num_feature_slots},
                        {"gates", gates}};
}

}  // namespace quroute
