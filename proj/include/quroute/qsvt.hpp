#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "quroute/block_encoding.hpp"
#include "quroute/circuit.hpp"
#include "quroute/errors.hpp"

namespace quroute {

// Phase angles of a degree-d polynomial transformation; d+1 phases.
struct QsvtPhaseSequence {
  std::vector<double> phases;

  int degree() const { return static_cast<int>(phases.size()) - 1; }
  bool odd() const { return degree() % 2 == 1; }
};

enum class ProjectorKind { system, extended };  // Pi vs Pi~ roles

// Appends e^{i phi (2 Pi - I)} where Pi projects onto flag_qubits == 0,
// built as: flag the subspace onto the auxiliary qubit, rotate the auxiliary
// with a Z phase, unflag. With one flag qubit this is the textbook
// CNOT / phase / CNOT sandwich; wider flags use the same sandwich with the
// generalized (open-controlled) flag flip synthesized from H, CNOT ladders,
// RZ and PhaseZ.
inline void append_projector_phase(CircuitSpec& spec, double phi,
                                   const std::vector<int>& flag_qubits, int aux_qubit) {
  if (flag_qubits.empty()) {
    // Pi = I: a bare global phase e^{i phi}.
    spec.add({GateKind::PhaseZ, aux_qubit, -1, AngleSource::fixed(2.0 * phi)});
    spec.add({GateKind::RZ, aux_qubit, -1, AngleSource::fixed(-2.0 * phi)});
    return;
  }
  const std::size_t k = flag_qubits.size() + 1;
  std::vector<int> wires = flag_qubits;
  wires.push_back(aux_qubit);
  std::vector<double> flip(std::size_t{1} << k, 0.0);
  const std::size_t aux_bit = std::size_t{1} << (k - 1);
  flip[aux_bit] = std::numbers::pi;  // flags all zero, aux 1 -> phase pi

  auto flag_flip = [&]() {
    spec.add({GateKind::H, aux_qubit, -1, {}});
    detail::append_diagonal_phase(spec, wires, flip);
    spec.add({GateKind::H, aux_qubit, -1, {}});
  };
  flag_flip();
  // e^{i phi Z} on the auxiliary: in-subspace states carry aux = 1.
  spec.add({GateKind::RZ, aux_qubit, -1, AngleSource::fixed(2.0 * phi)});
  flag_flip();
}

// Standalone projector-phase fragment on its own little register; `which`
// records whether the fragment plays the system or extended projector role
// (both project onto an all-zero flag register for square encodings).
inline CircuitSpec projector_phase(double phi, ProjectorKind which, int num_flag_qubits = 1) {
  (void)which;
  CircuitSpec spec;
  spec.num_qubits = num_flag_qubits + 1;
  std::vector<int> flags(num_flag_qubits);
  for (int i = 0; i < num_flag_qubits; ++i) flags[i] = i;
  append_projector_phase(spec, phi, flags, num_flag_qubits);
  validate_spec(spec);
  return spec;
}

struct QsvtSegment {
  enum class Kind { projector_system, projector_extended, unitary, unitary_dagger } kind;
  double phi = 0.0;          // projector segments only
  int phase_index = 0;       // 1-based phi subscript
  std::size_t gate_begin = 0;
  std::size_t gate_end = 0;  // half-open range in the emitted gate list
};

// Alternating phase sequence applied to a block encoding. The segment list
// records the emitted structure in circuit order (rightmost factor of the
// operator product first).
struct QsvtCircuit {
  CircuitSpec circuit;
  int system_qubits = 0;
  int ancilla_qubits = 0;
  int aux_qubit = 0;
  double alpha = 0.0;
  std::vector<QsvtSegment> segments;
};

inline constexpr int kMaxQsvtQubits = 12;

// Assembles the degree-d alternating product for the given phases:
//   even d:  [prod_{k=1}^{d/2} Pi_{phi_{2k-1}} U^+ Pi~_{phi_{2k}} U] Pi_{phi_{d+1}}
//   odd  d:  Pi~_{phi_1} U [prod_{k=1}^{(d-1)/2} Pi_{phi_{2k}} U^+ Pi~_{phi_{2k+1}} U] Pi_{phi_{d+1}}
// as a circuit (rightmost factor emitted first).
inline QsvtCircuit qsvt_circuit(const BlockEncoding& block, const QsvtPhaseSequence& phases) {
  const int d = phases.degree();
  if (d < 1) throw std::invalid_argument("QSVT needs at least 2 phases (degree >= 1)");
  const int total_qubits = block.system_qubits + block.ancilla_qubits + 1;
  if (total_qubits > kMaxQsvtQubits)
    throw capacity_error("QSVT circuit needs " + std::to_string(total_qubits) +
                         " qubits, max " + std::to_string(kMaxQsvtQubits));

  QsvtCircuit out;
  out.system_qubits = block.system_qubits;
  out.ancilla_qubits = block.ancilla_qubits;
  out.aux_qubit = block.system_qubits + block.ancilla_qubits;
  out.alpha = block.alpha;
  CircuitSpec& spec = out.circuit;
  spec.num_qubits = total_qubits;
  spec.init = BasisInit::all_zero;

  std::vector<int> flags(block.ancilla_qubits);
  for (int i = 0; i < block.ancilla_qubits; ++i) flags[i] = block.system_qubits + i;

  auto emit_projector = [&](int phase_index, ProjectorKind which) {
    QsvtSegment seg;
    seg.kind = which == ProjectorKind::system ? QsvtSegment::Kind::projector_system
                                              : QsvtSegment::Kind::projector_extended;
    seg.phi = phases.phases[phase_index - 1];
    seg.phase_index = phase_index;
    seg.gate_begin = spec.gates.size();
    append_projector_phase(spec, seg.phi, flags, out.aux_qubit);
    seg.gate_end = spec.gates.size();
    out.segments.push_back(seg);
  };
  auto emit_unitary = [&](bool dagger) {
    QsvtSegment seg;
    seg.kind = dagger ? QsvtSegment::Kind::unitary_dagger : QsvtSegment::Kind::unitary;
    seg.gate_begin = spec.gates.size();
    if (!dagger) {
      for (const Gate& g : block.circuit.gates) spec.add(g);
    } else {
      for (auto it = block.circuit.gates.rbegin(); it != block.circuit.gates.rend(); ++it) {
        Gate g = *it;
        if (gate_has_angle(g.kind)) g.angle = AngleSource::fixed(-g.angle.value);
        spec.add(g);
      }
    }
    seg.gate_end = spec.gates.size();
    out.segments.push_back(seg);
  };

  emit_projector(d + 1, ProjectorKind::system);
  if (d % 2 == 0) {
    for (int k = d / 2; k >= 1; --k) {
      emit_unitary(false);
      emit_projector(2 * k, ProjectorKind::extended);
      emit_unitary(true);
      emit_projector(2 * k - 1, ProjectorKind::system);
    }
  } else {
    for (int k = (d - 1) / 2; k >= 1; --k) {
      emit_unitary(false);
      emit_projector(2 * k + 1, ProjectorKind::extended);
      emit_unitary(true);
      emit_projector(2 * k, ProjectorKind::system);
    }
    emit_unitary(false);
    emit_projector(1, ProjectorKind::extended);
  }

  validate_spec(spec);
  return out;
}

// Top-left 2^s x 2^s block (ancillas and auxiliary all zero) of the
// assembled circuit.
inline std::vector<cplx> qsvt_block(const QsvtCircuit& qc) {
  const std::uint64_t dim = std::uint64_t{1} << qc.system_qubits;
  std::vector<Statevector> cols = circuit_columns(qc.circuit, dim);
  std::vector<cplx> block(dim * dim);
  for (std::uint64_t c = 0; c < dim; ++c)
    for (std::uint64_t r = 0; r < dim; ++r) block[r * dim + c] = cols[c].amps[r];
  return block;
}

}  // namespace quroute
