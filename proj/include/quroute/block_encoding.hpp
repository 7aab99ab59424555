#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "quroute/circuit.hpp"
#include "quroute/errors.hpp"

namespace quroute {

namespace detail {

// ---- circuit synthesis building blocks -------------------------------------
//
// Everything below stays inside the fixed gate inventory. Two primitives
// cover all of it: exact diagonal unitaries (parity rotations from a
// Walsh-Hadamard transform of the phase table, global phase fixed with a
// PhaseZ/RZ pair) and multiplexed RY rotations for real state preparation.

// In-place Walsh-Hadamard transform; divides by the table size, so the
// output is the coefficient of (-1)^{popcount(x & S)} per subset S.
inline void walsh_transform(std::vector<double>& f) {
  const std::size_t n = f.size();
  for (std::size_t half = 1; half < n; half <<= 1) {
    for (std::size_t base = 0; base < n; base += 2 * half) {
      for (std::size_t i = base; i < base + half; ++i) {
        const double a = f[i], b = f[i + half];
        f[i] = a + b;
        f[i + half] = a - b;
      }
    }
  }
  for (double& v : f) v /= static_cast<double>(n);
}

// Appends gates implementing diag(e^{i f(x)}) on the listed qubits, where
// x is read little-endian over `qubits` (bit i of the table index = value
// of qubits[i]). Exact including global phase.
inline void append_diagonal_phase(CircuitSpec& spec, const std::vector<int>& qubits,
                                  std::vector<double> phase_table) {
  const std::size_t k = qubits.size();
  if (phase_table.size() != (std::size_t{1} << k))
    throw std::invalid_argument("phase table size must be 2^k");
  walsh_transform(phase_table);
  constexpr double eps = 1e-14;

  const double c0 = phase_table[0];
  if (std::abs(c0) > eps) {
    // e^{i c0} I on one wire: diag(1, e^{2i c0}) * diag(e^{i c0}, e^{-i c0})
    spec.add({GateKind::PhaseZ, qubits.empty() ? 0 : qubits[0], -1, AngleSource::fixed(2.0 * c0)});
    spec.add({GateKind::RZ, qubits.empty() ? 0 : qubits[0], -1, AngleSource::fixed(-2.0 * c0)});
  }
  for (std::size_t s = 1; s < phase_table.size(); ++s) {
    const double c = phase_table[s];
    if (std::abs(c) < eps) continue;
    std::vector<int> members;
    for (std::size_t i = 0; i < k; ++i)
      if (s & (std::size_t{1} << i)) members.push_back(qubits[i]);
    const int wire = members.back();
    for (std::size_t i = 0; i + 1 < members.size(); ++i)
      spec.add({GateKind::CNOT, members[i], wire, {}});
    // e^{i c Z_S}: RZ(-2c) on the parity wire
    spec.add({GateKind::RZ, wire, -1, AngleSource::fixed(-2.0 * c)});
    for (std::size_t i = members.size() - 1; i-- > 0;)
      spec.add({GateKind::CNOT, members[i], wire, {}});
  }
}

// Appends a multiplexed RY: RY(angles[pattern]) on `target`, where pattern
// bit i is the value of controls[i]. Recursive halving into plain RY+CNOT.
inline void append_multiplexed_ry(CircuitSpec& spec, const std::vector<int>& controls,
                                  int target, const std::vector<double>& angles) {
  if (angles.size() != (std::size_t{1} << controls.size()))
    throw std::invalid_argument("multiplexed RY needs 2^k angles");
  if (controls.empty()) {
    spec.add({GateKind::RY, target, -1, AngleSource::fixed(angles[0])});
    return;
  }
  const std::size_t half = angles.size() / 2;
  std::vector<double> avg(half), diff(half);
  for (std::size_t i = 0; i < half; ++i) {
    avg[i] = 0.5 * (angles[i] + angles[i + half]);
    diff[i] = 0.5 * (angles[i] - angles[i + half]);
  }
  const int top = controls.back();
  std::vector<int> rest(controls.begin(), controls.end() - 1);
  append_multiplexed_ry(spec, rest, target, avg);
  spec.add({GateKind::CNOT, top, target, {}});
  append_multiplexed_ry(spec, rest, target, diff);
  spec.add({GateKind::CNOT, top, target, {}});
}

// Appends gates preparing sum_l sqrt(probs[l]) |l> from |0...0> on `qubits`
// (little-endian). probs must be nonnegative and sum to 1.
inline void append_real_state_prep(CircuitSpec& spec, const std::vector<int>& qubits,
                                   const std::vector<double>& probs) {
  const int a = static_cast<int>(qubits.size());
  if (probs.size() != (std::size_t{1} << a))
    throw std::invalid_argument("state prep needs 2^a probabilities");
  if (a == 0) return;
  for (int m = a - 1; m >= 0; --m) {
    const int prefix_bits = a - 1 - m;  // already-prepared higher qubits
    std::vector<double> angles(std::size_t{1} << prefix_bits, 0.0);
    for (std::size_t prefix = 0; prefix < angles.size(); ++prefix) {
      double mass0 = 0.0, mass1 = 0.0;
      // indices whose bits above m equal (bit_m, prefix)
      const std::size_t low = std::size_t{1} << m;
      for (std::size_t lowbits = 0; lowbits < low; ++lowbits) {
        mass0 += probs[(prefix << (m + 1)) | lowbits];
        mass1 += probs[(prefix << (m + 1)) | low | lowbits];
      }
      angles[prefix] = 2.0 * std::atan2(std::sqrt(mass1), std::sqrt(mass0));
    }
    std::vector<int> controls(qubits.begin() + m + 1, qubits.end());
    append_multiplexed_ry(spec, controls, qubits[m], angles);
  }
}

// A Pauli string over s qubits as X/Z masks: P = i^{|x&z|} X^x Z^z.
struct PauliTerm {
  std::uint32_t x_mask = 0;
  std::uint32_t z_mask = 0;
  double magnitude = 0.0;
  bool negative = false;
  int y_count = 0;
};

}  // namespace detail

inline constexpr int kMaxBlockSystemQubits = 4;

// The subnormalized unitary embedding of a symmetric matrix: the top-left
// 2^s x 2^s block of the circuit's unitary equals A / alpha.
struct BlockEncoding {
  CircuitSpec circuit;
  int system_qubits = 0;
  int ancilla_qubits = 0;
  double alpha = 0.0;
  std::vector<detail::PauliTerm> terms;
};

// Exact Pauli decomposition by 4^s trace inner products; real symmetric
// input keeps only even-Y strings with real coefficients.
inline std::vector<detail::PauliTerm> pauli_decompose(const std::vector<double>& a, int dim) {
  const int s = std::bit_width(static_cast<unsigned>(dim)) - 1;
  std::vector<detail::PauliTerm> terms;
  for (std::uint32_t x = 0; x < (1u << s); ++x) {
    for (std::uint32_t z = 0; z < (1u << s); ++z) {
      const int y = std::popcount(x & z);
      // Tr(P A) = sum_d phase(d) A[d][d^x]; P real requires even y.
      if (y % 2 != 0) continue;
      double tr = 0.0;
      for (int d = 0; d < dim; ++d) {
        const double sign_z = (std::popcount(z & static_cast<std::uint32_t>(d)) & 1) ? -1.0 : 1.0;
        tr += sign_z * a[static_cast<std::size_t>(d) * dim + (d ^ x)];
      }
      double coeff = tr / dim;
      if (y % 4 == 2) coeff = -coeff;  // i^y = -1
      if (std::abs(coeff) < 1e-12) continue;
      terms.push_back({x, z, std::abs(coeff), coeff < 0.0, y});
    }
  }
  return terms;
}

// Prepare-select-unprepare block encoding of a real symmetric matrix given
// row-major with power-of-two dimension. alpha = sum |c_l| over the Pauli
// decomposition A = sum c_l P_l.
inline BlockEncoding block_encode(const std::vector<double>& a, int dim) {
  if (dim < 2 || (dim & (dim - 1)) != 0 || a.size() != static_cast<std::size_t>(dim) * dim)
    throw std::invalid_argument("matrix must be square with power-of-two dimension");
  const int s = std::bit_width(static_cast<unsigned>(dim)) - 1;
  if (s > kMaxBlockSystemQubits)
    throw capacity_error("block encoding supports at most " +
                         std::to_string(kMaxBlockSystemQubits) + " system qubits");
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      if (std::abs(a[static_cast<std::size_t>(i) * dim + j] -
                   a[static_cast<std::size_t>(j) * dim + i]) > 1e-12)
        throw std::invalid_argument("block encoding requires a symmetric matrix");

  BlockEncoding be;
  be.system_qubits = s;
  be.terms = pauli_decompose(a, dim);
  if (be.terms.empty()) throw std::invalid_argument("cannot block-encode the zero matrix");
  const int num_terms = static_cast<int>(be.terms.size());
  int anc = 0;
  while ((1 << anc) < num_terms) ++anc;
  be.ancilla_qubits = anc;
  be.alpha = 0.0;
  for (const detail::PauliTerm& t : be.terms) be.alpha += t.magnitude;

  CircuitSpec& spec = be.circuit;
  spec.num_qubits = s + anc;
  spec.init = BasisInit::all_zero;

  std::vector<int> system_wires(s), ancilla_wires(anc);
  for (int i = 0; i < s; ++i) system_wires[i] = i;
  for (int i = 0; i < anc; ++i) ancilla_wires[i] = s + i;

  // PREPARE
  CircuitSpec prep;
  prep.num_qubits = spec.num_qubits;
  if (anc > 0) {
    std::vector<double> probs(std::size_t{1} << anc, 0.0);
    for (int l = 0; l < num_terms; ++l) probs[l] = be.terms[l].magnitude / be.alpha;
    detail::append_real_state_prep(prep, ancilla_wires, probs);
  }
  for (const Gate& g : prep.gates) spec.add(g);

  // SELECT = (H D_X H) after D_Z; both diagonals run over system + ancilla.
  const std::size_t table_size = std::size_t{1} << (s + anc);
  const std::uint32_t sys_mask = (1u << s) - 1;
  std::vector<double> dz(table_size, 0.0), dx(table_size, 0.0);
  std::uint32_t x_union = 0;
  for (std::size_t idx = 0; idx < table_size; ++idx) {
    const std::uint32_t sys = static_cast<std::uint32_t>(idx) & sys_mask;
    const std::uint32_t l = static_cast<std::uint32_t>(idx) >> s;
    if (l >= static_cast<std::uint32_t>(num_terms)) continue;
    const detail::PauliTerm& t = be.terms[l];
    double phase = std::numbers::pi / 2.0 * t.y_count;
    if (t.negative) phase += std::numbers::pi;
    phase += std::numbers::pi * std::popcount(t.z_mask & sys);
    dz[idx] = phase;
    dx[idx] = std::numbers::pi * std::popcount(t.x_mask & sys);
  }
  for (const detail::PauliTerm& t : be.terms) x_union |= t.x_mask;

  std::vector<int> all_wires(spec.num_qubits);
  for (int i = 0; i < spec.num_qubits; ++i) all_wires[i] = i;
  detail::append_diagonal_phase(spec, all_wires, dz);
  std::vector<int> flipped;
  for (int i = 0; i < s; ++i)
    if (x_union & (1u << i)) flipped.push_back(i);
  if (!flipped.empty()) {
    for (int q : flipped) spec.add({GateKind::H, q, -1, {}});
    detail::append_diagonal_phase(spec, all_wires, dx);
    for (int q : flipped) spec.add({GateKind::H, q, -1, {}});
  }

  // UNPREPARE: exact inverse of the prepare fragment.
  for (auto it = prep.gates.rbegin(); it != prep.gates.rend(); ++it) {
    Gate g = *it;
    if (gate_has_angle(g.kind)) g.angle = AngleSource::fixed(-g.angle.value);
    spec.add(g);
  }

  validate_spec(spec);
  return be;
}

// Top-left 2^s x 2^s block of the encoding's unitary, row-major complex.
inline std::vector<cplx> encoded_block(const BlockEncoding& be) {
  const std::uint64_t dim = std::uint64_t{1} << be.system_qubits;
  std::vector<Statevector> cols = circuit_columns(be.circuit, dim);
  std::vector<cplx> block(dim * dim);
  for (std::uint64_t c = 0; c < dim; ++c)
    for (std::uint64_t r = 0; r < dim; ++r) block[r * dim + c] = cols[c].amps[r];
  return block;
}

}  // namespace quroute
