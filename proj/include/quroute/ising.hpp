#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <vector>

#include "quroute/qubo.hpp"

namespace quroute {

// Diagonal Hamiltonian: a sum of Pauli-Z products. The empty support set is
// the identity (constant) term.
struct PauliHamiltonian {
  struct Term {
    double coeff = 0.0;
    std::vector<int> support;  // sorted qubit indices
  };
  int num_qubits = 0;
  std::vector<Term> terms;
};

// Substitutes x = (1 - z)/2 into the quadratic form. Bit value 1 maps to
// spin -1, so qubo_energy(bits) == ising energy of the mapped spin string.
inline PauliHamiltonian to_ising(const QuboModel& m) {
  PauliHamiltonian h;
  h.num_qubits = m.num_vars;
  double constant = m.constant;
  std::vector<double> z(m.num_vars, 0.0);
  std::map<std::pair<int, int>, double> zz;

  for (int a = 0; a < m.num_vars; ++a) {
    constant += 0.5 * m.linear[a];
    z[a] -= 0.5 * m.linear[a];
    const std::size_t row = static_cast<std::size_t>(a) * m.num_vars;
    for (int b = a + 1; b < m.num_vars; ++b) {
      const double q = m.quadratic[row + b];
      if (q == 0.0) continue;
      constant += 0.25 * q;
      z[a] -= 0.25 * q;
      z[b] -= 0.25 * q;
      zz[{a, b}] += 0.25 * q;
    }
  }

  if (constant != 0.0) h.terms.push_back({constant, {}});
  for (int a = 0; a < m.num_vars; ++a)
    if (z[a] != 0.0) h.terms.push_back({z[a], {a}});
  for (const auto& [key, coeff] : zz)
    if (coeff != 0.0) h.terms.push_back({coeff, {key.first, key.second}});
  return h;
}

// Energy of a computational basis state given as a bit pattern
// (bit 1 == spin -1).
inline double ising_energy(const PauliHamiltonian& h, std::uint64_t bits) {
  double e = 0.0;
  for (const PauliHamiltonian::Term& term : h.terms) {
    int parity = 0;
    for (int q : term.support) parity ^= static_cast<int>((bits >> q) & 1u);
    e += parity ? -term.coeff : term.coeff;
  }
  return e;
}

// Dense table of basis-state energies; the variational cost layer and the
// exact expectation both read from this.
inline std::vector<double> ising_energy_table(const PauliHamiltonian& h) {
  const std::uint64_t dim = std::uint64_t{1} << h.num_qubits;
  std::vector<double> table(dim, 0.0);
  for (const PauliHamiltonian::Term& term : h.terms) {
    std::uint64_t mask = 0;
    for (int q : term.support) mask |= std::uint64_t{1} << q;
    for (std::uint64_t x = 0; x < dim; ++x)
      table[x] += (std::popcount(x & mask) & 1) ? -term.coeff : term.coeff;
  }
  return table;
}

}  // namespace quroute
