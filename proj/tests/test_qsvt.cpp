#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "quroute/qsvt.hpp"

using namespace quroute;

namespace {

double max_block_error(const std::vector<cplx>& got, const oracles::Mat& want, int dim) {
  double err = 0.0;
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c)
      err = std::max(err, std::abs(got[static_cast<std::size_t>(r) * dim + c] - want(r, c)));
  return err;
}

}  // namespace

TEST_CASE("projector phase fragments behave like e^{i phi (2 Pi - I)}") {
  // phi = 0: identity
  const CircuitSpec zero = projector_phase(0.0, ProjectorKind::system, 1);
  const auto uz = unitary_of(zero);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      REQUIRE(std::abs(uz[static_cast<std::size_t>(r) * 4 + c] - (r == c ? cplx(1, 0) : cplx(0, 0))) <
              1e-12);

  // phi = pi/2: e^{i phi (2 Pi - I)} puts +i on the projected subspace
  // (flag qubit = 0) and -i elsewhere; at phi = pi both branches collapse
  // to the global phase -1.
  const CircuitSpec half = projector_phase(std::numbers::pi / 2.0, ProjectorKind::extended, 1);
  const auto uh = unitary_of(half);
  for (int x = 0; x < 4; ++x) {
    if (x & 2) continue;  // auxiliary starts and ends in |0>
    const bool in_subspace = (x & 1) == 0;  // flag qubit is qubit 0
    const cplx want = in_subspace ? cplx(0, 1) : cplx(0, -1);
    REQUIRE(std::abs(uh[static_cast<std::size_t>(x) * 4 + x] - want) < 1e-10);
  }
  const CircuitSpec pi_frag = projector_phase(std::numbers::pi, ProjectorKind::extended, 1);
  const auto up = unitary_of(pi_frag);
  for (int x = 0; x < 4; ++x) {
    if (x & 2) continue;
    REQUIRE(std::abs(up[static_cast<std::size_t>(x) * 4 + x] - cplx(-1, 0)) < 1e-10);
  }

  // phi and -phi invert each other
  CircuitSpec pair;
  pair.num_qubits = 3;
  append_projector_phase(pair, 0.8, {0, 1}, 2);
  append_projector_phase(pair, -0.8, {0, 1}, 2);
  const auto upair = unitary_of(pair);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c)
      REQUIRE(std::abs(upair[static_cast<std::size_t>(r) * 8 + c] -
                       (r == c ? cplx(1, 0) : cplx(0, 0))) < 1e-10);
}

TEST_CASE("segment order follows the even/odd phase-sequence assembly") {
  Rng rng(5);
  const std::vector<double> a = oracles::random_symmetric(rng, 2);
  const BlockEncoding be = block_encode(a, 2);
  using K = QsvtSegment::Kind;

  for (int d = 1; d <= 4; ++d) {
    std::vector<double> phases(d + 1, 0.1);
    const QsvtCircuit qc = qsvt_circuit(be, {phases});

    std::vector<K> kinds;
    std::vector<int> phase_indices;
    for (const QsvtSegment& seg : qc.segments) {
      kinds.push_back(seg.kind);
      if (seg.kind == K::projector_system || seg.kind == K::projector_extended)
        phase_indices.push_back(seg.phase_index);
    }

    std::vector<K> want;
    std::vector<int> want_phases;
    if (d % 2 == 0) {
      want = {K::projector_system};
      want_phases = {d + 1};
      for (int k = d / 2; k >= 1; --k) {
        want.insert(want.end(), {K::unitary, K::projector_extended, K::unitary_dagger,
                                 K::projector_system});
        want_phases.push_back(2 * k);
        want_phases.push_back(2 * k - 1);
      }
    } else {
      want = {K::projector_system};
      want_phases = {d + 1};
      for (int k = (d - 1) / 2; k >= 1; --k) {
        want.insert(want.end(), {K::unitary, K::projector_extended, K::unitary_dagger,
                                 K::projector_system});
        want_phases.push_back(2 * k + 1);
        want_phases.push_back(2 * k);
      }
      want.insert(want.end(), {K::unitary, K::projector_extended});
      want_phases.push_back(1);
    }
    REQUIRE(kinds == want);
    REQUIRE(phase_indices == want_phases);
    // d applications of the encoding unitary, alternating with its adjoint
    int unitaries = 0;
    for (K k : kinds) unitaries += (k == K::unitary || k == K::unitary_dagger) ? 1 : 0;
    REQUIRE(unitaries == d);
  }
}

TEST_CASE("zero phases give P(x) = x at degree 1 and P(x) = 1 at degree 2") {
  Rng rng(17);
  const std::vector<double> a = oracles::random_symmetric(rng, 4);
  const BlockEncoding be = block_encode(a, 4);

  const QsvtCircuit d1 = qsvt_circuit(be, {{0.0, 0.0}});
  const auto b1 = qsvt_block(d1);
  double err1 = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      err1 = std::max(err1, std::abs(b1[static_cast<std::size_t>(r) * 4 + c] -
                                     cplx(a[static_cast<std::size_t>(r) * 4 + c] / be.alpha, 0)));
  REQUIRE(err1 < 1e-10);

  const QsvtCircuit d2 = qsvt_circuit(be, {{0.0, 0.0, 0.0}});
  const auto b2 = qsvt_block(d2);
  double err2 = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      err2 = std::max(err2,
                      std::abs(b2[static_cast<std::size_t>(r) * 4 + c] - (r == c ? cplx(1, 0) : cplx(0, 0))));
  REQUIRE(err2 < 1e-10);
}

TEST_CASE("random-phase circuits match the singular-subspace oracle") {
  Rng rng(29);
  for (int trial = 0; trial < 3; ++trial) {
    const int dim = trial == 0 ? 2 : 4;
    const std::vector<double> a = oracles::random_symmetric(rng, dim);
    const BlockEncoding be = block_encode(a, dim);
    for (int d : {1, 2, 3}) {
      std::vector<double> phases(d + 1);
      for (double& p : phases) p = rng.uniform(-1.5, 1.5);
      const QsvtCircuit qc = qsvt_circuit(be, {phases});
      const oracles::Mat want = oracles::qsvt_reference_block(a, dim, be.alpha, phases);
      REQUIRE(max_block_error(qsvt_block(qc), want, dim) < 1e-8);
    }
  }
}

TEST_CASE("phase sequences carry their parity and reject short inputs") {
  QsvtPhaseSequence odd{{0.1, 0.2}};
  REQUIRE(odd.degree() == 1);
  REQUIRE(odd.odd());
  QsvtPhaseSequence even{{0.1, 0.2, 0.3}};
  REQUIRE_FALSE(even.odd());

  Rng rng(31);
  const std::vector<double> a = oracles::random_symmetric(rng, 2);
  const BlockEncoding be = block_encode(a, 2);
  REQUIRE_THROWS_AS(qsvt_circuit(be, {{0.5}}), std::invalid_argument);
}
