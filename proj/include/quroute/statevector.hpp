#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "quroute/errors.hpp"

namespace quroute {

using cplx = std::complex<double>;

inline constexpr int kMaxSimQubits = 14;  // dense-simulation guard

enum class BasisInit { all_zero, all_plus };

// Dense statevector, little-endian: qubit q is bit q of the amplitude index.
struct Statevector {
  int num_qubits = 0;
  std::vector<cplx> amps;

  std::uint64_t size() const { return std::uint64_t{1} << num_qubits; }
};

inline Statevector init_state(int num_qubits, BasisInit basis = BasisInit::all_zero) {
  if (num_qubits < 1 || num_qubits > kMaxSimQubits)
    throw capacity_error("statevector supports 1.." + std::to_string(kMaxSimQubits) +
                         " qubits, got " + std::to_string(num_qubits));
  Statevector sv;
  sv.num_qubits = num_qubits;
  const std::uint64_t n = sv.size();
  if (basis == BasisInit::all_zero) {
    sv.amps.assign(n, cplx(0.0, 0.0));
    sv.amps[0] = cplx(1.0, 0.0);
  } else {
    const double a = std::pow(2.0, -0.5 * num_qubits);
    sv.amps.assign(n, cplx(a, 0.0));
  }
  return sv;
}

inline void reset_state(Statevector& sv, BasisInit basis = BasisInit::all_zero) {
  const std::uint64_t n = sv.size();
  if (basis == BasisInit::all_zero) {
    std::fill(sv.amps.begin(), sv.amps.end(), cplx(0.0, 0.0));
    sv.amps[0] = cplx(1.0, 0.0);
  } else {
    const double a = std::pow(2.0, -0.5 * sv.num_qubits);
    std::fill(sv.amps.begin(), sv.amps.end(), cplx(a, 0.0));
  }
  (void)n;
}

namespace detail {

// Applies [[m00,m01],[m10,m11]] on qubit q.
inline void apply_1q(Statevector& sv, int q, cplx m00, cplx m01, cplx m10, cplx m11) {
  const std::uint64_t step = std::uint64_t{1} << q;
  const std::uint64_t n = sv.size();
  for (std::uint64_t base = 0; base < n; base += 2 * step) {
    for (std::uint64_t x = base; x < base + step; ++x) {
      const cplx a = sv.amps[x];
      const cplx b = sv.amps[x + step];
      sv.amps[x] = m00 * a + m01 * b;
      sv.amps[x + step] = m10 * a + m11 * b;
    }
  }
}

}  // namespace detail

inline void apply_h(Statevector& sv, int q) {
  const double s = 1.0 / std::sqrt(2.0);
  detail::apply_1q(sv, q, cplx(s), cplx(s), cplx(s), cplx(-s));
}

// RY(theta) = exp(-i theta Y / 2)
inline void apply_ry(Statevector& sv, int q, double theta) {
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  detail::apply_1q(sv, q, cplx(c), cplx(-s), cplx(s), cplx(c));
}

// RX(theta) = exp(-i theta X / 2); internal helper for the variational mixer.
inline void apply_rx(Statevector& sv, int q, double theta) {
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  detail::apply_1q(sv, q, cplx(c), cplx(0, -s), cplx(0, -s), cplx(c));
}

// RZ(theta) = exp(-i theta Z / 2)
inline void apply_rz(Statevector& sv, int q, double theta) {
  const cplx p0 = std::polar(1.0, -0.5 * theta);
  const cplx p1 = std::polar(1.0, 0.5 * theta);
  const std::uint64_t mask = std::uint64_t{1} << q;
  const std::uint64_t n = sv.size();
  for (std::uint64_t x = 0; x < n; ++x) sv.amps[x] *= (x & mask) ? p1 : p0;
}

// PhaseZ(phi) = diag(1, e^{i phi})
inline void apply_phasez(Statevector& sv, int q, double phi) {
  const cplx p = std::polar(1.0, phi);
  const std::uint64_t mask = std::uint64_t{1} << q;
  const std::uint64_t n = sv.size();
  for (std::uint64_t x = 0; x < n; ++x)
    if (x & mask) sv.amps[x] *= p;
}

inline void apply_cnot(Statevector& sv, int control, int target) {
  const std::uint64_t cm = std::uint64_t{1} << control;
  const std::uint64_t tm = std::uint64_t{1} << target;
  const std::uint64_t n = sv.size();
  for (std::uint64_t x = 0; x < n; ++x)
    if ((x & cm) && !(x & tm)) std::swap(sv.amps[x], sv.amps[x | tm]);
}

inline void apply_cz(Statevector& sv, int a, int b) {
  const std::uint64_t am = std::uint64_t{1} << a;
  const std::uint64_t bm = std::uint64_t{1} << b;
  const std::uint64_t n = sv.size();
  for (std::uint64_t x = 0; x < n; ++x)
    if ((x & am) && (x & bm)) sv.amps[x] = -sv.amps[x];
}

// Controlled RZ: applies RZ(theta) on the target when the control is 1.
inline void apply_crz(Statevector& sv, int control, int target, double theta) {
  const cplx p0 = std::polar(1.0, -0.5 * theta);
  const cplx p1 = std::polar(1.0, 0.5 * theta);
  const std::uint64_t cm = std::uint64_t{1} << control;
  const std::uint64_t tm = std::uint64_t{1} << target;
  const std::uint64_t n = sv.size();
  for (std::uint64_t x = 0; x < n; ++x)
    if (x & cm) sv.amps[x] *= (x & tm) ? p1 : p0;
}

// Generalized two-branch CRZ used by the gradient engine: RZ(theta_c0) on the
// target in the control-0 branch and RZ(theta_c1) in the control-1 branch.
// CRZ(theta) itself is the (0, theta) case.
inline void apply_crz_branches(Statevector& sv, int control, int target, double theta_c0,
                               double theta_c1) {
  const cplx p00 = std::polar(1.0, -0.5 * theta_c0);
  const cplx p01 = std::polar(1.0, 0.5 * theta_c0);
  const cplx p10 = std::polar(1.0, -0.5 * theta_c1);
  const cplx p11 = std::polar(1.0, 0.5 * theta_c1);
  const std::uint64_t cm = std::uint64_t{1} << control;
  const std::uint64_t tm = std::uint64_t{1} << target;
  const std::uint64_t n = sv.size();
  for (std::uint64_t x = 0; x < n; ++x) {
    if (x & cm) sv.amps[x] *= (x & tm) ? p11 : p10;
    else sv.amps[x] *= (x & tm) ? p01 : p00;
  }
}

// IsingZZ(theta) = exp(-i theta (Z x Z) / 2)
inline void apply_zz(Statevector& sv, int a, int b, double theta) {
  const cplx same = std::polar(1.0, -0.5 * theta);
  const cplx diff = std::polar(1.0, 0.5 * theta);
  const std::uint64_t am = std::uint64_t{1} << a;
  const std::uint64_t bm = std::uint64_t{1} << b;
  const std::uint64_t n = sv.size();
  for (std::uint64_t x = 0; x < n; ++x) {
    const bool ba = (x & am) != 0, bb = (x & bm) != 0;
    sv.amps[x] *= (ba == bb) ? same : diff;
  }
}

inline double norm_sq(const Statevector& sv) {
  double s = 0.0;
  for (const cplx& a : sv.amps) s += std::norm(a);
  return s;
}

inline double expectation_z(const Statevector& sv, int q) {
  if (q < 0 || q >= sv.num_qubits) throw std::invalid_argument("qubit index out of range");
  const std::uint64_t mask = std::uint64_t{1} << q;
  double e = 0.0;
  const std::uint64_t n = sv.size();
  for (std::uint64_t x = 0; x < n; ++x) {
    const double p = std::norm(sv.amps[x]);
    e += (x & mask) ? -p : p;
  }
  return e;
}

}  // namespace quroute
