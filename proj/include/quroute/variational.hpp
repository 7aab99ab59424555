#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "quroute/errors.hpp"
#include "quroute/ising.hpp"
#include "quroute/rng.hpp"
#include "quroute/statevector.hpp"

namespace quroute {

// Cost-layer angles gamma and mixer angles beta, one pair per layer.
struct VariationalParams {
  std::vector<double> gamma;
  std::vector<double> beta;
  int depth = 0;
};

struct VariationalConfig {
  int budget_evals = 500;  // per restart
  int restarts = 3;
  double initial_step = 0.4;
  double step_tolerance = 1e-4;
  std::uint64_t seed = 0;
};

struct VariationalResult {
  VariationalParams params;
  double energy = 0.0;
  std::vector<std::uint8_t> best_bits;
  double best_bits_energy = 0.0;
  bool converged = false;
  int evaluations = 0;
  std::vector<double> energy_trace;  // incumbent energy after each evaluation
};

namespace detail {

// |+>^n followed by depth x [exact diagonal cost layer e^{-i gamma H_C},
// mixer RX(2 beta) on every qubit].
inline void variational_state(const std::vector<double>& energy_table, int num_qubits,
                              const VariationalParams& p, Statevector& sv) {
  if (sv.num_qubits != num_qubits) sv = init_state(num_qubits, BasisInit::all_plus);
  else reset_state(sv, BasisInit::all_plus);
  const std::uint64_t dim = sv.size();
  for (int layer = 0; layer < p.depth; ++layer) {
    const double gamma = p.gamma[layer];
    for (std::uint64_t x = 0; x < dim; ++x)
      sv.amps[x] *= std::polar(1.0, -gamma * energy_table[x]);
    for (int q = 0; q < num_qubits; ++q) apply_rx(sv, q, 2.0 * p.beta[layer]);
  }
}

inline double diagonal_expectation(const Statevector& sv, const std::vector<double>& energy_table) {
  double e = 0.0;
  for (std::uint64_t x = 0; x < sv.size(); ++x) e += std::norm(sv.amps[x]) * energy_table[x];
  return e;
}

}  // namespace detail

// Minimizes E(gamma, beta) = <gamma,beta| H_C |gamma,beta> with a
// derivative-free linear-model trust-region loop (COBYLA-style): estimate a
// linear model of E on a coordinate stencil of radius step, take the model
// step, accept on improvement, shrink otherwise. The returned bitstring is
// the most probable basis state of the incumbent ansatz state.
inline VariationalResult variational_solve(const PauliHamiltonian& h, int depth,
                                           const VariationalConfig& config = VariationalConfig{}) {
  if (h.num_qubits < 1 || h.num_qubits > kMaxSimQubits)
    throw capacity_error("variational solver supports 1.." + std::to_string(kMaxSimQubits) +
                         " qubits");
  if (depth < 1) throw std::invalid_argument("depth must be >= 1");

  const std::vector<double> table = ising_energy_table(h);
  double lo = table[0], hi = table[0];
  for (double v : table) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double energy_range = std::max(hi - lo, 1e-9);

  Rng rng(config.seed);
  Statevector scratch;
  VariationalResult result;
  const int m = 2 * depth;

  auto unpack = [&](const std::vector<double>& x) {
    VariationalParams p;
    p.depth = depth;
    p.gamma.assign(x.begin(), x.begin() + depth);
    p.beta.assign(x.begin() + depth, x.end());
    return p;
  };
  auto evaluate = [&](const std::vector<double>& x) {
    const VariationalParams p = unpack(x);
    detail::variational_state(table, h.num_qubits, p, scratch);
    const double e = detail::diagonal_expectation(scratch, table);
    result.evaluations += 1;
    if (result.energy_trace.empty() || e < result.energy_trace.back())
      result.energy_trace.push_back(e);
    else
      result.energy_trace.push_back(result.energy_trace.back());
    return e;
  };

  // The optimizer works in normalized coordinates: cost angles in units of
  // 2 pi / energy range, mixer angles in units of pi, so one trust radius
  // fits both.
  const double gamma_unit = 2.0 * std::numbers::pi / energy_range;
  const double beta_unit = std::numbers::pi;
  auto denormalize = [&](const std::vector<double>& u) {
    std::vector<double> x(m);
    for (int i = 0; i < depth; ++i) x[i] = u[i] * gamma_unit;
    for (int i = depth; i < m; ++i) x[i] = u[i] * beta_unit;
    return x;
  };

  std::vector<double> best_u;
  double best_e = 0.0;
  bool have_best = false;

  for (int restart = 0; restart < config.restarts; ++restart) {
    int evals_left = config.budget_evals;
    auto step_eval = [&](const std::vector<double>& u) {
      evals_left -= 1;
      return evaluate(denormalize(u));
    };

    // Coarse scan: spend a third of the budget sampling the box, then
    // refine the best point with the linear-model trust-region loop.
    std::vector<double> u(m);
    double fu = 0.0;
    bool have_u = false;
    const int scan_budget = config.budget_evals / 3;
    while (evals_left > config.budget_evals - scan_budget) {
      std::vector<double> probe(m);
      for (int i = 0; i < depth; ++i) probe[i] = rng.uniform(0.02, 2.0);
      for (int i = depth; i < m; ++i) probe[i] = rng.uniform(0.02, 1.0);
      const double fp = step_eval(probe);
      if (!have_u || fp < fu) {
        fu = fp;
        u = probe;
        have_u = true;
      }
    }

    double step = config.initial_step;
    bool converged = false;
    while (evals_left > 2 * m + 1) {
      std::vector<double> grad(m, 0.0);
      std::vector<double> probe = u;
      for (int i = 0; i < m; ++i) {
        probe[i] = u[i] + step;
        const double fp = step_eval(probe);
        probe[i] = u[i] - step;
        const double fm = step_eval(probe);
        probe[i] = u[i];
        grad[i] = (fp - fm) / (2.0 * step);
        if (fp < fu) { fu = fp; u[i] += step; probe[i] = u[i]; }
        else if (fm < fu) { fu = fm; u[i] -= step; probe[i] = u[i]; }
      }
      double gnorm = 0.0;
      for (double g : grad) gnorm += g * g;
      gnorm = std::sqrt(gnorm);
      if (gnorm > 1e-12) {
        std::vector<double> candidate = u;
        for (int i = 0; i < m; ++i) candidate[i] -= step * grad[i] / gnorm;
        const double fc = step_eval(candidate);
        if (fc < fu - 1e-12) {
          u = candidate;
          fu = fc;
          step = std::min(step * 1.5, 1.0);
        } else {
          step *= 0.5;
        }
      } else {
        step *= 0.5;
      }
      if (step < config.step_tolerance) {
        converged = true;
        break;
      }
    }
    if (!have_best || fu < best_e) {
      best_e = fu;
      best_u = u;
      have_best = true;
    }
    result.converged = result.converged || converged;
  }

  result.params = unpack(denormalize(best_u));
  result.energy = best_e;
  detail::variational_state(table, h.num_qubits, result.params, scratch);
  std::uint64_t best_state = 0;
  double best_prob = -1.0;
  for (std::uint64_t xx = 0; xx < scratch.size(); ++xx) {
    const double p = std::norm(scratch.amps[xx]);
    if (p > best_prob) {
      best_prob = p;
      best_state = xx;
    }
  }
  result.best_bits.assign(h.num_qubits, 0);
  for (int q = 0; q < h.num_qubits; ++q) result.best_bits[q] = (best_state >> q) & 1u;
  result.best_bits_energy = table[best_state];
  return result;
}

}  // namespace quroute
