#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "json.hpp"
#include "quroute/dqn.hpp"
#include "quroute/mlp.hpp"
#include "quroute/rng.hpp"
#include "quroute/rollout.hpp"

namespace quroute {

struct PpoConfig {
  int episodes = 300;
  double clip_ratio = 0.2;
  int rollout_steps = 512;
  int epochs = 4;
  int minibatch = 64;
  double gae_lambda = 0.95;
  double discount = 0.99;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double learning_rate = 3e-4;
  int hidden = 64;
  std::uint64_t seed = 0;
};

// Masked categorical head: infeasible logits are excluded from the
// normalization entirely.
struct MaskedDistribution {
  std::vector<double> probs;      // zero on masked entries
  std::vector<double> log_probs;  // -inf on masked entries
};

inline MaskedDistribution masked_softmax(const std::vector<double>& logits,
                                         const std::vector<std::uint8_t>& mask) {
  MaskedDistribution d;
  const std::size_t n = logits.size();
  d.probs.assign(n, 0.0);
  d.log_probs.assign(n, -std::numeric_limits<double>::infinity());
  double max_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < n; ++a)
    if (mask[a] && logits[a] > max_logit) max_logit = logits[a];
  double z = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    if (mask[a]) z += std::exp(logits[a] - max_logit);
  const double log_z = std::log(z) + max_logit;
  for (std::size_t a = 0; a < n; ++a) {
    if (!mask[a]) continue;
    d.log_probs[a] = logits[a] - log_z;
    d.probs[a] = std::exp(d.log_probs[a]);
  }
  return d;
}

inline double distribution_entropy(const MaskedDistribution& d) {
  double h = 0.0;
  for (std::size_t a = 0; a < d.probs.size(); ++a)
    if (d.probs[a] > 0.0) h -= d.probs[a] * d.log_probs[a];
  return h;
}

inline int sample_distribution(const MaskedDistribution& d, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  int last = -1;
  for (std::size_t a = 0; a < d.probs.size(); ++a) {
    if (d.probs[a] <= 0.0) continue;
    acc += d.probs[a];
    last = static_cast<int>(a);
    if (u < acc) return last;
  }
  if (last < 0) throw no_feasible_action_error("empty masked distribution");
  return last;
}

struct PpoPolicy {
  MlpNet policy;
  MlpNet value;

  int act_greedy(const StateSnapshot& snap) const {
    return argmax_masked(policy.forward(snap.classical_features), snap.mask);
  }
};

inline nlohmann::json ppo_policy_to_json(const PpoPolicy& p) {
  return nlohmann::json{{"kind", "ppo"},
                        {"in", p.policy.in},
                        {"hidden", p.policy.hidden},
                        {"out", p.policy.out},
                        {"policy_params", p.policy.params},
                        {"value_params", p.value.params}};
}

inline PpoPolicy ppo_policy_from_json(const nlohmann::json& j) {
  PpoPolicy p;
  Rng dummy(0);
  p.policy = MlpNet(j.at("in").get<int>(), j.at("hidden").get<int>(), j.at("out").get<int>(), dummy);
  p.value = MlpNet(j.at("in").get<int>(), j.at("hidden").get<int>(), 1, dummy);
  p.policy.params = j.at("policy_params").get<std::vector<double>>();
  p.value.params = j.at("value_params").get<std::vector<double>>();
  if (p.policy.params.size() != p.policy.num_params() ||
      p.value.params.size() != p.value.num_params())
    throw std::invalid_argument("PPO checkpoint parameter count mismatch");
  return p;
}

namespace detail {

struct PpoSample {
  StateSnapshot state;
  int action = 0;
  double log_prob_old = 0.0;
  double reward = 0.0;
  double value = 0.0;
  bool done = false;
};

// Gradient of the clipped surrogate + entropy bonus with respect to the
// logits of one sample; returns the policy loss contribution.
inline double policy_logit_grad(const MaskedDistribution& d, int action, double log_prob_old,
                                double advantage, double clip, double entropy_coef,
                                std::vector<double>& dlogits) {
  const double ratio = std::exp(d.log_probs[action] - log_prob_old);
  const bool clipped_out =
      (advantage >= 0.0 && ratio > 1.0 + clip) || (advantage < 0.0 && ratio < 1.0 - clip);
  const double surrogate =
      std::min(ratio * advantage,
               std::clamp(ratio, 1.0 - clip, 1.0 + clip) * advantage);
  const double entropy = distribution_entropy(d);

  dlogits.assign(d.probs.size(), 0.0);
  for (std::size_t a = 0; a < d.probs.size(); ++a) {
    if (d.probs[a] <= 0.0) continue;
    double g = 0.0;
    if (!clipped_out) {
      // d(-ratio*A)/dlogit = -A*ratio * (1[a==action] - pi_a)
      const double dlogp = (static_cast<int>(a) == action ? 1.0 : 0.0) - d.probs[a];
      g -= advantage * ratio * dlogp;
    }
    // entropy bonus: d(-c_e*H)/dlogit_a = c_e * pi_a * (log pi_a + H)
    g += entropy_coef * d.probs[a] * (d.log_probs[a] + entropy);
    dlogits[a] = g;
  }
  return -surrogate - entropy_coef * entropy;
}

}  // namespace detail

// Clipped-surrogate PPO with GAE advantages over a masked categorical
// policy; value and policy heads are separate single-hidden-layer networks.
template <typename EnvFactory>
std::pair<PpoPolicy, TrainingCurve> train_ppo(EnvFactory&& factory, int input_dim,
                                              int num_actions, const PpoConfig& cfg) {
  Rng rng(cfg.seed);
  PpoPolicy agent;
  agent.policy = MlpNet(input_dim, cfg.hidden, num_actions, rng);
  agent.value = MlpNet(input_dim, cfg.hidden, 1, rng);

  TrainingCurve curve;
  curve.episodes.reserve(cfg.episodes);

  std::vector<detail::PpoSample> rollout;
  rollout.reserve(cfg.rollout_steps);

  auto update = [&]() {
    if (rollout.empty()) return;
    const std::size_t n = rollout.size();
    // GAE over the collected slice; episodes are delimited by done flags and
    // the trailing partial episode bootstraps from its own value estimate.
    std::vector<double> advantages(n, 0.0), returns(n, 0.0);
    double gae = 0.0;
    double next_value = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      const detail::PpoSample& s = rollout[i];
      const double not_done = s.done ? 0.0 : 1.0;
      const double delta = s.reward + cfg.discount * next_value * not_done - s.value;
      gae = delta + cfg.discount * cfg.gae_lambda * not_done * gae;
      advantages[i] = gae;
      returns[i] = advantages[i] + s.value;
      next_value = s.value;
      if (s.done) gae = 0.0;
    }
    double adv_mean = 0.0, adv_sq = 0.0;
    for (double a : advantages) adv_mean += a;
    adv_mean /= static_cast<double>(n);
    for (double a : advantages) adv_sq += (a - adv_mean) * (a - adv_mean);
    const double adv_std = std::sqrt(adv_sq / static_cast<double>(n)) + 1e-8;
    for (double& a : advantages) a = (a - adv_mean) / adv_std;

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    std::vector<double> pgrad(agent.policy.num_params());
    std::vector<double> vgrad(agent.value.num_params());
    MlpNet::Scratch scratch;
    std::vector<double> dlogits;
    std::vector<double> dvalue(1, 0.0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      // deterministic shuffle from the trainer stream
      for (std::size_t i = n; i > 1; --i)
        std::swap(order[i - 1], order[rng.uniform_index(i)]);
      for (std::size_t start = 0; start < n; start += cfg.minibatch) {
        const std::size_t stop = std::min(n, start + cfg.minibatch);
        std::fill(pgrad.begin(), pgrad.end(), 0.0);
        std::fill(vgrad.begin(), vgrad.end(), 0.0);
        for (std::size_t k = start; k < stop; ++k) {
          const detail::PpoSample& s = rollout[order[k]];
          const std::vector<double> logits = agent.policy.forward(s.state.classical_features, scratch);
          const MaskedDistribution d = masked_softmax(logits, s.state.mask);
          detail::policy_logit_grad(d, s.action, s.log_prob_old, advantages[order[k]],
                                    cfg.clip_ratio, cfg.entropy_coef, dlogits);
          agent.policy.backward(s.state.classical_features, dlogits, scratch, pgrad);

          const std::vector<double> v = agent.value.forward(s.state.classical_features, scratch);
          dvalue[0] = cfg.value_coef * 2.0 * (v[0] - returns[order[k]]);
          agent.value.backward(s.state.classical_features, dvalue, scratch, vgrad);
        }
        const double inv = 1.0 / static_cast<double>(stop - start);
        for (std::size_t j = 0; j < pgrad.size(); ++j)
          agent.policy.params[j] -= cfg.learning_rate * pgrad[j] * inv;
        for (std::size_t j = 0; j < vgrad.size(); ++j)
          agent.value.params[j] -= cfg.learning_rate * vgrad[j] * inv;
      }
    }
    rollout.clear();
  };

  for (int episode = 0; episode < cfg.episodes; ++episode) {
    auto env = factory(episode, rng);
    StateSnapshot snap = env.reset();
    bool done = snap.terminal;
    double cost = 0.0;
    double loss_proxy = 0.0;
    int steps = 0;
    const int cap = env.max_episode_steps();
    MlpNet::Scratch scratch;
    while (!done && steps < cap) {
      const std::vector<double> logits = agent.policy.forward(snap.classical_features, scratch);
      const MaskedDistribution d = masked_softmax(logits, snap.mask);
      const int action = sample_distribution(d, rng);
      const double value = agent.value.forward(snap.classical_features, scratch)[0];
      auto result = env.step(action);
      cost -= result.reward;
      detail::PpoSample sample;
      sample.state = std::move(snap);
      sample.action = action;
      sample.log_prob_old = d.log_probs[action];
      sample.reward = result.reward;
      sample.value = value;
      sample.done = result.done;
      rollout.push_back(std::move(sample));
      snap = std::move(result.snapshot);
      done = result.done;
      ++steps;
      loss_proxy = -d.log_probs[action];
      if (static_cast<int>(rollout.size()) >= cfg.rollout_steps) update();
    }
    EpisodeStats stats;
    stats.cost = cost;
    stats.loss_mean = loss_proxy;
    stats.epsilon = 0.0;
    stats.grad_norm = 0.0;
    curve.episodes.push_back(stats);
  }
  update();
  return {std::move(agent), std::move(curve)};
}

}  // namespace quroute
