#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "quroute/qnet.hpp"
#include "quroute/replay.hpp"
#include "quroute/rng.hpp"

namespace quroute {

struct TrainerConfig {
  int episodes = 300;
  double learning_rate = 0.0005;
  double discount = 0.99;  // gamma
  int batch_size = 32;
  double tau_soft = 0.01;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.6;  // linear decay over this share of episodes
  int buffer_capacity = 10000;
  bool double_q = true;
  double priority_exponent = 0.6;
  double priority_epsilon = 1e-3;
  double is_beta_start = 0.4;  // anneals linearly to 1 over training
  int max_steps_per_episode = 0;  // 0: use the environment's own bound
  int threads = 1;
  std::uint64_t seed = 0;
};

struct EpisodeStats {
  double cost = 0.0;       // episode sum of -reward
  double loss_mean = 0.0;  // mean weighted TD loss over the episode's updates
  double epsilon = 0.0;
  double grad_norm = 0.0;  // mean gradient norm over the episode's updates
  double wall_ms = 0.0;    // reported separately from the deterministic curve
};

struct TrainingCurve {
  std::vector<EpisodeStats> episodes;
};

inline void soft_update(std::vector<double>& target, const std::vector<double>& online,
                        double tau) {
  if (target.size() != online.size())
    throw std::invalid_argument("soft update needs matching parameter shapes");
  for (std::size_t i = 0; i < target.size(); ++i)
    target[i] = tau * online[i] + (1.0 - tau) * target[i];
}

inline double epsilon_at(const TrainerConfig& cfg, int episode) {
  const double decay_span = std::max(1.0, cfg.epsilon_decay_fraction * cfg.episodes);
  const double f = std::min(1.0, episode / decay_span);
  return cfg.epsilon_start + f * (cfg.epsilon_end - cfg.epsilon_start);
}

// TD targets r + gamma * Q_target(s', a*), a* from the online network when
// double_q is set ("double DQN"), from the target otherwise; masked to the
// feasible actions of s'.
inline std::vector<double> compute_td_targets(std::span<const Transition* const> batch,
                                              const QNetwork& online, const QNetwork& target,
                                              double gamma, bool double_q) {
  std::vector<double> targets(batch.size(), 0.0);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = *batch[i];
    double y = t.reward;
    if (!t.done) {
      const std::vector<double> q_target = target.forward(t.next_state);
      int a_star;
      if (double_q) {
        a_star = argmax_masked(online.forward(t.next_state), t.next_state.mask);
      } else {
        a_star = argmax_masked(q_target, t.next_state.mask);
      }
      y += gamma * q_target[a_star];
    }
    targets[i] = y;
  }
  return targets;
}

inline int epsilon_greedy(const std::vector<double>& q, const std::vector<std::uint8_t>& mask,
                          double epsilon, Rng& rng) {
  if (rng.uniform() < epsilon) return random_masked(mask, rng);
  return argmax_masked(q, mask);
}

// Deep Q-learning loop: epsilon-greedy rollouts over feasible actions,
// prioritized replay, importance-weighted squared-TD updates, and a soft
// target blend after every gradient step. Works for any network behind the
// QNetwork interface and any env the factory produces.
template <typename EnvFactory>
TrainingCurve train_dqn(EnvFactory&& factory, QNetwork& online, const TrainerConfig& cfg) {
  TrainingCurve curve;
  curve.episodes.reserve(cfg.episodes);
  Rng rng(cfg.seed);
  std::unique_ptr<QNetwork> target = online.clone();
  PrioritizedReplayBuffer buffer(static_cast<std::size_t>(cfg.buffer_capacity),
                                 cfg.priority_exponent, cfg.priority_epsilon);

  for (int episode = 0; episode < cfg.episodes; ++episode) {
    const auto wall_start = std::chrono::steady_clock::now();
    auto env = factory(episode, rng);
    StateSnapshot snap = env.reset();
    const double eps = epsilon_at(cfg, episode);
    const double beta = cfg.is_beta_start +
                        (1.0 - cfg.is_beta_start) *
                            (cfg.episodes > 1 ? static_cast<double>(episode) / (cfg.episodes - 1)
                                              : 1.0);
    const int step_cap =
        cfg.max_steps_per_episode > 0 ? cfg.max_steps_per_episode : env.max_episode_steps();

    double cost = 0.0, loss_sum = 0.0, grad_sum = 0.0;
    int updates = 0;
    bool done = snap.terminal;
    int steps = 0;

    while (!done && steps < step_cap) {
      const int action = epsilon_greedy(online.forward(snap), snap.mask, eps, rng);
      auto result = env.step(action);
      cost -= result.reward;
      Transition t;
      t.state = std::move(snap);
      t.action = action;
      t.reward = result.reward;
      t.next_state = result.snapshot;
      t.done = result.done;
      buffer.push(std::move(t));
      snap = std::move(result.snapshot);
      done = result.done;
      ++steps;

      auto batch = buffer.sample(static_cast<std::size_t>(cfg.batch_size), beta, rng);
      if (batch) {
        const std::vector<double> targets =
            compute_td_targets(batch->transitions, online, *target, cfg.discount, cfg.double_q);
        std::vector<BatchItem> items(batch->transitions.size());
        std::vector<double> abs_td(batch->transitions.size());
        double loss = 0.0;
        for (std::size_t i = 0; i < batch->transitions.size(); ++i) {
          const Transition& tr = *batch->transitions[i];
          const double q_sa = online.forward(tr.state)[tr.action];
          const double delta = q_sa - targets[i];
          const double w = batch->is_weights[i];
          loss += w * delta * delta;
          abs_td[i] = std::abs(delta);
          items[i] = {&tr.state, tr.action, 2.0 * w * delta};
        }
        loss /= static_cast<double>(items.size());
        const double gnorm = online.train_batch(items, cfg.learning_rate, cfg.threads);
        buffer.update_priorities(batch->indices, abs_td);
        soft_update(target->parameters(), online.parameters(), cfg.tau_soft);
        loss_sum += loss;
        grad_sum += gnorm;
        ++updates;
      }
    }

    EpisodeStats stats;
    stats.cost = cost;
    stats.loss_mean = updates > 0 ? loss_sum / updates : 0.0;
    stats.epsilon = eps;
    stats.grad_norm = updates > 0 ? grad_sum / updates : 0.0;
    stats.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                              wall_start)
                        .count();
    curve.episodes.push_back(stats);
  }
  return curve;
}

}  // namespace quroute
