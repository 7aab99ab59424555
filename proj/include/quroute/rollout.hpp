#pragma once

#include <cstdint>
#include <numbers>
#include <vector>

#include "quroute/env.hpp"
#include "quroute/instance.hpp"
#include "quroute/pqc.hpp"
#include "quroute/rng.hpp"

namespace quroute {

// What a learner sees of a state: the PQC's encoding angles, the flat
// feature vector classical networks consume (same per-node load/time values
// plus visited flags and an at-depot flag), and the action mask.
struct StateSnapshot {
  int instance_id = 0;
  std::vector<double> quantum_features;
  std::vector<double> classical_features;
  std::vector<std::uint8_t> mask;
  bool terminal = false;
};

// Converts mask-style constraints into reward penalties instead (the
// relaxed training condition): revisit stays masked so episodes terminate,
// capacity and precedence violations execute and cost `amount` each.
struct RelaxPenalty {
  bool enabled = false;
  double amount = 0.0;
};

inline RelaxPenalty default_relax_penalty(const Instance& inst, const RewardParams& reward) {
  return {true, 2.0 * reward.alpha1 * inst.travel.max_entry()};
}

// Routing environment plus feature encoding, the rollout surface trainers
// and evaluators run against.
class EncodedRoutingEnv {
 public:
  EncodedRoutingEnv(const Instance& inst, int instance_id, RewardParams reward = RewardParams{},
                    MaskConfig masks = MaskConfig{}, RelaxPenalty relax = RelaxPenalty{})
      : instance_id_(instance_id), relax_(relax), env_(inst, reward, effective_masks(masks, relax)) {
    state_ = env_.reset();
  }

  int num_actions() const { return env_.num_actions(); }
  int max_episode_steps() const {
    return 2 * env_.instance().num_nodes() * std::max(1, env_.instance().fleet.num_vehicles);
  }
  const Instance& instance() const { return env_.instance(); }
  const EnvState& state() const { return state_; }
  const std::vector<int>& actions_taken() const { return actions_; }

  StateSnapshot reset() {
    state_ = env_.reset();
    actions_.clear();
    return make_snapshot();
  }

  struct Result {
    StateSnapshot snapshot;
    double reward = 0.0;
    bool done = false;
  };

  Result step(int action) {
    double penalty = 0.0;
    if (relax_.enabled) {
      const ViolationFlags f = env_.violation_flags(state_, action);
      if (f.capacity) penalty += relax_.amount;
      if (f.precedence) penalty += relax_.amount;
    }
    StepOutcome out = env_.step(state_, action);
    state_ = out.next_state;
    actions_.push_back(action);
    Result r;
    r.reward = out.reward - penalty;
    r.done = out.done;
    r.snapshot = make_snapshot();
    return r;
  }

  StateSnapshot make_snapshot() const {
    StateSnapshot snap;
    snap.instance_id = instance_id_;
    snap.terminal = env_.done(state_);
    snap.quantum_features = encode_features(env_.instance(), state_);
    const int width = env_.instance().num_nodes();
    snap.classical_features.reserve(3 * width + 1);
    for (int q = 0; q < width; ++q) {
      snap.classical_features.push_back(snap.quantum_features[2 * q] / std::numbers::pi);
      snap.classical_features.push_back(snap.quantum_features[2 * q + 1] / std::numbers::pi);
      snap.classical_features.push_back(state_.visited[q] ? 1.0 : 0.0);
    }
    snap.classical_features.push_back(state_.active().position == 0 ? 1.0 : 0.0);
    snap.mask.assign(width, 0);
    if (!snap.terminal) snap.mask = env_.feasible_actions(state_);
    return snap;
  }

 private:
  static MaskConfig effective_masks(MaskConfig masks, const RelaxPenalty& relax) {
    if (relax.enabled) {
      masks.mask_revisit = true;
      masks.mask_capacity = false;
      masks.mask_precedence = false;
    }
    return masks;
  }

  int instance_id_;
  RelaxPenalty relax_;
  Env env_;
  EnvState state_;
  std::vector<int> actions_;
};

// Picks training instances from a dataset. The draw is keyed on the episode
// index alone (not the trainer's stream), so two runs with equal sequence
// seeds face the same instance schedule regardless of their policies; that
// keeps paired curve comparisons meaningful.
struct DatasetEnvFactory {
  const std::vector<Instance>* instances = nullptr;
  RewardParams reward;
  MaskConfig masks;
  RelaxPenalty relax;
  bool sample_random = true;
  std::uint64_t sequence_seed = 0;

  EncodedRoutingEnv operator()(int episode, Rng&) const {
    const std::size_t count = instances->size();
    const std::size_t idx =
        sample_random
            ? static_cast<std::size_t>(Rng::derive_seed(sequence_seed, episode) % count)
            : static_cast<std::size_t>(episode) % count;
    return EncodedRoutingEnv((*instances)[idx], static_cast<int>(idx), reward, masks, relax);
  }
};

inline int argmax_masked(const std::vector<double>& values, const std::vector<std::uint8_t>& mask) {
  int best = -1;
  for (int a = 0; a < static_cast<int>(values.size()); ++a) {
    if (a < static_cast<int>(mask.size()) && !mask[a]) continue;
    if (best < 0 || values[a] > values[best]) best = a;
  }
  if (best < 0) throw no_feasible_action_error("no unmasked action available");
  return best;
}

inline int random_masked(const std::vector<std::uint8_t>& mask, Rng& rng) {
  std::vector<int> allowed;
  for (int a = 0; a < static_cast<int>(mask.size()); ++a)
    if (mask[a]) allowed.push_back(a);
  if (allowed.empty()) throw no_feasible_action_error("no unmasked action available");
  return allowed[rng.uniform_index(allowed.size())];
}

}  // namespace quroute
