#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "quroute/rng.hpp"
#include "quroute/rollout.hpp"

namespace quroute {

struct Transition {
  StateSnapshot state;
  int action = 0;
  double reward = 0.0;
  StateSnapshot next_state;
  bool done = false;
};

struct SampledBatch {
  std::vector<const Transition*> transitions;
  std::vector<double> is_weights;
  std::vector<std::size_t> indices;
};

// Ring buffer with proportional prioritized sampling: P(i) ~ priority^alpha,
// importance weights (M P(i))^-beta normalized by their maximum. New entries
// get the running maximum priority so each transition is seen at least once.
class PrioritizedReplayBuffer {
 public:
  explicit PrioritizedReplayBuffer(std::size_t capacity, double priority_exponent = 0.6,
                                   double priority_epsilon = 1e-3)
      : capacity_(capacity),
        priority_exponent_(priority_exponent),
        priority_epsilon_(priority_epsilon) {}

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  double priority(std::size_t index) const { return priorities_[index]; }
  const Transition& at(std::size_t index) const { return storage_[index]; }

  void push(Transition t) {
    if (storage_.size() < capacity_) {
      storage_.push_back(std::move(t));
      priorities_.push_back(max_priority_);
    } else {
      storage_[next_] = std::move(t);
      priorities_[next_] = max_priority_;
      next_ = (next_ + 1) % capacity_;
    }
  }

  // Proportional draw with replacement; nullopt while underfull.
  std::optional<SampledBatch> sample(std::size_t batch_size, double is_beta, Rng& rng) const {
    if (storage_.size() < batch_size || batch_size == 0) return std::nullopt;
    const std::size_t m = storage_.size();
    std::vector<double> cumulative(m);
    double total = 0.0;
    double min_prob_mass = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double mass = std::pow(priorities_[i], priority_exponent_);
      total += mass;
      cumulative[i] = total;
      min_prob_mass = (i == 0) ? mass : std::min(min_prob_mass, mass);
    }
    SampledBatch batch;
    batch.transitions.reserve(batch_size);
    batch.indices.reserve(batch_size);
    batch.is_weights.reserve(batch_size);
    // max weight over the buffer belongs to the least likely entry
    const double max_weight =
        std::pow(static_cast<double>(m) * (min_prob_mass / total), -is_beta);
    for (std::size_t b = 0; b < batch_size; ++b) {
      const double u = rng.uniform() * total;
      std::size_t lo = 0, hi = m - 1;
      while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (cumulative[mid] < u) lo = mid + 1;
        else hi = mid;
      }
      const double prob = (lo == 0 ? cumulative[0] : cumulative[lo] - cumulative[lo - 1]) / total;
      batch.indices.push_back(lo);
      batch.transitions.push_back(&storage_[lo]);
      const double w = std::pow(static_cast<double>(m) * prob, -is_beta);
      batch.is_weights.push_back(max_weight > 0.0 ? w / max_weight : 1.0);
    }
    return batch;
  }

  void update_priorities(const std::vector<std::size_t>& indices,
                         const std::vector<double>& abs_td_errors) {
    for (std::size_t i = 0; i < indices.size(); ++i) {
      const double p = abs_td_errors[i] + priority_epsilon_;
      priorities_[indices[i]] = p;
      max_priority_ = std::max(max_priority_, p);
    }
  }

 private:
  std::size_t capacity_;
  double priority_exponent_;
  double priority_epsilon_;
  std::vector<Transition> storage_;
  std::vector<double> priorities_;
  std::size_t next_ = 0;
  double max_priority_ = 1.0;
};

inline std::optional<SampledBatch> sample_batch(const PrioritizedReplayBuffer& buffer,
                                                std::size_t batch_size, double is_beta,
                                                Rng& rng) {
  return buffer.sample(batch_size, is_beta, rng);
}

}  // namespace quroute
