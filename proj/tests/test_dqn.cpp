#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "quroute/brute_force.hpp"
#include "quroute/dqn.hpp"
#include "quroute/evaluate.hpp"

using namespace quroute;

namespace {

// Two-state deterministic chain: in state 0 action 0 pays 1 and action 1
// pays 0; both lead to state 1, where any action pays 2 and terminates.
struct ChainEnv {
  int state = 0;

  StateSnapshot snapshot() const {
    StateSnapshot s;
    s.instance_id = 0;
    s.classical_features = {state == 0 ? 1.0 : 0.0, state == 1 ? 1.0 : 0.0};
    s.mask = {1, 1};
    s.terminal = state == 2;
    return s;
  }
  StateSnapshot reset() {
    state = 0;
    return snapshot();
  }
  int max_episode_steps() const { return 4; }

  struct Result {
    StateSnapshot snapshot;
    double reward;
    bool done;
  };
  Result step(int action) {
    Result r{};
    if (state == 0) {
      r.reward = action == 0 ? 1.0 : 0.0;
      state = 1;
      r.done = false;
    } else {
      r.reward = 2.0;
      state = 2;
      r.done = true;
    }
    r.snapshot = snapshot();
    return r;
  }
};

struct ChainFactory {
  ChainEnv operator()(int, Rng&) const { return ChainEnv{}; }
};

// Injected network with a constant output vector.
class FixedNet final : public QNetwork {
 public:
  explicit FixedNet(std::vector<double> q) : q_(std::move(q)), params_{0.0} {}
  std::vector<double> forward(const StateSnapshot&) const override { return q_; }
  double train_batch(std::span<const BatchItem>, double, int) override { return 0.0; }
  std::vector<double>& parameters() override { return params_; }
  const std::vector<double>& parameters() const override { return params_; }
  std::unique_ptr<QNetwork> clone() const override { return std::make_unique<FixedNet>(*this); }
  nlohmann::json checkpoint() const override { return {}; }
  std::string kind() const override { return "fixed"; }

 private:
  std::vector<double> q_;
  std::vector<double> params_;
};

}  // namespace

TEST_CASE("soft updates blend parameters elementwise") {
  std::vector<double> target{0.0, 4.0};
  std::vector<double> online{2.0, 0.0};
  soft_update(target, online, 1.0);
  REQUIRE(target == online);

  target = {0.0, 4.0};
  soft_update(target, online, 0.0);
  REQUIRE(target == std::vector<double>{0.0, 4.0});

  target = {0.0};
  std::vector<double> online1{2.0};
  soft_update(target, online1, 0.5);
  REQUIRE(target[0] == Catch::Approx(1.0));

  std::vector<double> wrong{1.0, 2.0, 3.0};
  REQUIRE_THROWS_AS(soft_update(target, wrong, 0.5), std::invalid_argument);
}

TEST_CASE("the epsilon schedule decays linearly then holds") {
  TrainerConfig cfg;
  cfg.episodes = 100;
  cfg.epsilon_start = 1.0;
  cfg.epsilon_end = 0.05;
  cfg.epsilon_decay_fraction = 0.6;
  REQUIRE(epsilon_at(cfg, 0) == Catch::Approx(1.0));
  REQUIRE(epsilon_at(cfg, 30) == Catch::Approx(1.0 + 0.5 * (0.05 - 1.0)));
  REQUIRE(epsilon_at(cfg, 60) == Catch::Approx(0.05));
  REQUIRE(epsilon_at(cfg, 99) == Catch::Approx(0.05));
}

TEST_CASE("TD targets reduce to the reward at gamma = 0") {
  FixedNet online({0.3, 0.9});
  FixedNet target({0.5, -0.2});
  Transition t;
  t.reward = 1.25;
  t.done = false;
  t.next_state.mask = {1, 1};
  const Transition* batch[] = {&t};
  const auto targets = compute_td_targets(batch, online, target, 0.0, true);
  REQUIRE(targets[0] == Catch::Approx(1.25));
}

TEST_CASE("double-Q targets pick the online argmax but the target value") {
  FixedNet online({0.0, 1.0, 0.0});   // argmax action 1
  FixedNet target({5.0, 2.0, 9.0});   // argmax action 2
  Transition t;
  t.reward = 0.0;
  t.done = false;
  t.next_state.mask = {1, 1, 1};
  const Transition* batch[] = {&t};

  const auto double_q = compute_td_targets(batch, online, target, 1.0, true);
  REQUIRE(double_q[0] == Catch::Approx(2.0));  // target value at online's argmax

  const auto vanilla = compute_td_targets(batch, online, target, 1.0, false);
  REQUIRE(vanilla[0] == Catch::Approx(9.0));  // target's own max

  // masking excludes actions from the argmax
  t.next_state.mask = {1, 1, 0};
  const auto masked = compute_td_targets(batch, online, target, 1.0, false);
  REQUIRE(masked[0] == Catch::Approx(5.0));
}

TEST_CASE("a gradient step at gamma = 0 moves Q(s,a) toward the reward") {
  MlpQNetwork net(2, 16, 2, 5);
  StateSnapshot snap;
  snap.classical_features = {1.0, 0.0};
  snap.mask = {1, 1};
  const double reward = 2.0;
  const double q_before = net.forward(snap)[0];
  const double delta = q_before - reward;
  BatchItem item{&snap, 0, 2.0 * delta};
  net.train_batch(std::span<const BatchItem>(&item, 1), 0.01, 1);
  const double q_after = net.forward(snap)[0];
  REQUIRE(std::abs(q_after - reward) < std::abs(q_before - reward));
}

TEST_CASE("DQN learns the hand-computed chain Q-values") {
  MlpQNetwork net(2, 32, 2, 7);
  TrainerConfig cfg;
  cfg.episodes = 800;
  cfg.learning_rate = 0.02;
  cfg.discount = 0.9;
  cfg.batch_size = 16;
  cfg.tau_soft = 0.05;
  cfg.epsilon_start = 1.0;
  cfg.epsilon_end = 0.2;
  cfg.buffer_capacity = 512;
  cfg.seed = 11;
  ChainFactory factory;
  const TrainingCurve curve = train_dqn(factory, net, cfg);
  REQUIRE(curve.episodes.size() == 800);

  ChainEnv env;
  const StateSnapshot s0 = env.reset();
  const StateSnapshot s1 = env.step(0).snapshot;
  const std::vector<double> q0 = net.forward(s0);
  const std::vector<double> q1 = net.forward(s1);
  // Q(s1, *) = 2; Q(s0, 0) = 1 + 0.9*2 = 2.8; Q(s0, 1) = 0 + 1.8
  REQUIRE(q1[0] == Catch::Approx(2.0).margin(1e-2));
  REQUIRE(q1[1] == Catch::Approx(2.0).margin(1e-2));
  REQUIRE(q0[0] == Catch::Approx(2.8).margin(1e-2));
  REQUIRE(q0[1] == Catch::Approx(1.8).margin(1e-2));
}

TEST_CASE("priorities after a batch step equal |TD error| + epsilon") {
  const Instance inst = generate_instance(3, 1);
  std::vector<Instance> ds{inst};
  DatasetEnvFactory factory{&ds, {}, {}, {}, true};
  Rng rng(4);
  auto env = factory(0, rng);
  MlpQNetwork online(3 * inst.num_nodes() + 1, 16, inst.num_nodes(), 3);
  auto target = online.clone();

  PrioritizedReplayBuffer buffer(64, 0.6, 1e-3);
  StateSnapshot snap = env.reset();
  bool done = false;
  while (!done) {
    const int action = random_masked(snap.mask, rng);
    auto result = env.step(action);
    Transition t;
    t.state = snap;
    t.action = action;
    t.reward = result.reward;
    t.next_state = result.snapshot;
    t.done = result.done;
    buffer.push(std::move(t));
    snap = result.snapshot;
    done = result.done;
  }
  const auto batch = buffer.sample(3, 0.4, rng);
  REQUIRE(batch.has_value());
  const auto targets = compute_td_targets(batch->transitions, online, *target, 0.99, true);
  std::vector<double> abs_td(batch->transitions.size());
  for (std::size_t i = 0; i < batch->transitions.size(); ++i) {
    const Transition& tr = *batch->transitions[i];
    abs_td[i] = std::abs(online.forward(tr.state)[tr.action] - targets[i]);
  }
  buffer.update_priorities(batch->indices, abs_td);
  for (std::size_t i = 0; i < batch->indices.size(); ++i)
    REQUIRE(buffer.priority(batch->indices[i]) == Catch::Approx(abs_td[i] + 1e-3));
}

TEST_CASE("masked training on the routing env never raises an illegal action") {
  const Instance inst = generate_instance(13, 2);
  std::vector<Instance> ds{inst};
  DatasetEnvFactory factory{&ds, {}, {}, {}, true};
  MlpQNetwork net(3 * inst.num_nodes() + 1, 32, inst.num_nodes(), 9);
  TrainerConfig cfg;
  cfg.episodes = 40;
  cfg.batch_size = 16;
  cfg.learning_rate = 0.01;
  cfg.buffer_capacity = 512;
  cfg.seed = 17;
  REQUIRE_NOTHROW(train_dqn(factory, net, cfg));
}

TEST_CASE("a trained quantum DQN follows the unique single-request route") {
  const Instance inst = generate_instance(29, 1);
  std::vector<Instance> ds{inst};
  DatasetEnvFactory factory{&ds, {}, {}, {}, true};
  PqcQNetwork net(ds, {1, true, 1.0}, 31);
  TrainerConfig cfg;
  cfg.episodes = 12;
  cfg.batch_size = 8;
  cfg.learning_rate = 0.01;
  cfg.buffer_capacity = 128;
  cfg.seed = 23;
  const TrainingCurve curve = train_dqn(factory, net, cfg);
  REQUIRE(curve.episodes.size() == 12);

  Rng rng(1);
  auto env = factory(0, rng);
  StateSnapshot snap = env.reset();
  std::vector<int> actions;
  bool done = false;
  while (!done) {
    const int a = argmax_masked(net.forward(snap), snap.mask);
    actions.push_back(a);
    auto result = env.step(a);
    snap = result.snapshot;
    done = result.done;
  }
  REQUIRE(actions == std::vector<int>{1, 2, 0});
  const double greedy_cost = -0.0 + brute_force_solve(inst).cost;  // unique route
  const CostBreakdown cb = route_cost(inst, routes_from_actions(actions));
  REQUIRE(cb.cost == Catch::Approx(greedy_cost).margin(1e-9));
}
