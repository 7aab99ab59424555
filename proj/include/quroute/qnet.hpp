#pragma once

#include <memory>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "quroute/mlp.hpp"
#include "quroute/pqc.hpp"
#include "quroute/rollout.hpp"

namespace quroute {

// One sample of a squared-TD-error batch: coeff is dLoss/dQ(state, action),
// already carrying importance weights and the factor 2.
struct BatchItem {
  const StateSnapshot* state = nullptr;
  int action = 0;
  double coeff = 0.0;
};

// Common surface of the trainable action-value networks. Parameters are a
// single flat vector so target networks are clones and soft updates are
// elementwise.
class QNetwork {
 public:
  virtual ~QNetwork() = default;
  virtual std::vector<double> forward(const StateSnapshot& snapshot) const = 0;
  // Mean-gradient SGD step over the batch; returns the gradient norm.
  virtual double train_batch(std::span<const BatchItem> items, double learning_rate,
                             int threads) = 0;
  virtual std::vector<double>& parameters() = 0;
  virtual const std::vector<double>& parameters() const = 0;
  virtual std::unique_ptr<QNetwork> clone() const = 0;
  virtual nlohmann::json checkpoint() const = 0;
  virtual std::string kind() const = 0;
};

// PQC Q-network over a dataset: one circuit per instance (distances bake
// into the fixed IsingZZ angles), shared trainable angles and affine
// readout. Flat layout: theta, readout weight (row-major), bias.
class PqcQNetwork final : public QNetwork {
 public:
  PqcQNetwork(const std::vector<Instance>& instances, const CircuitConfig& config,
              std::uint64_t seed)
      : config_(config) {
    if (instances.empty()) throw std::invalid_argument("PQC network needs at least one instance");
    width_ = instances.front().num_nodes();
    for (const Instance& inst : instances) {
      if (inst.num_nodes() != width_)
        throw std::invalid_argument("dataset mixes instance sizes");
      specs_.push_back(build_pqc(inst, config_));
    }
    num_theta_ = specs_.front().num_param_slots;
    Rng rng(seed);
    params_.resize(num_theta_ + static_cast<std::size_t>(width_) * width_ + width_);
    for (int i = 0; i < num_theta_; ++i) params_[i] = rng.uniform(-0.1, 0.1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(width_));
    for (int i = 0; i < width_ * width_; ++i)
      params_[num_theta_ + i] = rng.uniform(-scale, scale);
    // biases start at zero
  }

  int width() const { return width_; }
  const CircuitConfig& config() const { return config_; }

  std::span<const double> theta() const { return {params_.data(), static_cast<std::size_t>(num_theta_)}; }
  std::span<const double> weight() const {
    return {params_.data() + num_theta_, static_cast<std::size_t>(width_) * width_};
  }
  std::span<const double> bias() const {
    return {params_.data() + num_theta_ + static_cast<std::size_t>(width_) * width_,
            static_cast<std::size_t>(width_)};
  }

  std::vector<double> forward(const StateSnapshot& snapshot) const override {
    const CircuitSpec& spec = specs_.at(snapshot.instance_id);
    Statevector scratch;
    const std::vector<double> z = z_values(spec, theta(), snapshot.quantum_features, scratch);
    return affine_readout(weight(), bias(), z);
  }

  double train_batch(std::span<const BatchItem> items, double learning_rate,
                     int threads) override {
    if (items.empty()) return 0.0;
    const std::size_t np = params_.size();
    std::vector<std::vector<double>> item_grads(items.size());

    auto compute_item = [&](std::size_t idx) {
      const BatchItem& item = items[idx];
      const CircuitSpec& spec = specs_.at(item.state->instance_id);
      Statevector scratch;
      const std::vector<double> z =
          z_values(spec, theta(), item.state->quantum_features, scratch);
      std::span<const double> row(params_.data() + num_theta_ +
                                      static_cast<std::size_t>(item.action) * width_,
                                  static_cast<std::size_t>(width_));
      const std::vector<double> dtheta =
          parameter_shift_weighted(spec, theta(), item.state->quantum_features, row);
      std::vector<double>& g = item_grads[idx];
      g.assign(np, 0.0);
      for (int j = 0; j < num_theta_; ++j) g[j] = item.coeff * dtheta[j];
      const std::size_t w_row = num_theta_ + static_cast<std::size_t>(item.action) * width_;
      for (int i = 0; i < width_; ++i) g[w_row + i] = item.coeff * z[i];
      g[num_theta_ + static_cast<std::size_t>(width_) * width_ + item.action] = item.coeff;
    };

    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(items.size())));
    if (workers == 1) {
      for (std::size_t i = 0; i < items.size(); ++i) compute_item(i);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t i = w; i < items.size(); i += workers) compute_item(i);
        });
      }
      for (std::thread& t : pool) t.join();
    }

    // Item-order reduction keeps results independent of the thread count.
    std::vector<double> grad(np, 0.0);
    for (const std::vector<double>& g : item_grads)
      for (std::size_t j = 0; j < np; ++j) grad[j] += g[j];
    const double inv = 1.0 / static_cast<double>(items.size());
    double norm_sq = 0.0;
    for (std::size_t j = 0; j < np; ++j) {
      grad[j] *= inv;
      norm_sq += grad[j] * grad[j];
      params_[j] -= learning_rate * grad[j];
    }
    return std::sqrt(norm_sq);
  }

  std::vector<double>& parameters() override { return params_; }
  const std::vector<double>& parameters() const override { return params_; }

  std::unique_ptr<QNetwork> clone() const override {
    return std::make_unique<PqcQNetwork>(*this);
  }

  nlohmann::json checkpoint() const override {
    nlohmann::json weight = nlohmann::json::array();
    for (int a = 0; a < width_; ++a) {
      nlohmann::json row = nlohmann::json::array();
      for (int i = 0; i < width_; ++i)
        row.push_back(params_[num_theta_ + static_cast<std::size_t>(a) * width_ + i]);
      weight.push_back(row);
    }
    return nlohmann::json{
        {"kind", "qdqn"},
        {"config",
         {{"layers", config_.layers},
          {"reupload", config_.reupload},
          {"isingzz_scale", config_.isingzz_scale}}},
        {"theta", std::vector<double>(theta().begin(), theta().end())},
        {"readout_weight", weight},
        {"readout_bias", std::vector<double>(bias().begin(), bias().end())},
        {"instance_size", width_}};
  }

  std::string kind() const override { return "qdqn"; }

  static std::unique_ptr<PqcQNetwork> from_checkpoint(const nlohmann::json& j,
                                                      const std::vector<Instance>& instances) {
    CircuitConfig config;
    config.layers = j.at("config").at("layers").get<int>();
    config.reupload = j.at("config").at("reupload").get<bool>();
    config.isingzz_scale = j.at("config").at("isingzz_scale").get<double>();
    auto net = std::make_unique<PqcQNetwork>(instances, config, 0);
    if (net->width_ != j.at("instance_size").get<int>())
      throw std::invalid_argument("checkpoint instance_size does not match dataset");
    const auto theta = j.at("theta").get<std::vector<double>>();
    if (static_cast<int>(theta.size()) != net->num_theta_)
      throw std::invalid_argument("checkpoint theta length mismatch");
    std::copy(theta.begin(), theta.end(), net->params_.begin());
    const auto& weight = j.at("readout_weight");
    for (int a = 0; a < net->width_; ++a)
      for (int i = 0; i < net->width_; ++i)
        net->params_[net->num_theta_ + static_cast<std::size_t>(a) * net->width_ + i] =
            weight[a][i].get<double>();
    const auto bias = j.at("readout_bias").get<std::vector<double>>();
    for (int i = 0; i < net->width_; ++i)
      net->params_[net->num_theta_ + static_cast<std::size_t>(net->width_) * net->width_ + i] =
          bias[i];
    return net;
  }

 private:
  CircuitConfig config_;
  int width_ = 0;
  int num_theta_ = 0;
  std::vector<CircuitSpec> specs_;
  std::vector<double> params_;
};

// Classical baseline: the MLP consumes the flat per-node feature vector.
class MlpQNetwork final : public QNetwork {
 public:
  MlpQNetwork(int input_dim, int hidden_dim, int num_actions, std::uint64_t seed) {
    Rng rng(seed);
    net_ = MlpNet(input_dim, hidden_dim, num_actions, rng);
  }

  const MlpNet& net() const { return net_; }

  std::vector<double> forward(const StateSnapshot& snapshot) const override {
    return net_.forward(snapshot.classical_features);
  }

  double train_batch(std::span<const BatchItem> items, double learning_rate,
                     int /*threads*/) override {
    if (items.empty()) return 0.0;
    std::vector<double> grad(net_.num_params(), 0.0);
    MlpNet::Scratch scratch;
    std::vector<double> dout(net_.out, 0.0);
    for (const BatchItem& item : items) {
      net_.forward(item.state->classical_features, scratch);
      std::fill(dout.begin(), dout.end(), 0.0);
      dout[item.action] = item.coeff;
      net_.backward(item.state->classical_features, dout, scratch, grad);
    }
    const double inv = 1.0 / static_cast<double>(items.size());
    double norm_sq = 0.0;
    for (std::size_t j = 0; j < grad.size(); ++j) {
      grad[j] *= inv;
      norm_sq += grad[j] * grad[j];
      net_.params[j] -= learning_rate * grad[j];
    }
    return std::sqrt(norm_sq);
  }

  std::vector<double>& parameters() override { return net_.params; }
  const std::vector<double>& parameters() const override { return net_.params; }

  std::unique_ptr<QNetwork> clone() const override {
    return std::make_unique<MlpQNetwork>(*this);
  }

  nlohmann::json checkpoint() const override {
    return nlohmann::json{{"kind", "ddqn-mlp"},
                          {"in", net_.in},
                          {"hidden", net_.hidden},
                          {"out", net_.out},
                          {"params", net_.params}};
  }

  std::string kind() const override { return "ddqn-mlp"; }

  static std::unique_ptr<MlpQNetwork> from_checkpoint(const nlohmann::json& j) {
    auto net = std::make_unique<MlpQNetwork>(j.at("in").get<int>(), j.at("hidden").get<int>(),
                                             j.at("out").get<int>(), 0);
    net->net_.params = j.at("params").get<std::vector<double>>();
    if (net->net_.params.size() != net->net_.num_params())
      throw std::invalid_argument("checkpoint parameter count mismatch");
    return net;
  }

 private:
  MlpNet net_;
};

}  // namespace quroute
