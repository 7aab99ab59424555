// quroute: reproducible experiment harness for the quantum-RL routing lab.
//
// Subcommands: gen, train, eval, compare, qsvt, replay.
// Exit codes: 0 success, 2 usage, 3 capacity, 4 IO.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "quroute/brute_force.hpp"
#include "quroute/csv.hpp"
#include "quroute/dqn.hpp"
#include "quroute/evaluate.hpp"
#include "quroute/instance.hpp"
#include "quroute/ising.hpp"
#include "quroute/manifest.hpp"
#include "quroute/ppo.hpp"
#include "quroute/qnet.hpp"
#include "quroute/qubo.hpp"
#include "quroute/variational.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace quroute;

namespace {

int default_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open: " + path);
  json j;
  in >> j;
  return j;
}

void dump_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write: " + path.string());
  out << j.dump(2) << '\n';
}

// ---- gen --------------------------------------------------------------------

struct GenOptions {
  std::uint64_t seed = 1;
  int n_requests = 2;
  int count = 10;
  int vehicles = 1;
  int capacity = 5;
  double speed_mps = 20.0;
};

json to_json(const GenOptions& o) {
  return json{{"seed", o.seed},         {"n_requests", o.n_requests}, {"count", o.count},
              {"vehicles", o.vehicles}, {"capacity", o.capacity},     {"speed_mps", o.speed_mps}};
}

GenOptions gen_options_from_json(const json& j) {
  GenOptions o;
  o.seed = j.at("seed").get<std::uint64_t>();
  o.n_requests = j.at("n_requests").get<int>();
  o.count = j.at("count").get<int>();
  o.vehicles = j.at("vehicles").get<int>();
  o.capacity = j.at("capacity").get<int>();
  o.speed_mps = j.at("speed_mps").get<double>();
  return o;
}

void run_gen(const GenOptions& o, const fs::path& out_dir) {
  RunManifest manifest;
  manifest.command = "gen";
  manifest.config = to_json(o);
  manifest.seed = o.seed;
  manifest.git_describe = git_describe_string();
  manifest.created_utc = utc_timestamp();
  manifest.outputs = {"instances.jsonl"};
  write_manifest(out_dir, manifest);

  FleetSpec fleet{o.vehicles, o.capacity, o.speed_mps};
  std::vector<Instance> instances;
  instances.reserve(o.count);
  for (int i = 0; i < o.count; ++i)
    instances.push_back(generate_instance(Rng::derive_seed(o.seed, i), o.n_requests, fleet));
  write_dataset((out_dir / "instances.jsonl").string(), instances);
  std::cout << "wrote " << instances.size() << " instances to " << (out_dir / "instances.jsonl")
            << "\n";
}

// ---- train ------------------------------------------------------------------

struct TrainOptions {
  std::string algo = "qdqn";
  std::string data;
  std::uint64_t seed = 1;
  int episodes = 300;
  // qdqn
  int layers = 1;
  bool reupload = true;
  double isingzz_scale = 1.0;
  // classical nets
  int hidden = 256;
  // shared DQN knobs
  double learning_rate = 0.0005;
  int batch_size = 32;
  double discount = 0.99;
  double tau_soft = 0.01;
  int buffer_capacity = 10000;
  bool double_q = true;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.6;
  // ppo knobs
  double clip_ratio = 0.2;
  int rollout_steps = 512;
  int ppo_epochs = 4;
  int minibatch = 64;
  double gae_lambda = 0.95;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  // env
  double alpha1 = 0.6;
  double alpha2 = 0.05;
  bool relax = false;
  int threads = default_threads();
};

json to_json(const TrainOptions& o) {
  return json{{"algo", o.algo},
              {"data", o.data},
              {"seed", o.seed},
              {"episodes", o.episodes},
              {"layers", o.layers},
              {"reupload", o.reupload},
              {"isingzz_scale", o.isingzz_scale},
              {"hidden", o.hidden},
              {"learning_rate", o.learning_rate},
              {"batch_size", o.batch_size},
              {"discount", o.discount},
              {"tau_soft", o.tau_soft},
              {"buffer_capacity", o.buffer_capacity},
              {"double_q", o.double_q},
              {"epsilon_start", o.epsilon_start},
              {"epsilon_end", o.epsilon_end},
              {"epsilon_decay_fraction", o.epsilon_decay_fraction},
              {"clip_ratio", o.clip_ratio},
              {"rollout_steps", o.rollout_steps},
              {"ppo_epochs", o.ppo_epochs},
              {"minibatch", o.minibatch},
              {"gae_lambda", o.gae_lambda},
              {"entropy_coef", o.entropy_coef},
              {"value_coef", o.value_coef},
              {"alpha1", o.alpha1},
              {"alpha2", o.alpha2},
              {"relax", o.relax},
              {"threads", o.threads}};
}

TrainOptions train_options_from_json(const json& j) {
  TrainOptions o;
  o.algo = j.at("algo").get<std::string>();
  o.data = j.at("data").get<std::string>();
  o.seed = j.at("seed").get<std::uint64_t>();
  o.episodes = j.at("episodes").get<int>();
  o.layers = j.at("layers").get<int>();
  o.reupload = j.at("reupload").get<bool>();
  o.isingzz_scale = j.at("isingzz_scale").get<double>();
  o.hidden = j.at("hidden").get<int>();
  o.learning_rate = j.at("learning_rate").get<double>();
  o.batch_size = j.at("batch_size").get<int>();
  o.discount = j.at("discount").get<double>();
  o.tau_soft = j.at("tau_soft").get<double>();
  o.buffer_capacity = j.at("buffer_capacity").get<int>();
  o.double_q = j.at("double_q").get<bool>();
  o.epsilon_start = j.at("epsilon_start").get<double>();
  o.epsilon_end = j.at("epsilon_end").get<double>();
  o.epsilon_decay_fraction = j.at("epsilon_decay_fraction").get<double>();
  o.clip_ratio = j.at("clip_ratio").get<double>();
  o.rollout_steps = j.at("rollout_steps").get<int>();
  o.ppo_epochs = j.at("ppo_epochs").get<int>();
  o.minibatch = j.at("minibatch").get<int>();
  o.gae_lambda = j.at("gae_lambda").get<double>();
  o.entropy_coef = j.at("entropy_coef").get<double>();
  o.value_coef = j.at("value_coef").get<double>();
  o.alpha1 = j.at("alpha1").get<double>();
  o.alpha2 = j.at("alpha2").get<double>();
  o.relax = j.at("relax").get<bool>();
  o.threads = j.at("threads").get<int>();
  return o;
}

void write_curve(const fs::path& out_dir, const TrainingCurve& curve) {
  CsvWriter csv((out_dir / "curve.csv").string(),
                {"episode", "cost", "loss", "epsilon", "grad_norm"});
  CsvWriter timing((out_dir / "timing.csv").string(), {"episode", "wall_ms"});
  for (std::size_t i = 0; i < curve.episodes.size(); ++i) {
    const EpisodeStats& e = curve.episodes[i];
    csv.write_row({std::to_string(i), format_number(e.cost), format_number(e.loss_mean),
                   format_number(e.epsilon), format_number(e.grad_norm)});
    timing.write_row({std::to_string(i), format_number(e.wall_ms)});
  }
}

void run_train(const TrainOptions& o, const fs::path& out_dir) {
  RunManifest manifest;
  manifest.command = "train";
  manifest.config = to_json(o);
  manifest.seed = o.seed;
  manifest.git_describe = git_describe_string();
  manifest.created_utc = utc_timestamp();
  manifest.outputs = {"curve.csv", "timing.csv", "checkpoint.json"};
  write_manifest(out_dir, manifest);

  const std::vector<Instance> instances = read_dataset(o.data);
  if (instances.empty()) throw std::invalid_argument("dataset is empty: " + o.data);
  const int width = instances.front().num_nodes();

  RewardParams reward{o.alpha1, o.alpha2};
  DatasetEnvFactory factory;
  factory.instances = &instances;
  factory.reward = reward;
  factory.relax.enabled = o.relax;

  TrainerConfig tc;
  tc.episodes = o.episodes;
  tc.learning_rate = o.learning_rate;
  tc.discount = o.discount;
  tc.batch_size = o.batch_size;
  tc.tau_soft = o.tau_soft;
  tc.epsilon_start = o.epsilon_start;
  tc.epsilon_end = o.epsilon_end;
  tc.epsilon_decay_fraction = o.epsilon_decay_fraction;
  tc.buffer_capacity = o.buffer_capacity;
  tc.double_q = o.double_q;
  tc.threads = o.threads;
  tc.seed = o.seed;

  if (o.algo == "qdqn") {
    CircuitConfig cc{o.layers, o.reupload, o.isingzz_scale};
    PqcQNetwork net(instances, cc, Rng::derive_seed(o.seed, 101));
    const TrainingCurve curve = train_dqn(factory, net, tc);
    write_curve(out_dir, curve);
    dump_json_file(out_dir / "checkpoint.json", net.checkpoint());
  } else if (o.algo == "ddqn-mlp") {
    MlpQNetwork net(3 * width + 1, o.hidden, width, Rng::derive_seed(o.seed, 102));
    const TrainingCurve curve = train_dqn(factory, net, tc);
    write_curve(out_dir, curve);
    dump_json_file(out_dir / "checkpoint.json", net.checkpoint());
  } else if (o.algo == "ppo") {
    PpoConfig pc;
    pc.episodes = o.episodes;
    pc.clip_ratio = o.clip_ratio;
    pc.rollout_steps = o.rollout_steps;
    pc.epochs = o.ppo_epochs;
    pc.minibatch = o.minibatch;
    pc.gae_lambda = o.gae_lambda;
    pc.discount = o.discount;
    pc.entropy_coef = o.entropy_coef;
    pc.value_coef = o.value_coef;
    pc.learning_rate = o.learning_rate;
    pc.hidden = o.hidden;
    pc.seed = o.seed;
    auto [policy, curve] = train_ppo(factory, 3 * width + 1, width, pc);
    write_curve(out_dir, curve);
    dump_json_file(out_dir / "checkpoint.json", ppo_policy_to_json(policy));
  } else {
    throw std::invalid_argument("unknown algo: " + o.algo);
  }
  std::cout << "trained " << o.algo << " for " << o.episodes << " episodes -> " << out_dir << "\n";
}

// ---- eval -------------------------------------------------------------------

struct EvalOptions {
  std::string checkpoint;
  std::string data;
  std::uint64_t seed = 1;
  double alpha1 = 0.6;
  double alpha2 = 0.05;
};

json to_json(const EvalOptions& o) {
  return json{{"checkpoint", o.checkpoint},
              {"data", o.data},
              {"seed", o.seed},
              {"alpha1", o.alpha1},
              {"alpha2", o.alpha2}};
}

EvalOptions eval_options_from_json(const json& j) {
  EvalOptions o;
  o.checkpoint = j.at("checkpoint").get<std::string>();
  o.data = j.at("data").get<std::string>();
  o.seed = j.at("seed").get<std::uint64_t>();
  o.alpha1 = j.at("alpha1").get<double>();
  o.alpha2 = j.at("alpha2").get<double>();
  return o;
}

void write_eval_outputs(const fs::path& out_dir, const EvalReport& report,
                        const std::string& method) {
  CsvWriter csv((out_dir / "eval.csv").string(), {"instance_id", "cost", "gap", "feasible"});
  int feasible_count = 0;
  for (const EvalRow& row : report.rows) {
    csv.write_row({std::to_string(row.instance_id), format_number(row.cost),
                   row.has_gap ? format_number(row.gap) : "",
                   row.feasible ? "1" : "0"});
    feasible_count += row.feasible ? 1 : 0;
  }
  json summary{{"method", method}, {"count", report.cost_stats.count},
               {"feasible_count", feasible_count}};
  if (report.cost_stats.count > 0) {
    summary["median"] = report.cost_stats.median;
    summary["q1"] = report.cost_stats.q1;
    summary["q3"] = report.cost_stats.q3;
    summary["mean"] = report.cost_stats.mean;
  } else {
    summary["median"] = nullptr;
    summary["q1"] = nullptr;
    summary["q3"] = nullptr;
    summary["mean"] = nullptr;
  }
  dump_json_file(out_dir / "summary.json", summary);
}

void run_eval(const EvalOptions& o, const fs::path& out_dir) {
  RunManifest manifest;
  manifest.command = "eval";
  manifest.config = to_json(o);
  manifest.seed = o.seed;
  manifest.git_describe = git_describe_string();
  manifest.created_utc = utc_timestamp();
  manifest.outputs = {"eval.csv", "summary.json"};
  write_manifest(out_dir, manifest);

  const std::vector<Instance> instances = read_dataset(o.data);
  RewardParams reward{o.alpha1, o.alpha2};
  const json ckpt = load_json_file(o.checkpoint);
  const std::string kind = ckpt.at("kind").get<std::string>();

  EvalReport report;
  if (kind == "qdqn") {
    auto net = PqcQNetwork::from_checkpoint(ckpt, instances);
    report = evaluate(GreedyQPolicy{net.get()}, instances, reward);
  } else if (kind == "ddqn-mlp") {
    auto net = MlpQNetwork::from_checkpoint(ckpt);
    if (!instances.empty() && net->net().in != 3 * instances.front().num_nodes() + 1)
      throw std::invalid_argument("checkpoint input width does not match dataset node count");
    report = evaluate(GreedyQPolicy{net.get()}, instances, reward);
  } else if (kind == "ppo") {
    PpoPolicy policy = ppo_policy_from_json(ckpt);
    if (!instances.empty() && policy.policy.in != 3 * instances.front().num_nodes() + 1)
      throw std::invalid_argument("checkpoint input width does not match dataset node count");
    report = evaluate([&](const StateSnapshot& s) { return policy.act_greedy(s); }, instances,
                      reward);
  } else if (kind == "random") {
    RandomFeasiblePolicy policy(o.seed);
    report = evaluate(policy, instances, reward);
  } else {
    throw std::invalid_argument("unknown checkpoint kind: " + kind);
  }
  write_eval_outputs(out_dir, report, kind);
  std::cout << "evaluated " << report.rows.size() << " instances -> " << out_dir << "\n";
}

// ---- compare ----------------------------------------------------------------

struct CompareOptions {
  std::vector<std::string> run_dirs;
};

void run_compare(const CompareOptions& o, const fs::path& out_dir) {
  RunManifest manifest;
  manifest.command = "compare";
  manifest.config = json{{"run_dirs", o.run_dirs}};
  manifest.seed = 0;
  manifest.git_describe = git_describe_string();
  manifest.created_utc = utc_timestamp();
  manifest.outputs = {"combined.csv"};
  write_manifest(out_dir, manifest);

  std::vector<std::string> missing;
  CsvWriter csv((out_dir / "combined.csv").string(),
                {"method", "run_dir", "instance_id", "cost", "gap", "feasible"});
  for (const std::string& dir : o.run_dirs) {
    const fs::path eval_csv = fs::path(dir) / "eval.csv";
    const fs::path summary = fs::path(dir) / "summary.json";
    if (!fs::exists(eval_csv) || !fs::exists(summary)) {
      missing.push_back(dir);
      continue;
    }
    std::string method = "unknown";
    try {
      method = load_json_file(summary.string()).value("method", "unknown");
    } catch (const std::exception&) {
    }
    std::ifstream in(eval_csv);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
      if (header) {
        header = false;
        continue;
      }
      if (line.empty()) continue;
      csv.write_row({method, dir, line});  // line is already instance_id,cost,gap,feasible
    }
  }
  if (!missing.empty()) {
    std::string msg = "missing evaluation outputs in:";
    for (const std::string& d : missing) msg += " " + d;
    throw io_error(msg);
  }
  std::cout << "combined " << o.run_dirs.size() << " runs -> " << out_dir << "\n";
}

// ---- qsvt -------------------------------------------------------------------

struct QsvtOptions {
  std::string instance_file;
  int index = 0;
  int steps = 0;  // 0: one step per customer
  int vehicles = 1;
  int depth = 2;
  int budget = 500;
  int restarts = 3;
  std::uint64_t seed = 1;
  double lambda_scale = 1.0;  // multiplies the calibrated penalties
};

json to_json(const QsvtOptions& o) {
  return json{{"instance_file", o.instance_file},
              {"index", o.index},
              {"steps", o.steps},
              {"vehicles", o.vehicles},
              {"depth", o.depth},
              {"budget", o.budget},
              {"restarts", o.restarts},
              {"seed", o.seed},
              {"lambda_scale", o.lambda_scale}};
}

QsvtOptions qsvt_options_from_json(const json& j) {
  QsvtOptions o;
  o.instance_file = j.at("instance_file").get<std::string>();
  o.index = j.at("index").get<int>();
  o.steps = j.at("steps").get<int>();
  o.vehicles = j.at("vehicles").get<int>();
  o.depth = j.at("depth").get<int>();
  o.budget = j.at("budget").get<int>();
  o.restarts = j.at("restarts").get<int>();
  o.seed = j.at("seed").get<std::uint64_t>();
  o.lambda_scale = j.at("lambda_scale").get<double>();
  return o;
}

Instance load_single_instance(const std::string& path, int index) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open: " + path);
  std::string first_line;
  std::getline(in, first_line);
  in.clear();
  in.seekg(0);
  // JSONL dataset or a single pretty-printed instance object
  json j;
  try {
    j = json::parse(first_line);
  } catch (const json::parse_error&) {
    in >> j;
    return instance_from_json(j);
  }
  std::vector<Instance> all = read_dataset(path);
  if (index < 0 || index >= static_cast<int>(all.size()))
    throw std::invalid_argument("instance index out of range");
  return all[index];
}

void run_qsvt(const QsvtOptions& o, const fs::path& out_dir) {
  RunManifest manifest;
  manifest.command = "qsvt";
  manifest.config = to_json(o);
  manifest.seed = o.seed;
  manifest.git_describe = git_describe_string();
  manifest.created_utc = utc_timestamp();
  manifest.outputs = {"qubo.json", "result.json"};
  write_manifest(out_dir, manifest);

  const Instance inst = load_single_instance(o.instance_file, o.index);
  const int steps = o.steps > 0 ? o.steps : inst.num_customers();
  const int qubits = inst.num_customers() * steps * o.vehicles;
  if (qubits > kMaxSimQubits || qubits > 12)
    throw capacity_error("QUBO needs " + std::to_string(qubits) +
                         " qubits; the variational baseline is capped at 12");

  PenaltyWeights penalties = calibrated_penalties(inst.travel.max_entry(), steps);
  penalties.visit *= o.lambda_scale;
  penalties.capacity *= o.lambda_scale;
  penalties.window *= o.lambda_scale;
  penalties.precedence *= o.lambda_scale;
  const QuboProblem problem = qubo_problem_from_instance(inst, steps, o.vehicles);
  const QuboModel model = build_qubo(problem, penalties);
  dump_json_file(out_dir / "qubo.json", qubo_to_json(model));

  const PauliHamiltonian h = to_ising(model);
  VariationalConfig vc;
  vc.budget_evals = o.budget;
  vc.restarts = o.restarts;
  vc.seed = o.seed;
  const VariationalResult res = variational_solve(h, o.depth, vc);
  const DecodedAssignment decoded = decode_assignment(problem, model, res.best_bits);

  std::string bitstring;
  for (std::uint8_t b : res.best_bits) bitstring += b ? '1' : '0';
  json result{{"energy", res.energy},
              {"best_bitstring", bitstring},
              {"best_bits_energy", res.best_bits_energy},
              {"converged", res.converged},
              {"evaluations", res.evaluations},
              {"num_qubits", h.num_qubits},
              {"depth", o.depth},
              {"gamma", res.params.gamma},
              {"beta", res.params.beta},
              {"decoded_routes", decoded.routes},
              {"feasibility",
               {{"visit_violations", decoded.visit_violations},
                {"capacity_violations", decoded.capacity_violations},
                {"window_violations", decoded.window_violations},
                {"precedence_violations", decoded.precedence_violations},
                {"feasible", decoded.feasible()}}},
              {"energy_trace", res.energy_trace}};
  if (decoded.feasible() && !decoded.routes.empty()) {
    const CostBreakdown cb = route_cost(inst, decoded.routes);
    result["route_cost"] = cb.cost;
  }
  dump_json_file(out_dir / "result.json", result);
  std::cout << "qsvt baseline: energy " << res.energy << ", bitstring " << bitstring << " -> "
            << out_dir << "\n";
}

// ---- replay -----------------------------------------------------------------

void run_replay(const std::string& manifest_path, const fs::path& out_dir) {
  const RunManifest m = read_manifest(manifest_path);
  if (m.command == "gen") run_gen(gen_options_from_json(m.config), out_dir);
  else if (m.command == "train") run_train(train_options_from_json(m.config), out_dir);
  else if (m.command == "eval") run_eval(eval_options_from_json(m.config), out_dir);
  else if (m.command == "qsvt") run_qsvt(qsvt_options_from_json(m.config), out_dir);
  else throw std::invalid_argument("manifest command cannot be replayed: " + m.command);
}

// Config-file precedence: defaults < config file < explicit flags.
template <typename T>
void config_override(const json& cfg, const char* key, CLI::App* cmd, const std::string& flag,
                     T& value) {
  if (cfg.contains(key) && cmd->count(flag) == 0) value = cfg.at(key).get<T>();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quroute: quantum reinforcement learning lab for pickup-and-delivery routing"};
  app.require_subcommand(1);

  std::string out_dir;
  std::string config_path;

  // gen
  GenOptions gen_opts;
  CLI::App* gen = app.add_subcommand("gen", "generate a dataset of instances");
  gen->add_option("--seed", gen_opts.seed, "master seed");
  gen->add_option("--n", gen_opts.n_requests, "requests per instance");
  gen->add_option("--count", gen_opts.count, "number of instances");
  gen->add_option("--vehicles", gen_opts.vehicles, "fleet size K");
  gen->add_option("--capacity", gen_opts.capacity, "vehicle capacity");
  gen->add_option("--speed-mps", gen_opts.speed_mps, "vehicle speed, metres/second");
  gen->add_option("--out", out_dir, "output directory")->required();
  gen->add_option("--config", config_path, "JSON config file");

  // train
  TrainOptions train_opts;
  CLI::App* train = app.add_subcommand("train", "train a policy");
  train->add_option("--algo", train_opts.algo, "qdqn | ddqn-mlp | ppo")
      ->check(CLI::IsMember({"qdqn", "ddqn-mlp", "ppo"}));
  train->add_option("--data", train_opts.data, "dataset (JSON lines)")->required();
  train->add_option("--seed", train_opts.seed, "run seed");
  train->add_option("--episodes", train_opts.episodes, "training episodes");
  train->add_option("--layers", train_opts.layers, "PQC layers p (qdqn)");
  train->add_flag("--no-reupload{false}", train_opts.reupload, "disable data reuploading");
  train->add_option("--isingzz-scale", train_opts.isingzz_scale, "IsingZZ angle scale");
  train->add_option("--hidden", train_opts.hidden, "hidden width (ddqn-mlp, ppo)");
  train->add_option("--lr", train_opts.learning_rate, "learning rate");
  train->add_option("--batch", train_opts.batch_size, "replay batch size");
  train->add_option("--gamma", train_opts.discount, "discount factor");
  train->add_option("--tau", train_opts.tau_soft, "soft target update rate");
  train->add_option("--buffer", train_opts.buffer_capacity, "replay buffer capacity");
  train->add_flag("--no-double{false}", train_opts.double_q, "disable double DQN targets");
  train->add_option("--eps-start", train_opts.epsilon_start, "initial epsilon");
  train->add_option("--eps-end", train_opts.epsilon_end, "final epsilon");
  train->add_option("--eps-frac", train_opts.epsilon_decay_fraction,
                    "fraction of episodes spent decaying");
  train->add_option("--clip", train_opts.clip_ratio, "PPO clip ratio");
  train->add_option("--rollout", train_opts.rollout_steps, "PPO rollout length");
  train->add_option("--ppo-epochs", train_opts.ppo_epochs, "PPO epochs per batch");
  train->add_option("--minibatch", train_opts.minibatch, "PPO minibatch size");
  train->add_option("--gae-lambda", train_opts.gae_lambda, "GAE lambda");
  train->add_option("--entropy-coef", train_opts.entropy_coef, "entropy bonus coefficient");
  train->add_option("--value-coef", train_opts.value_coef, "value loss coefficient");
  train->add_option("--alpha1", train_opts.alpha1, "monetary coefficient per travel minute");
  train->add_option("--alpha2", train_opts.alpha2, "monetary coefficient per delay minute");
  train->add_flag("--relax", train_opts.relax,
                  "penalize capacity/precedence violations instead of masking");
  train->add_option("--threads", train_opts.threads, "worker threads");
  train->add_option("--out", out_dir, "output directory")->required();
  train->add_option("--config", config_path, "JSON config file");

  // eval
  EvalOptions eval_opts;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  eval_cmd->add_option("--checkpoint", eval_opts.checkpoint, "checkpoint JSON")->required();
  eval_cmd->add_option("--data", eval_opts.data, "dataset (JSON lines)")->required();
  eval_cmd->add_option("--seed", eval_opts.seed, "seed (random policy only)");
  eval_cmd->add_option("--alpha1", eval_opts.alpha1, "monetary coefficient per travel minute");
  eval_cmd->add_option("--alpha2", eval_opts.alpha2, "monetary coefficient per delay minute");
  eval_cmd->add_option("--out", out_dir, "output directory")->required();
  eval_cmd->add_option("--config", config_path, "JSON config file");

  // compare
  CompareOptions compare_opts;
  CLI::App* compare = app.add_subcommand("compare", "combine evaluation runs into one table");
  compare->add_option("dirs", compare_opts.run_dirs, "evaluation run directories")->required();
  compare->add_option("--out", out_dir, "output directory")->required();

  // qsvt
  QsvtOptions qsvt_opts;
  CLI::App* qsvt = app.add_subcommand("qsvt", "QUBO + variational mixer/cost baseline");
  qsvt->add_option("--instance", qsvt_opts.instance_file, "instance JSON or dataset")->required();
  qsvt->add_option("--index", qsvt_opts.index, "row when a dataset is given");
  qsvt->add_option("--steps", qsvt_opts.steps, "position steps T (default: customer count)");
  qsvt->add_option("--vehicles", qsvt_opts.vehicles, "vehicles K in the model");
  qsvt->add_option("--depth", qsvt_opts.depth, "mixer/cost layers");
  qsvt->add_option("--budget", qsvt_opts.budget, "optimizer evaluations per restart");
  qsvt->add_option("--restarts", qsvt_opts.restarts, "optimizer restarts");
  qsvt->add_option("--seed", qsvt_opts.seed, "run seed");
  qsvt->add_option("--lambda-scale", qsvt_opts.lambda_scale, "penalty weight multiplier");
  qsvt->add_option("--out", out_dir, "output directory")->required();
  qsvt->add_option("--config", config_path, "JSON config file");

  // replay
  std::string manifest_path;
  CLI::App* replay = app.add_subcommand("replay", "re-run a command from its manifest");
  replay->add_option("--manifest", manifest_path, "manifest.json of a previous run")->required();
  replay->add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    json cfg;
    if (!config_path.empty()) cfg = load_json_file(config_path);

    if (gen->parsed()) {
      if (!cfg.is_null()) {
        config_override(cfg, "seed", gen, "--seed", gen_opts.seed);
        config_override(cfg, "n_requests", gen, "--n", gen_opts.n_requests);
        config_override(cfg, "count", gen, "--count", gen_opts.count);
        config_override(cfg, "vehicles", gen, "--vehicles", gen_opts.vehicles);
        config_override(cfg, "capacity", gen, "--capacity", gen_opts.capacity);
        config_override(cfg, "speed_mps", gen, "--speed-mps", gen_opts.speed_mps);
      }
      run_gen(gen_opts, out_dir);
    } else if (train->parsed()) {
      if (!cfg.is_null()) {
        config_override(cfg, "algo", train, "--algo", train_opts.algo);
        config_override(cfg, "seed", train, "--seed", train_opts.seed);
        config_override(cfg, "episodes", train, "--episodes", train_opts.episodes);
        config_override(cfg, "layers", train, "--layers", train_opts.layers);
        config_override(cfg, "hidden", train, "--hidden", train_opts.hidden);
        config_override(cfg, "learning_rate", train, "--lr", train_opts.learning_rate);
        config_override(cfg, "batch_size", train, "--batch", train_opts.batch_size);
        config_override(cfg, "discount", train, "--gamma", train_opts.discount);
        config_override(cfg, "tau_soft", train, "--tau", train_opts.tau_soft);
        config_override(cfg, "buffer_capacity", train, "--buffer", train_opts.buffer_capacity);
        config_override(cfg, "epsilon_start", train, "--eps-start", train_opts.epsilon_start);
        config_override(cfg, "epsilon_end", train, "--eps-end", train_opts.epsilon_end);
        config_override(cfg, "threads", train, "--threads", train_opts.threads);
      }
      run_train(train_opts, out_dir);
    } else if (eval_cmd->parsed()) {
      run_eval(eval_opts, out_dir);
    } else if (compare->parsed()) {
      run_compare(compare_opts, out_dir);
    } else if (qsvt->parsed()) {
      run_qsvt(qsvt_opts, out_dir);
    } else if (replay->parsed()) {
      run_replay(manifest_path, out_dir);
    }
  } catch (const capacity_error& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const infeasible_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
