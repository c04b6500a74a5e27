// Command-line front end: solve the equilibrium, learn it, verify a policy
// pair, simulate the closed loop, or sweep the price grid. Every artifact
// embeds the config hash, the seed, and the generator name, and contains
// nothing else that varies between identical runs, so reruns are
// byte-identical.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "netgame/config.hpp"
#include "netgame/control.hpp"
#include "netgame/game.hpp"
#include "netgame/model.hpp"
#include "netgame/sim.hpp"
#include "netgame/verify.hpp"

using json = nlohmann::ordered_json;
using namespace netgame;

namespace {

constexpr int kExitUsage = 2;    // bad config, bad arguments
constexpr int kExitRuntime = 3;  // solver failure
constexpr int kExitGate = 4;     // verification gate tripped

json matrix_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(row);
  }
  return rows;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

struct Session {
  ExperimentConfig cfg;
  std::filesystem::path out;
  std::uint64_t seed = 0;
  int threads = 1;

  json stamp() const {
    json j;
    j["config_hash"] = config_hash(cfg);
    j["seed"] = seed;
    j["generator"] = std::string(Rng::name);
    return j;
  }

  void emit(const std::string& name, const json& j) const {
    std::filesystem::create_directories(out);
    write_text(out / name, j.dump(2) + "\n");
  }
};

PolicyPair load_policy_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("(policy)", "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("(policy)", e.what());
  }
  if (!j.contains("pi_c") || !j.contains("pi_a"))
    throw ConfigError("policy", "needs arrays pi_c and pi_a");
  PolicyPair p;
  try {
    p.pi_c = j["pi_c"].get<std::vector<double>>();
    p.pi_a = j["pi_a"].get<std::vector<double>>();
  } catch (const json::exception&) {
    throw ConfigError("policy", "pi_c and pi_a must be numeric arrays");
  }
  return p;
}

json policy_json(const PolicyPair& p) {
  json j;
  j["pi_c"] = p.pi_c;
  j["pi_a"] = p.pi_a;
  return j;
}

int cmd_solve(const Session& s) {
  const FilterSolution fs = steady_state_filter_riccati(s.cfg.model);
  const ControlSolution cs = solve_control(s.cfg.model, s.cfg.weights);
  const GameSpec spec = build_spec(s.cfg);
  const ShapleyResult eq =
      shapley_value_iteration(spec, s.cfg.game.tol, s.cfg.game.max_iter);
  const double margin = stability_margin(s.cfg.model, s.cfg.weights.eta);

  json j = s.stamp();
  j["filter"]["Pbar"] = matrix_json(fs.Pbar);
  j["filter"]["Kbar"] = matrix_json(fs.Kbar);
  j["filter"]["iterations"] = fs.iterations;
  j["control"]["S_inf"] = matrix_json(cs.S_inf);
  j["control"]["L"] = matrix_json(cs.L);
  j["control"]["M_inf"] = matrix_json(cs.M_inf);
  j["stability"]["margin"] = margin;
  j["stability"]["lambda_a"] = s.cfg.channel.lambda_a;
  j["stability"]["bounded"] = s.cfg.channel.lambda_a > margin;
  j["equilibrium"]["value"] = eq.V;
  j["equilibrium"]["policies"] = policy_json(eq.policy);
  j["equilibrium"]["iterations"] = eq.iterations;
  j["equilibrium"]["sup_gap"] = eq.sup_gap;
  s.emit("solve.json", j);
  std::cout << "solve: value " << eq.V[0] << ", gain written to "
            << (s.out / "solve.json").string() << "\n";
  return 0;
}

int cmd_learn(const Session& s) {
  const GameSpec spec = build_spec(s.cfg);
  const ShapleyResult exact =
      shapley_value_iteration(spec, s.cfg.game.tol, s.cfg.game.max_iter);
  Rng rng(s.seed);
  const LearningResult res = nash_q_learning(spec, s.cfg.learning.schedule,
                                             s.cfg.learning.episodes, rng);
  // per-state values of the learned table, for direct comparison
  std::vector<double> learned_v(spec.N);
  double err = 0.0, scale = 0.0;
  for (int t = 0; t < spec.N; ++t) {
    Eigen::Matrix2d g;
    for (int nu = 0; nu < 2; ++nu)
      for (int a = 0; a < 2; ++a) g(nu, a) = res.q.at(t, nu, a);
    learned_v[t] = solve_matrix_game_2x2(g).value;
    err = std::max(err, std::abs(learned_v[t] - exact.V[t]));
    scale = std::max(scale, std::abs(exact.V[t]));
  }

  json j = s.stamp();
  j["updates"] = res.updates;
  j["episodes"] = s.cfg.learning.episodes;
  j["value"] = learned_v;
  j["value_exact"] = exact.V;
  j["value_rel_sup_error"] = err / scale;
  j["q"] = res.q.q;
  s.emit("learn.json", j);

  json pol = s.stamp();
  pol.update(policy_json(res.policy));
  s.emit("policies.json", pol);

  // truncation study: equilibrium value from a fresh state as the horizon
  // of the holding-time game grows
  std::string csv = "N,value\n";
  for (int n = 3; n <= 15; ++n) {
    GameSpec sn = spec;
    sn.N = n;
    ShapleyResult r =
        shapley_value_iteration(sn, s.cfg.game.tol, s.cfg.game.max_iter);
    char line[64];
    std::snprintf(line, sizeof(line), "%d,%.10f\n", n, r.V[0]);
    csv += line;
  }
  std::filesystem::create_directories(s.out);
  write_text(s.out / "value_vs_n.csv", csv);

  std::cout << "learn: " << res.updates << " updates, value error "
            << err / scale << "\n";
  return 0;
}

int cmd_verify(const Session& s, const std::string& policy_path) {
  const GameSpec spec = build_spec(s.cfg);
  PolicyPair pair;
  if (policy_path.empty()) {
    pair = shapley_value_iteration(spec, s.cfg.game.tol, s.cfg.game.max_iter)
               .policy;
  } else {
    pair = load_policy_file(policy_path);
  }

  const EquilibriumReport rep = epsilon_gap(pair, spec);
  const OccupationMeasure om = occupation_measure(pair, spec);
  const double residual = balance_residual(om, spec);
  const double j_occ = discounted_value(pair, spec);
  const double j_pe = value_by_policy_evaluation(pair, spec);

  const ControlSolution cs = solve_control(s.cfg.model, s.cfg.weights);
  Rng rng(s.seed);
  const Lemma1Report lem = lemma1_monte_carlo(
      s.cfg.model, cs.L, pair, spec, s.cfg.verify.lemma1_samples, rng);

  const bool eps_ok = rep.epsilon <= s.cfg.verify.epsilon_threshold;
  json j = s.stamp();
  j["policies"] = policy_json(pair);
  j["equilibrium"]["value"] = rep.value;
  j["equilibrium"]["controller_gap"] = rep.controller_gap;
  j["equilibrium"]["attacker_gap"] = rep.attacker_gap;
  j["equilibrium"]["epsilon"] = rep.epsilon;
  j["equilibrium"]["threshold"] = s.cfg.verify.epsilon_threshold;
  j["equilibrium"]["pass"] = eps_ok;
  j["occupation"]["total"] = om.total();
  j["occupation"]["balance_residual"] = residual;
  j["occupation"]["value"] = j_occ;
  j["occupation"]["value_by_evaluation"] = j_pe;
  j["occupation"]["value_gap"] = std::abs(j_occ - j_pe);
  j["covariance_check"]["samples"] = lem.samples;
  j["covariance_check"]["z_state_cross"] = lem.z_state_cross;
  j["covariance_check"]["z_filter_cross"] = lem.z_filter_cross;
  j["covariance_check"]["pass"] = lem.pass;
  json bins = json::array();
  for (const Lemma1Bin& b : lem.bins) {
    json bj;
    bj["tau"] = b.tau;
    bj["count"] = b.count;
    bj["max_z"] = b.max_z;
    bj["tested"] = b.tested;
    bins.push_back(bj);
  }
  j["covariance_check"]["bins"] = bins;
  s.emit("verify.json", j);

  std::cout << "verify: epsilon " << rep.epsilon << " (threshold "
            << s.cfg.verify.epsilon_threshold << "), covariance check "
            << (lem.pass ? "pass" : "fail") << "\n";
  if (!eps_ok || !lem.pass) return kExitGate;
  return 0;
}

int cmd_simulate(const Session& s, const std::string& policy_path) {
  const GameSpec spec = build_spec(s.cfg);
  PolicyPair pair;
  if (policy_path.empty()) {
    pair = shapley_value_iteration(spec, s.cfg.game.tol, s.cfg.game.max_iter)
               .policy;
  } else {
    pair = load_policy_file(policy_path);
  }
  const ControlSolution cs = solve_control(s.cfg.model, s.cfg.weights);
  const EpisodeTrace trace =
      run_episode(s.cfg.model, cs.L, pair, spec, s.cfg.sim.iter, s.seed,
                  s.cfg.sim.x0_cov);
  const Metrics m = metrics(trace, s.cfg.weights, spec);

  json j = s.stamp();
  j["iter"] = s.cfg.sim.iter;
  j["policies"] = policy_json(pair);
  j["metrics"]["log_quad_cost"] = m.log_quad_cost;
  j["metrics"]["tx_freq"] = m.tx_freq;
  j["metrics"]["attack_freq"] = m.attack_freq;
  j["metrics"]["discounted_cost"] = m.discounted_cost;
  s.emit("simulate.json", j);
  std::cout << "simulate: " << s.cfg.sim.iter << " steps, tx " << m.tx_freq
            << ", attacks " << m.attack_freq << "\n";
  return 0;
}

int cmd_sweep(const Session& s) {
  const GameSpec spec = build_spec(s.cfg);
  const auto grid = sweep_grid(s.cfg.sweep);
  if (grid.empty()) throw ConfigError("sweep", "the grid is empty");
  const auto rows = sweep(grid, spec, s.cfg.model, s.cfg.weights,
                          s.cfg.sim.iter, s.seed, s.cfg.sim.x0_cov, s.threads);
  std::filesystem::create_directories(s.out);
  write_text(s.out / "sweep.csv", sweep_to_csv(rows));

  int failures = 0;
  for (const SweepRow& r : rows) failures += r.ok ? 0 : 1;
  json j = s.stamp();
  j["points"] = rows.size();
  j["iter"] = s.cfg.sim.iter;
  j["failures"] = failures;
  s.emit("sweep.json", j);
  std::cout << "sweep: " << rows.size() << " points, " << failures
            << " failures, table written to " << (s.out / "sweep.csv").string()
            << "\n";
  return failures == 0 ? 0 : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Joint transmission scheduling and denial-of-service attack game for "
      "networked control: equilibrium solver, Nash Q-learning, verification, "
      "and closed-loop simulation"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", policy_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;

  app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--out", out_dir, "output directory")
      ->capture_default_str();
  app.add_option("--seed", seed, "override the config seed")
      ->each([&seed_set](const std::string&) { seed_set = true; });
  app.add_option("--threads", threads, "worker threads for the sweep")
      ->capture_default_str();

  CLI::App* c_solve = app.add_subcommand(
      "solve", "filter, control, and equilibrium at one operating point");
  CLI::App* c_learn = app.add_subcommand(
      "learn", "Nash Q-learning plus the horizon-truncation study");
  CLI::App* c_verify = app.add_subcommand(
      "verify", "equilibrium gap, occupation identities, covariance check");
  c_verify->add_option("--policy", policy_path,
                       "verify this policy file instead of the solved pair");
  CLI::App* c_sim = app.add_subcommand(
      "simulate", "one closed-loop episode under the equilibrium pair");
  c_sim->add_option("--policy", policy_path,
                    "simulate this policy file instead of the solved pair");
  CLI::App* c_sweep =
      app.add_subcommand("sweep", "price grid: metrics per (c_s, c_a) point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    Session s;
    s.cfg = config_path.empty() ? default_config() : load_config(config_path);
    s.out = out_dir;
    s.seed = seed_set ? seed : s.cfg.sim.seed;
    s.threads = threads;

    if (c_solve->parsed()) return cmd_solve(s);
    if (c_learn->parsed()) return cmd_learn(s);
    if (c_verify->parsed()) return cmd_verify(s, policy_path);
    if (c_sim->parsed()) return cmd_simulate(s, policy_path);
    if (c_sweep->parsed()) return cmd_sweep(s);
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
