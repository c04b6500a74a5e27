#include "netgame/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace netgame {

namespace {

using nlohmann::json;

Eigen::MatrixXd as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty())
    throw ConfigError(path, "expected a nonempty array of rows");
  std::size_t cols = 0;
  for (const auto& row : j) {
    if (!row.is_array() || row.empty())
      throw ConfigError(path, "expected each row to be a nonempty array");
    if (cols == 0) cols = row.size();
    if (row.size() != cols) throw ConfigError(path, "rows differ in length");
    for (const auto& v : row)
      if (!v.is_number()) throw ConfigError(path, "expected numeric entries");
  }
  Eigen::MatrixXd M(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c)
      M(r, c) = j[r][c].get<double>();
  return M;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

long long as_count(const json& j, const std::string& path) {
  if (!j.is_number_integer() && !j.is_number_unsigned())
    throw ConfigError(path, "expected an integer");
  return j.get<long long>();
}

std::uint64_t as_seed(const json& j, const std::string& path) {
  if (!j.is_number_integer() && !j.is_number_unsigned())
    throw ConfigError(path, "expected an integer");
  if (j.is_number_integer() && j.get<long long>() < 0)
    throw ConfigError(path, "seed must be nonnegative");
  return j.get<std::uint64_t>();
}

std::pair<double, double> as_range(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError(path, "expected [min, max]");
  return {j[0].get<double>(), j[1].get<double>()};
}

// rejects typos instead of silently keeping a default
void check_keys(const json& j, const std::string& section,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (key == k) ok = true;
    if (!ok)
      throw ConfigError(section.empty() ? key : section + "." + key,
                        "unknown field");
  }
}

json matrix_to_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(row);
  }
  return rows;
}

void validate(const ExperimentConfig& cfg) {
  try {
    validate_plant(cfg.model);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("model", e.what());
  }
  try {
    validate_weights(cfg.weights, cfg.model.nx(), cfg.model.nin());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("weights", e.what());
  }
  try {
    validate_channel(cfg.channel);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("channel", e.what());
  }
  if (cfg.c_s < 0.0) throw ConfigError("costs.c_s", "must be nonnegative");
  if (cfg.c_a < 0.0) throw ConfigError("costs.c_a", "must be nonnegative");
  if (cfg.game.N < 2) throw ConfigError("game.N", "must be at least 2");
  if (!(cfg.game.tol > 0.0)) throw ConfigError("game.tol", "must be positive");
  if (cfg.game.max_iter < 1)
    throw ConfigError("game.max_iter", "must be at least 1");
  if (cfg.game.n_ref < cfg.game.N)
    throw ConfigError("game.n_ref", "must be at least game.N");
  try {
    validate_schedule(cfg.learning.schedule);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("learning", e.what());
  }
  if (cfg.learning.episodes < 1)
    throw ConfigError("learning.episodes", "must be at least 1");
  if (cfg.sim.iter < 1) throw ConfigError("sim.iter", "must be at least 1");
  if (cfg.sim.x0_cov.size() != 0) {
    const int nx = cfg.model.nx();
    if (cfg.sim.x0_cov.rows() != nx || cfg.sim.x0_cov.cols() != nx)
      throw ConfigError("sim.x0_cov", "must be square of the state dimension");
    if ((cfg.sim.x0_cov - cfg.sim.x0_cov.transpose()).cwiseAbs().maxCoeff() >
        1e-9)
      throw ConfigError("sim.x0_cov", "must be symmetric");
  }
  if (cfg.sweep.step <= 0.0) throw ConfigError("sweep.step", "must be positive");
  if (cfg.sweep.cs_min > cfg.sweep.cs_max)
    throw ConfigError("sweep.cs_range", "min exceeds max");
  if (cfg.sweep.ca_min > cfg.sweep.ca_max)
    throw ConfigError("sweep.ca_range", "min exceeds max");
  if (cfg.sweep.cs_min < 0.0 || cfg.sweep.ca_min < 0.0)
    throw ConfigError("sweep", "cost ranges must be nonnegative");
  if (!(cfg.verify.epsilon_threshold > 0.0))
    throw ConfigError("verify.epsilon_threshold", "must be positive");
  if (cfg.verify.lemma1_samples < 1000)
    throw ConfigError("verify.lemma1_samples", "must be at least 1000");
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.model.A = Eigen::MatrixXd{{1.25, 0.1}, {0.0, 1.0}};
  cfg.model.B = Eigen::MatrixXd{{1.0}, {2.0}};
  cfg.model.C = Eigen::MatrixXd{{1.0, 1.0}};
  cfg.model.Q = Eigen::MatrixXd::Identity(2, 2);
  cfg.model.R = Eigen::MatrixXd::Identity(1, 1);
  cfg.weights.W = Eigen::MatrixXd::Identity(2, 2);
  cfg.weights.U = Eigen::MatrixXd::Identity(1, 1);
  cfg.weights.eta = 0.999;
  cfg.sim.x0_cov = Eigen::MatrixXd::Identity(2, 2);
  return cfg;
}

ExperimentConfig config_from_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("(document)", e.what());
  }
  if (!j.is_object()) throw ConfigError("(document)", "expected a JSON object");
  check_keys(j, "",
             {"model", "weights", "channel", "costs", "game", "learning", "sim",
              "sweep", "verify"});

  ExperimentConfig cfg = default_config();
  if (j.contains("model")) {
    const json& m = j["model"];
    check_keys(m, "model", {"A", "B", "C", "Q", "R"});
    if (m.contains("A")) cfg.model.A = as_matrix(m["A"], "model.A");
    if (m.contains("B")) cfg.model.B = as_matrix(m["B"], "model.B");
    if (m.contains("C")) cfg.model.C = as_matrix(m["C"], "model.C");
    if (m.contains("Q")) cfg.model.Q = as_matrix(m["Q"], "model.Q");
    if (m.contains("R")) cfg.model.R = as_matrix(m["R"], "model.R");
  }
  if (j.contains("weights")) {
    const json& w = j["weights"];
    check_keys(w, "weights", {"W", "U", "eta"});
    if (w.contains("W")) cfg.weights.W = as_matrix(w["W"], "weights.W");
    if (w.contains("U")) cfg.weights.U = as_matrix(w["U"], "weights.U");
    if (w.contains("eta")) cfg.weights.eta = as_number(w["eta"], "weights.eta");
  }
  if (j.contains("channel")) {
    const json& c = j["channel"];
    check_keys(c, "channel", {"lambda", "lambda_a"});
    if (c.contains("lambda"))
      cfg.channel.lambda = as_number(c["lambda"], "channel.lambda");
    if (c.contains("lambda_a"))
      cfg.channel.lambda_a = as_number(c["lambda_a"], "channel.lambda_a");
  }
  if (j.contains("costs")) {
    const json& c = j["costs"];
    check_keys(c, "costs", {"c_s", "c_a"});
    if (c.contains("c_s")) cfg.c_s = as_number(c["c_s"], "costs.c_s");
    if (c.contains("c_a")) cfg.c_a = as_number(c["c_a"], "costs.c_a");
  }
  if (j.contains("game")) {
    const json& g = j["game"];
    check_keys(g, "game", {"N", "tol", "max_iter", "n_ref"});
    if (g.contains("N")) cfg.game.N = static_cast<int>(as_count(g["N"], "game.N"));
    if (g.contains("tol")) cfg.game.tol = as_number(g["tol"], "game.tol");
    if (g.contains("max_iter"))
      cfg.game.max_iter = static_cast<int>(as_count(g["max_iter"], "game.max_iter"));
    if (g.contains("n_ref"))
      cfg.game.n_ref = static_cast<int>(as_count(g["n_ref"], "game.n_ref"));
  }
  if (j.contains("learning")) {
    const json& l = j["learning"];
    check_keys(l, "learning",
               {"alpha_exponent", "epsilon_floor", "epsilon_decay", "episodes",
                "steps_per_episode"});
    LearningSchedule& s = cfg.learning.schedule;
    if (l.contains("alpha_exponent"))
      s.alpha_exponent = as_number(l["alpha_exponent"], "learning.alpha_exponent");
    if (l.contains("epsilon_floor"))
      s.epsilon_floor = as_number(l["epsilon_floor"], "learning.epsilon_floor");
    if (l.contains("epsilon_decay"))
      s.epsilon_decay = as_number(l["epsilon_decay"], "learning.epsilon_decay");
    if (l.contains("steps_per_episode"))
      s.steps_per_episode = static_cast<int>(
          as_count(l["steps_per_episode"], "learning.steps_per_episode"));
    if (l.contains("episodes"))
      cfg.learning.episodes = as_count(l["episodes"], "learning.episodes");
  }
  if (j.contains("sim")) {
    const json& s = j["sim"];
    check_keys(s, "sim", {"iter", "x0_cov", "seed"});
    if (s.contains("iter")) cfg.sim.iter = as_count(s["iter"], "sim.iter");
    if (s.contains("x0_cov"))
      cfg.sim.x0_cov = as_matrix(s["x0_cov"], "sim.x0_cov");
    if (s.contains("seed")) cfg.sim.seed = as_seed(s["seed"], "sim.seed");
  }
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    check_keys(s, "sweep", {"cs_range", "ca_range", "step"});
    if (s.contains("cs_range")) {
      auto [lo, hi] = as_range(s["cs_range"], "sweep.cs_range");
      cfg.sweep.cs_min = lo;
      cfg.sweep.cs_max = hi;
    }
    if (s.contains("ca_range")) {
      auto [lo, hi] = as_range(s["ca_range"], "sweep.ca_range");
      cfg.sweep.ca_min = lo;
      cfg.sweep.ca_max = hi;
    }
    if (s.contains("step")) cfg.sweep.step = as_number(s["step"], "sweep.step");
  }
  if (j.contains("verify")) {
    const json& v = j["verify"];
    check_keys(v, "verify", {"epsilon_threshold", "lemma1_samples"});
    if (v.contains("epsilon_threshold"))
      cfg.verify.epsilon_threshold =
          as_number(v["epsilon_threshold"], "verify.epsilon_threshold");
    if (v.contains("lemma1_samples"))
      cfg.verify.lemma1_samples =
          as_count(v["lemma1_samples"], "verify.lemma1_samples");
  }

  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("(file)", "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_text(buf.str());
}

std::string config_to_text(const ExperimentConfig& cfg) {
  json j;
  j["model"]["A"] = matrix_to_json(cfg.model.A);
  j["model"]["B"] = matrix_to_json(cfg.model.B);
  j["model"]["C"] = matrix_to_json(cfg.model.C);
  j["model"]["Q"] = matrix_to_json(cfg.model.Q);
  j["model"]["R"] = matrix_to_json(cfg.model.R);
  j["weights"]["W"] = matrix_to_json(cfg.weights.W);
  j["weights"]["U"] = matrix_to_json(cfg.weights.U);
  j["weights"]["eta"] = cfg.weights.eta;
  j["channel"]["lambda"] = cfg.channel.lambda;
  j["channel"]["lambda_a"] = cfg.channel.lambda_a;
  j["costs"]["c_s"] = cfg.c_s;
  j["costs"]["c_a"] = cfg.c_a;
  j["game"]["N"] = cfg.game.N;
  j["game"]["tol"] = cfg.game.tol;
  j["game"]["max_iter"] = cfg.game.max_iter;
  j["game"]["n_ref"] = cfg.game.n_ref;
  j["learning"]["alpha_exponent"] = cfg.learning.schedule.alpha_exponent;
  j["learning"]["epsilon_floor"] = cfg.learning.schedule.epsilon_floor;
  j["learning"]["epsilon_decay"] = cfg.learning.schedule.epsilon_decay;
  j["learning"]["steps_per_episode"] = cfg.learning.schedule.steps_per_episode;
  j["learning"]["episodes"] = cfg.learning.episodes;
  j["sim"]["iter"] = cfg.sim.iter;
  j["sim"]["x0_cov"] = matrix_to_json(
      cfg.sim.x0_cov.size() == 0
          ? Eigen::MatrixXd(Eigen::MatrixXd::Identity(cfg.model.nx(),
                                                      cfg.model.nx()))
          : cfg.sim.x0_cov);
  j["sim"]["seed"] = cfg.sim.seed;
  j["sweep"]["cs_range"] = {cfg.sweep.cs_min, cfg.sweep.cs_max};
  j["sweep"]["ca_range"] = {cfg.sweep.ca_min, cfg.sweep.ca_max};
  j["sweep"]["step"] = cfg.sweep.step;
  j["verify"]["epsilon_threshold"] = cfg.verify.epsilon_threshold;
  j["verify"]["lemma1_samples"] = cfg.verify.lemma1_samples;
  return j.dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = fnv1a64(config_to_text(cfg));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::pair<double, double>> sweep_grid(const SweepConfig& sweep) {
  std::vector<std::pair<double, double>> grid;
  const double slack = 1e-9 * sweep.step;
  for (int i = 0;; ++i) {
    double cs = sweep.cs_min + i * sweep.step;
    if (cs > sweep.cs_max + slack) break;
    for (int k = 0;; ++k) {
      double ca = sweep.ca_min + k * sweep.step;
      if (ca > sweep.ca_max + slack) break;
      grid.emplace_back(cs, ca);
    }
  }
  return grid;
}

GameSpec build_spec(const ExperimentConfig& cfg) {
  return make_game_spec(cfg.model, cfg.weights, cfg.channel, cfg.c_s, cfg.c_a,
                        cfg.game.N);
}

}  // namespace netgame
