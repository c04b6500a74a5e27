#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "netgame/channel.hpp"
#include "netgame/game.hpp"

namespace netgame {

// Schema violation; `path` names the offending field (e.g. "model.A").
struct ConfigError : std::runtime_error {
  std::string path;
  ConfigError(std::string p, const std::string& what)
      : std::runtime_error(p + ": " + what), path(std::move(p)) {}
};

struct GameConfig {
  int N = 10;
  double tol = 1e-10;
  int max_iter = 200000;
  int n_ref = 40;  // reference truncation for equilibrium-gap trends
};

struct LearningConfig {
  LearningSchedule schedule;
  long long episodes = 300000;
};

struct SimConfig {
  long long iter = 100000;
  Eigen::MatrixXd x0_cov;  // empty means identity
  std::uint64_t seed = 1;
};

struct SweepConfig {
  double cs_min = 0.0, cs_max = 2000.0;
  double ca_min = 0.0, ca_max = 2000.0;
  double step = 500.0;
};

struct VerifyConfig {
  double epsilon_threshold = 1e-6;  // gate for the verify command
  long long lemma1_samples = 200000;
};

struct ExperimentConfig {
  PlantModel model;
  ControlWeights weights;
  ChannelConfig channel;
  double c_s = 300.0;
  double c_a = 200.0;
  GameConfig game;
  LearningConfig learning;
  SimConfig sim;
  SweepConfig sweep;
  VerifyConfig verify;
};

// The two-state benchmark plant with the published costs and channel.
ExperimentConfig default_config();

// Parses and validates; throws ConfigError with the field path on any
// missing, mistyped, or out-of-range entry. Fields absent from the document
// keep their defaults, so a config may specify only what it changes.
ExperimentConfig config_from_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical serialization: keys sorted, full precision. Hashing this string
// identifies the experiment in every output artifact.
std::string config_to_text(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);  // 16 hex digits

// Expands the sweep ranges into the (c_s, c_a) grid, row-major in c_s.
std::vector<std::pair<double, double>> sweep_grid(const SweepConfig& sweep);

// Composes the validated game from the config's model, weights, channel and
// costs. Solves both Riccati problems; throws std::runtime_error if either
// fails to converge.
GameSpec build_spec(const ExperimentConfig& config);

}  // namespace netgame
