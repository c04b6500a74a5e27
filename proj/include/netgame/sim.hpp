#pragma once

#include <string>
#include <vector>

#include "netgame/estimation.hpp"
#include "netgame/game.hpp"

namespace netgame {

struct StepRecord {
  Eigen::VectorXd x;       // plant state after the step
  Eigen::VectorXd xhat_s;  // local filter estimate
  Eigen::VectorXd xhat;    // remote estimate
  Eigen::VectorXd u;       // input applied during the step
  bool nu = false;
  bool a = false;
  bool gamma = false;
  long tau = 0;            // post-transition holding time, uncapped
  // game-layer cost realized this step: holding-time trace at the capped
  // tau plus action prices; quadratic state costs live in metrics, which
  // has the weights
  double stage_cost = 0.0;
};

struct EpisodeTrace {
  std::vector<StepRecord> steps;
  std::uint64_t seed = 0;
  std::string generator;
};

struct Metrics {
  double log_quad_cost = 0.0;  // log of the mean quadratic cost
  double tx_freq = 0.0;
  double attack_freq = 0.0;
  double discounted_cost = 0.0;
};

// One closed-loop run: plant with Gaussian noise, local steady-state filter,
// policy-sampled transmit and attack decisions (lookup capped at N-1),
// channel delivery, remote estimator, u = L xhat. Per step the draw order
// is fixed: process noise, measurement noise, x0 first; then transmit draw,
// attack draw, and a delivery draw only when transmitting. Deterministic
// given the seed.
EpisodeTrace run_episode(const PlantModel& model, const Eigen::MatrixXd& gain,
                         const PolicyPair& policies, const GameSpec& spec,
                         long long horizon, std::uint64_t seed,
                         const Eigen::MatrixXd& x0_cov);

Metrics metrics(const EpisodeTrace& trace, const ControlWeights& weights,
                const GameSpec& spec);

struct SweepRow {
  double c_s = 0.0;
  double c_a = 0.0;
  Metrics m;
  double game_value = 0.0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
};

// Re-solves the equilibrium at each grid point (the control gain is fixed by
// separation), simulates `iter` steps, and reports metrics plus the game
// value and equilibrium gap. Per-point seeds derive from the base seed and
// the point's costs, so the table does not depend on evaluation order; a
// point's solver failure is recorded in its row and the sweep continues.
std::vector<SweepRow> sweep(const std::vector<std::pair<double, double>>& grid,
                            const GameSpec& base_spec, const PlantModel& model,
                            const ControlWeights& weights, long long iter,
                            std::uint64_t seed, const Eigen::MatrixXd& x0_cov,
                            int threads = 1);

// Single-threaded reference with the identical seed schedule; the parallel
// sweep must match it byte for byte.
std::vector<SweepRow> sweep_serial(
    const std::vector<std::pair<double, double>>& grid,
    const GameSpec& base_spec, const PlantModel& model,
    const ControlWeights& weights, long long iter, std::uint64_t seed,
    const Eigen::MatrixXd& x0_cov);

// Header plus one row per point, numbers at 10 significant digits.
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace netgame
