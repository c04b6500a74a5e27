#pragma once

#include <Eigen/Dense>
#include <vector>

#include "netgame/model.hpp"
#include "netgame/rng.hpp"

namespace netgame {

// Packet delivery probabilities: lambda nominally, lambda_a while jammed.
struct ChannelConfig {
  double lambda = 0.9;
  double lambda_a = 0.6;
};

// Requires 0 <= lambda_a <= lambda <= 1. Degenerate equalities are admitted
// so absorbing-chain setups remain constructible; the configuration layer
// warns when lambda_a >= lambda makes the attack pointless.
void validate_channel(const ChannelConfig& cfg);

// The holding-time game: states tau in {0..N-1}, controller picks transmit
// nu, attacker picks jam a, stage costs from the estimation-quality trace
// plus action prices.
struct GameSpec {
  ChannelConfig channel;
  double c_s = 300.0;   // price of one transmission
  double c_a = 200.0;   // price of one attack
  double eta = 0.999;   // discount, strictly below 1
  int N = 10;           // truncation horizon
  Eigen::MatrixXd M_inf;
  Eigen::MatrixXd Pbar;
  PlantModel model;
};

// N >= 2, eta in (0,1), channel valid, matrices shaped to the model. Emits a
// warning (stderr) instead of failing when the delivery rate under attack is
// at or below the boundedness threshold.
void validate_game_spec(const GameSpec& spec);

// Builds a GameSpec by solving the two Riccati problems for the model.
GameSpec make_game_spec(const PlantModel& model, const ControlWeights& weights,
                        const ChannelConfig& channel, double c_s, double c_a,
                        int N);

// One channel use: gamma = 1 with probability 0 when idle, lambda when
// transmitting unjammed, lambda_a when transmitting jammed. Consumes a
// uniform draw only when transmitting, so idle steps leave the stream
// untouched.
bool sample_delivery(bool nu, bool a, const ChannelConfig& cfg, Rng& rng);

// Distribution of the next holding time given (tau, nu, a): delivery resets
// to 0, failure moves to min(tau+1, N-1), the truncated state self-loops on
// failure. Throws std::out_of_range for tau outside {0..N-1}.
Eigen::VectorXd transition_dist(int tau, bool nu, bool a, const GameSpec& spec);

// tr(M_inf f^tau(Pbar)) for tau = 0..N-1; the tau-dependent part of the
// stage cost, precomputed once per solve.
std::vector<double> holding_cost_table(const GameSpec& spec);

}  // namespace netgame
