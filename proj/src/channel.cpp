#include "netgame/channel.hpp"

#include <stdexcept>
#include <string>

#include "netgame/control.hpp"
#include "netgame/log.hpp"

namespace netgame {

void validate_channel(const ChannelConfig& cfg) {
  if (!(cfg.lambda_a >= 0.0) || !(cfg.lambda >= cfg.lambda_a) ||
      !(cfg.lambda <= 1.0))
    throw std::invalid_argument(
        "delivery rates must satisfy 0 <= lambda_a <= lambda <= 1");
}

void validate_game_spec(const GameSpec& spec) {
  validate_channel(spec.channel);
  if (spec.N < 2) throw std::invalid_argument("N must be at least 2");
  if (!(spec.eta > 0.0) || !(spec.eta < 1.0))
    throw std::invalid_argument("eta must lie strictly in (0, 1)");
  if (!(spec.c_s >= 0.0) || !(spec.c_a >= 0.0))
    throw std::invalid_argument("action prices must be nonnegative");
  const int nx = spec.model.nx();
  if (spec.M_inf.rows() != nx || spec.M_inf.cols() != nx)
    throw std::invalid_argument("M_inf must be square of the state dimension");
  if (spec.Pbar.rows() != nx || spec.Pbar.cols() != nx)
    throw std::invalid_argument("Pbar must be square of the state dimension");
  double margin = stability_margin(spec.model, spec.eta);
  if (spec.channel.lambda_a <= margin)
    log_warn("attacked delivery rate " + std::to_string(spec.channel.lambda_a) +
             " is at or below the boundedness threshold " +
             std::to_string(margin));
}

GameSpec make_game_spec(const PlantModel& model, const ControlWeights& weights,
                        const ChannelConfig& channel, double c_s, double c_a,
                        int N) {
  GameSpec spec;
  spec.channel = channel;
  spec.c_s = c_s;
  spec.c_a = c_a;
  spec.eta = weights.eta;
  spec.N = N;
  spec.model = model;
  spec.Pbar = steady_state_filter_riccati(model).Pbar;
  spec.M_inf = solve_control(model, weights).M_inf;
  validate_game_spec(spec);
  return spec;
}

bool sample_delivery(bool nu, bool a, const ChannelConfig& cfg, Rng& rng) {
  if (!nu) return false;
  return rng.bernoulli(a ? cfg.lambda_a : cfg.lambda);
}

Eigen::VectorXd transition_dist(int tau, bool nu, bool a,
                                const GameSpec& spec) {
  if (tau < 0 || tau >= spec.N)
    throw std::out_of_range("holding time " + std::to_string(tau) +
                            " outside {0.." + std::to_string(spec.N - 1) + "}");
  Eigen::VectorXd dist = Eigen::VectorXd::Zero(spec.N);
  int up = std::min(tau + 1, spec.N - 1);
  if (!nu) {
    dist(up) = 1.0;
    return dist;
  }
  double p = a ? spec.channel.lambda_a : spec.channel.lambda;
  dist(0) += p;
  dist(up) += 1.0 - p;
  return dist;
}

std::vector<double> holding_cost_table(const GameSpec& spec) {
  std::vector<double> table(spec.N);
  Eigen::MatrixXd X = spec.Pbar;
  for (int t = 0; t < spec.N; ++t) {
    table[t] = (spec.M_inf * X).trace();
    X = spec.model.A * X * spec.model.A.transpose() + spec.model.Q;
  }
  return table;
}

}  // namespace netgame
