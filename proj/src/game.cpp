#include "netgame/game.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace netgame {

void validate_schedule(const LearningSchedule& schedule) {
  if (!(schedule.alpha_exponent > 0.5) || schedule.alpha_exponent > 1.0)
    throw std::invalid_argument("alpha_exponent must lie in (0.5, 1]");
  if (schedule.epsilon_floor < 0.0 || schedule.epsilon_floor > 1.0)
    throw std::invalid_argument("epsilon_floor must lie in [0, 1]");
  if (!(schedule.epsilon_decay > 0.0) || schedule.epsilon_decay > 1.0)
    throw std::invalid_argument("epsilon_decay must lie in (0, 1]");
  if (schedule.steps_per_episode < 1)
    throw std::invalid_argument("steps_per_episode must be at least 1");
}

double stage_cost(int tau_next, bool nu, bool a, const GameSpec& spec) {
  if (tau_next < 0 || tau_next >= spec.N)
    throw std::out_of_range("holding time " + std::to_string(tau_next) +
                            " outside {0.." + std::to_string(spec.N - 1) + "}");
  Eigen::MatrixXd X = spec.Pbar;
  for (int t = 0; t < tau_next; ++t)
    X = spec.model.A * X * spec.model.A.transpose() + spec.model.Q;
  return (spec.M_inf * X).trace() + spec.c_s * (nu ? 1.0 : 0.0) -
         spec.c_a * (a ? 1.0 : 0.0);
}

MatrixGameSolution solve_matrix_game_2x2(const Eigen::Matrix2d& g) {
  double r0 = std::max(g(0, 0), g(0, 1));  // attacker's reply to row 0
  double r1 = std::max(g(1, 0), g(1, 1));
  double c0 = std::min(g(0, 0), g(1, 0));  // controller's reply to col 0
  double c1 = std::min(g(0, 1), g(1, 1));
  double minimax = std::min(r0, r1);
  double maximin = std::max(c0, c1);
  double tol = 1e-12 * std::max(std::fabs(minimax), 1.0);
  if (minimax <= maximin + tol) {
    // saddle in pure actions; a two-sided tie mixes evenly
    double p = (r0 <= minimax + tol && r1 <= minimax + tol)
                   ? 0.5
                   : (r1 <= minimax + tol ? 1.0 : 0.0);
    double q = (c0 >= maximin - tol && c1 >= maximin - tol)
                   ? 0.5
                   : (c1 >= maximin - tol ? 1.0 : 0.0);
    return {0.5 * (minimax + maximin), p, q};
  }
  // no pure saddle: both mixes interior, closed form
  double D = g(0, 0) - g(0, 1) - g(1, 0) + g(1, 1);
  double p = (g(0, 0) - g(0, 1)) / D;
  double q = (g(0, 0) - g(1, 0)) / D;
  double v = (g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0)) / D;
  p = std::clamp(p, 0.0, 1.0);
  q = std::clamp(q, 0.0, 1.0);
  return {v, p, q};
}

namespace {

// Q(tau) slice as a 2x2 payoff, rows = nu, cols = a
Eigen::Matrix2d slice(const QTable& q, int tau) {
  Eigen::Matrix2d g;
  g(0, 0) = q.at(tau, 0, 0);
  g(0, 1) = q.at(tau, 0, 1);
  g(1, 0) = q.at(tau, 1, 0);
  g(1, 1) = q.at(tau, 1, 1);
  return g;
}

}  // namespace

ShapleyResult shapley_value_iteration(const GameSpec& spec, double tol,
                                      int max_iter) {
  const int N = spec.N;
  const double eta = spec.eta;
  const std::vector<double> tr = holding_cost_table(spec);
  const double lam = spec.channel.lambda;
  const double lam_a = spec.channel.lambda_a;

  std::vector<double> V(N, 0.0), Vn(N, 0.0);
  QTable q(N);
  for (int it = 1; it <= max_iter; ++it) {
    for (int tau = 0; tau < N; ++tau) {
      int up = std::min(tau + 1, N - 1);
      Eigen::Matrix2d g;
      for (int a = 0; a < 2; ++a) {
        double miss = tr[up] + eta * V[up];
        double hit = tr[0] + eta * V[0];
        double pd = a ? lam_a : lam;
        g(0, a) = miss - spec.c_a * a;
        g(1, a) = pd * hit + (1.0 - pd) * miss + spec.c_s - spec.c_a * a;
      }
      q.at(tau, 0, 0) = g(0, 0);
      q.at(tau, 0, 1) = g(0, 1);
      q.at(tau, 1, 0) = g(1, 0);
      q.at(tau, 1, 1) = g(1, 1);
      Vn[tau] = solve_matrix_game_2x2(g).value;
    }
    double gap = 0.0, vmax = 0.0;
    for (int tau = 0; tau < N; ++tau) {
      gap = std::max(gap, std::fabs(Vn[tau] - V[tau]));
      vmax = std::max(vmax, std::fabs(Vn[tau]));
    }
    V.swap(Vn);
    double floor =
        8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, vmax);
    if (gap <= std::max(tol, floor))
      return {V, q, extract_policies(q), it, gap};
  }
  throw std::runtime_error("value iteration did not converge in " +
                           std::to_string(max_iter) + " iterations");
}

LearningResult nash_q_learning(const GameSpec& spec,
                               const LearningSchedule& schedule,
                               long long episodes, Rng& rng) {
  validate_schedule(schedule);
  if (episodes < 1) throw std::invalid_argument("episodes must be at least 1");
  const int N = spec.N;
  const double eta = spec.eta;
  const double p_exp = schedule.alpha_exponent;
  const std::vector<double> tr = holding_cost_table(spec);
  const double init = stage_cost(0, false, false, spec) / (1.0 - eta);

  QTable q(N, init);
  std::vector<double> alpha(4 * N, 1.0);
  std::vector<long long> visits(4 * N, 0);

  const long long total = episodes * schedule.steps_per_episode;
  double eps = 1.0;
  int tau = 0;
  for (long long t = 0; t < total; ++t) {
    if (t % schedule.steps_per_episode == 0) tau = 0;
    MatrixGameSolution m = solve_matrix_game_2x2(slice(q, tau));
    int nu = rng.bernoulli(eps) ? rng.bernoulli(0.5) : rng.bernoulli(m.row_mix);
    int a = rng.bernoulli(eps) ? rng.bernoulli(0.5) : rng.bernoulli(m.col_mix);
    int tau_next = std::min(tau + 1, N - 1);
    if (nu && rng.bernoulli(a ? spec.channel.lambda_a : spec.channel.lambda))
      tau_next = 0;
    double chat = tr[tau_next] + spec.c_s * nu - spec.c_a * a;
    double target = chat + eta * solve_matrix_game_2x2(slice(q, tau_next)).value;

    int idx = 4 * tau + 2 * nu + a;
    long long n = ++visits[idx];
    // alpha_n = n^{-p}: first-order advance, resynced by an exact pow every
    // 64 visits so drift stays below rounding
    double al;
    if (n <= 4096 || (n & 63) == 0)
      al = std::pow(static_cast<double>(n), -p_exp);
    else
      al = alpha[idx] * (1.0 - p_exp / static_cast<double>(n));
    alpha[idx] = al;
    q.q[idx] += al * (target - q.q[idx]);

    tau = tau_next;
    eps *= schedule.epsilon_decay;
    if (eps < schedule.epsilon_floor) eps = schedule.epsilon_floor;
  }
  return {q, extract_policies(q), total};
}

PolicyPair extract_policies(const QTable& q) {
  PolicyPair pair;
  pair.pi_c.resize(q.N);
  pair.pi_a.resize(q.N);
  for (int tau = 0; tau < q.N; ++tau) {
    MatrixGameSolution m = solve_matrix_game_2x2(slice(q, tau));
    pair.pi_c[tau] = m.row_mix;
    pair.pi_a[tau] = m.col_mix;
  }
  if (q.N > 0) {
    pair.pi_c[q.N - 1] = 1.0;
    pair.pi_a[q.N - 1] = 1.0;
  }
  return pair;
}

}  // namespace netgame
