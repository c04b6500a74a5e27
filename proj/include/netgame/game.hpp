#pragma once

#include <vector>

#include "netgame/channel.hpp"
#include "netgame/rng.hpp"

namespace netgame {

// Q(tau, nu, a) over tau in {0..N-1}, nu, a in {0,1}, stored row-major.
struct QTable {
  int N = 0;
  std::vector<double> q;  // size 4N

  explicit QTable(int n = 0, double fill = 0.0) : N(n), q(4 * n, fill) {}

  double& at(int tau, int nu, int a) { return q[4 * tau + 2 * nu + a]; }
  double at(int tau, int nu, int a) const { return q[4 * tau + 2 * nu + a]; }
};

// Stationary mixed policies: per-state transmit and attack probabilities.
// Under the truncation convention the last state is always (1, 1).
struct PolicyPair {
  std::vector<double> pi_c;  // P(nu = 1 | tau)
  std::vector<double> pi_a;  // P(a = 1 | tau)

  int N() const { return static_cast<int>(pi_c.size()); }
};

struct MatrixGameSolution {
  double value = 0.0;
  double row_mix = 0.0;  // P(row action 1), row player minimizes
  double col_mix = 0.0;  // P(col action 1), column player maximizes
};

// Learning hyperparameters. The step size 1/visits^alpha_exponent with an
// exponent just above 0.5 keeps (1 - eta) * sum(alpha) large enough to move
// the Q level across the 1/(1-eta) dynamic range within the update budget;
// steeper decays stall far from the fixed point at eta near 1.
struct LearningSchedule {
  double alpha_exponent = 0.51;
  double epsilon_floor = 0.05;
  double epsilon_decay = 0.9999;
  int steps_per_episode = 200;
};

void validate_schedule(const LearningSchedule& schedule);

// tr(M_inf f^{tau_next}(Pbar)) + c_s nu - c_a a. The holding time is the
// post-transition one: the actions taken at step k determine tau_k, and the
// cost charges the covariance those actions produced.
double stage_cost(int tau_next, bool nu, bool a, const GameSpec& spec);

// Exact 2x2 zero-sum solve: pure saddle when minimax == maximin (relative
// tolerance 1e-12), ties mix 0.5/0.5, otherwise the closed-form interior
// mix. No pure deviation improves either side by more than 1e-10.
MatrixGameSolution solve_matrix_game_2x2(const Eigen::Matrix2d& payoff);

struct ShapleyResult {
  std::vector<double> V;  // per-state game value
  QTable q;
  PolicyPair policy;
  int iterations = 0;
  double sup_gap = 0.0;  // last successive-iterate gap
};

// Exact fixed point of the minimax Bellman operator, iterated until the
// successive sup-norm gap falls below max(tol, 8 eps ||V||_inf). The
// operator contracts at rate eta, so the floor guards against tolerances
// finer than rounding allows. Throws std::runtime_error past max_iter.
ShapleyResult shapley_value_iteration(const GameSpec& spec, double tol = 1e-10,
                                      int max_iter = 200000);

struct LearningResult {
  QTable q;
  PolicyPair policy;
  long long updates = 0;
};

// Nash Q-learning: epsilon-greedy play by both sides against the current
// Q-table saddle mixes, target = stage cost + eta * minimax value of the
// next state's slice, step size 1/visits^alpha_exponent per (tau, nu, a).
// The table starts flat at stage_cost(0,0,0)/(1-eta), the cost floor of the
// perfect channel, so early targets are already at the right scale.
// Episodes restart at tau = 0. Consumes `rng`; deterministic given its
// state.
LearningResult nash_q_learning(const GameSpec& spec,
                               const LearningSchedule& schedule,
                               long long episodes, Rng& rng);

// Per-state saddle mixes of the Q slices; the last state is overridden to
// (1, 1) to match the truncation convention.
PolicyPair extract_policies(const QTable& q);

}  // namespace netgame
