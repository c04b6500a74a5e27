#pragma once

#include <vector>

#include "netgame/game.hpp"

namespace netgame {

// Discounted state-action visitation weights omega(tau, nu, a), normalized
// to sum 1, chain started at tau = 0.
struct OccupationMeasure {
  int N = 0;
  std::vector<double> omega;  // size 4N, layout as QTable

  double at(int tau, int nu, int a) const {
    return omega[4 * tau + 2 * nu + a];
  }
  double total() const;
};

struct EquilibriumReport {
  double value = 0.0;           // joint value under the pair
  double controller_gap = 0.0;  // improvement available to the minimizer
  double attacker_gap = 0.0;    // improvement available to the maximizer
  double epsilon = 0.0;         // max of the two gaps, clamped at 0
};

enum class Player { controller, attacker };

// Solves the transposed balance system (I - eta P_pi)^T mu = (1 - eta) e_0
// for the per-state weights, then splits by the policy mixes. The solve runs
// in extended precision end to end: the costs are of order 1e5 / (1 - eta),
// so double-precision factorization alone would not reach value agreement at
// the 1e-8 level.
OccupationMeasure occupation_measure(const PolicyPair& policies,
                                     const GameSpec& spec);

// Sup-norm residual of the balance equations
// sum_{tau,nu,a} omega(tau,nu,a) (1{tau'=tau} - eta P(tau'|tau,nu,a))
//   = (1 - eta) 1{tau'=0}.
double balance_residual(const OccupationMeasure& om, const GameSpec& spec);

// Discounted value through the occupation measure:
// sum omega(tau,nu,a) E[c(tau',nu,a) | tau,nu,a] / (1 - eta).
double discounted_value(const PolicyPair& policies, const GameSpec& spec);

// Same number by the direct route: solve (I - eta P_pi) v = c_pi and read
// v(0). Two algorithms, one value; tests pin their agreement.
double value_by_policy_evaluation(const PolicyPair& policies,
                                  const GameSpec& spec);

struct BestResponse {
  std::vector<double> policy;  // deterministic, entries 0 or 1
  double value = 0.0;          // optimal value from tau = 0
};

// Best response of the free player when `fixed_side` plays
// `opponent_policy`: marginalizes the opponent's mix into transitions and
// costs, runs value iteration on the resulting single-agent chain, then
// evaluates the greedy policy by an exact linear solve. The controller
// minimizes, the attacker maximizes.
BestResponse best_response(Player fixed_side,
                           const std::vector<double>& opponent_policy,
                           const GameSpec& spec);

// value = joint value of the pair; controller_gap = value - best response
// against the attacker; attacker_gap = best response against the controller
// - value; epsilon = max of both, clamped at 0.
EquilibriumReport epsilon_gap(const PolicyPair& policies,
                              const GameSpec& spec);

// Pads both policies with always-transmit / always-attack up to n_ref
// states, the behavior the truncation convention prescribes beyond the
// boundary. Used to compare truncations inside one reference game.
PolicyPair extend_policies(const PolicyPair& policies, int n_ref);

struct Lemma1Bin {
  int tau = 0;
  long long count = 0;
  double max_z = 0.0;  // worst entry z-score vs f^{tau+1}(Pbar) - Pbar
  bool tested = false;  // bins under 1e3 samples are skipped
};

struct Lemma1Report {
  long long samples = 0;
  double z_state_cross = 0.0;   // E[(x - xbar) xbar^T] entries vs 0
  double z_filter_cross = 0.0;  // E[(xhat_s - xbar) xbar^T] entries vs 0
  std::vector<Lemma1Bin> bins;  // conditional covariance per holding time
  bool pass = false;            // all tested z-scores within 4
};

// Closed-loop Monte Carlo check of the estimator orthogonality facts: the
// state and local-filter innovations are uncorrelated with the remote
// prediction, and the conditional innovation covariance given the previous
// holding time t equals f^{t+1}(Pbar) - Pbar. Samples are strided within
// episodes to cut serial correlation; episodes get derived seeds and are
// reduced in index order, so the report is identical at any thread count.
Lemma1Report lemma1_monte_carlo(const PlantModel& model,
                                const Eigen::MatrixXd& gain,
                                const PolicyPair& policies,
                                const GameSpec& spec, long long samples,
                                Rng& rng);

}  // namespace netgame
