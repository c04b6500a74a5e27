#pragma once

#include <Eigen/Dense>
#include <vector>

namespace netgame {

// Discrete-time LTI plant x' = Ax + Bu + w, y = Cx + v with w ~ N(0,Q),
// v ~ N(0,R). Aggregate by design: some solver-level tests exercise
// degenerate shapes (B = 0), so full validation is a separate call made on
// the configuration path.
struct PlantModel {
  Eigen::MatrixXd A, B, C, Q, R;

  int nx() const { return static_cast<int>(A.rows()); }
  int nin() const { return static_cast<int>(B.cols()); }
  int nout() const { return static_cast<int>(C.rows()); }
};

struct ControlWeights {
  Eigen::MatrixXd W, U;
  double eta = 0.999;
};

// Throws std::invalid_argument naming the offending field. Checks
// dimensions, Q > 0, R > 0, (A,B) controllability and (A,C) observability
// by rank of the stacked matrices (singular-value threshold 1e-8).
void validate_plant(const PlantModel& model);

// W PSD, U PD, eta in (0, 1]. eta = 1 is admitted because the undiscounted
// backward recursion is still well defined; the game layer separately
// requires eta < 1 for contraction.
void validate_weights(const ControlWeights& weights, int nx, int nin);

struct FilterSolution {
  Eigen::MatrixXd Pbar;  // steady filtered error covariance
  Eigen::MatrixXd Kbar;  // steady Kalman gain
  int iterations = 0;
};

// Iterates the filtered-covariance recursion P <- (I - KC) f(P) from
// P0 = Q until the successive sup-norm gap drops below tol. Throws
// std::runtime_error on non-convergence.
FilterSolution steady_state_filter_riccati(const PlantModel& model,
                                           double tol = 1e-10,
                                           int max_iter = 100000);

// Backward discounted Riccati recursion from the terminal weight W.
// Element j of the result is j backward steps from the terminal, so
// result[0] = W and result[K_horizon] is the initial-time matrix.
std::vector<Eigen::MatrixXd> control_riccati_finite(const PlantModel& model,
                                                    const ControlWeights& weights,
                                                    int K_horizon);

// Fixed point of the discounted control Riccati map, found by iterating the
// backward recursion until the successive sup-norm gap is below
// max(tol, rounding floor). Throws std::runtime_error on non-convergence.
Eigen::MatrixXd control_riccati_infinite(const PlantModel& model,
                                         const ControlWeights& weights,
                                         double tol = 1e-10,
                                         int max_iter = 100000);

// f(X) = AXA^T + Q composed `steps` times; f^0(X) = X.
Eigen::MatrixXd f_apply(const Eigen::MatrixXd& X, int steps,
                        const PlantModel& model);

// Delivery-rate threshold 1 - eta / rho(A)^2 from the closed-loop
// boundedness condition; the channel is safe when the attacked delivery
// probability exceeds it. Nilpotent A (rho = 0) returns -infinity: any rate
// satisfies the condition.
double stability_margin(const PlantModel& model, double eta);

}  // namespace netgame
