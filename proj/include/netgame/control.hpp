#pragma once

#include <Eigen/Dense>

#include "netgame/model.hpp"

namespace netgame {

struct ControlSolution {
  Eigen::MatrixXd S_inf;  // Riccati fixed point
  Eigen::MatrixXd L;      // feedback gain, u = L xhat
  Eigen::MatrixXd M_inf;  // stage weight eta A^T S A + W - S
};

// L = -eta (eta B^T S B + U)^{-1} B^T S A. Depends only on plant and cost
// data, never on channel or scheduling parameters.
Eigen::MatrixXd control_gain(const Eigen::MatrixXd& S, const PlantModel& model,
                             const ControlWeights& weights);

Eigen::VectorXd control_input(const Eigen::MatrixXd& L,
                              const Eigen::VectorXd& xhat);

// M = eta A^T S A + W - S, symmetrized. Equals the Riccati correction term,
// a Gram form, hence PSD.
Eigen::MatrixXd performance_weight(const Eigen::MatrixXd& S,
                                   const PlantModel& model,
                                   const ControlWeights& weights);

// Convenience: infinite-horizon Riccati plus gain plus stage weight.
ControlSolution solve_control(const PlantModel& model,
                              const ControlWeights& weights,
                              double tol = 1e-10, int max_iter = 100000);

}  // namespace netgame
