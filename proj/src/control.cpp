#include "netgame/control.hpp"

namespace netgame {

Eigen::MatrixXd control_gain(const Eigen::MatrixXd& S, const PlantModel& model,
                             const ControlWeights& weights) {
  const double eta = weights.eta;
  Eigen::MatrixXd G = eta * model.B.transpose() * S * model.B + weights.U;
  return -eta * G.ldlt().solve(model.B.transpose() * S * model.A);
}

Eigen::VectorXd control_input(const Eigen::MatrixXd& L,
                              const Eigen::VectorXd& xhat) {
  return L * xhat;
}

Eigen::MatrixXd performance_weight(const Eigen::MatrixXd& S,
                                   const PlantModel& model,
                                   const ControlWeights& weights) {
  Eigen::MatrixXd M =
      weights.eta * model.A.transpose() * S * model.A + weights.W - S;
  return 0.5 * (M + M.transpose());
}

ControlSolution solve_control(const PlantModel& model,
                              const ControlWeights& weights, double tol,
                              int max_iter) {
  ControlSolution sol;
  sol.S_inf = control_riccati_infinite(model, weights, tol, max_iter);
  sol.L = control_gain(sol.S_inf, model, weights);
  sol.M_inf = performance_weight(sol.S_inf, model, weights);
  return sol;
}

}  // namespace netgame
