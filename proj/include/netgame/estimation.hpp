#pragma once

#include <Eigen/Dense>

#include "netgame/model.hpp"

namespace netgame {

// Sensor-side Kalman filter state. The filter runs at steady state: Pbar and
// Kbar are fixed for all time.
struct LocalFilterState {
  Eigen::VectorXd xhat_s;
  Eigen::MatrixXd Pbar;
  Eigen::MatrixXd Kbar;
};

// One measurement update with the steady gain:
// xhat_s' = pred + Kbar (y - C pred), pred = A xhat_s + B u_prev.
LocalFilterState local_filter_step(const LocalFilterState& state,
                                   const Eigen::VectorXd& y,
                                   const Eigen::VectorXd& u_prev,
                                   const PlantModel& model);

// Controller-side estimator. tau counts steps since the last delivered
// packet; the implied estimation covariance is f^tau(Pbar), derived, never
// stored.
struct RemoteEstimatorState {
  Eigen::VectorXd xhat;
  long tau = 0;
  Eigen::VectorXd last_u;
};

// Delivered (nu && gamma): adopt the packet, tau = 0. Otherwise predict
// xhat' = A xhat + B u_prev and increment tau. `packet` must be present
// exactly when nu && gamma; a mismatch throws std::logic_error.
RemoteEstimatorState remote_update(const RemoteEstimatorState& state, bool nu,
                                   bool gamma, const Eigen::VectorXd* packet,
                                   const Eigen::VectorXd& u_prev,
                                   const PlantModel& model);

}  // namespace netgame
