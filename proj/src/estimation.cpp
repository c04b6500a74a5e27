#include "netgame/estimation.hpp"

#include <stdexcept>

namespace netgame {

LocalFilterState local_filter_step(const LocalFilterState& state,
                                   const Eigen::VectorXd& y,
                                   const Eigen::VectorXd& u_prev,
                                   const PlantModel& model) {
  Eigen::VectorXd pred = model.A * state.xhat_s + model.B * u_prev;
  LocalFilterState next = state;
  next.xhat_s = pred + state.Kbar * (y - model.C * pred);
  return next;
}

RemoteEstimatorState remote_update(const RemoteEstimatorState& state, bool nu,
                                   bool gamma, const Eigen::VectorXd* packet,
                                   const Eigen::VectorXd& u_prev,
                                   const PlantModel& model) {
  const bool delivered = nu && gamma;
  if (delivered != (packet != nullptr))
    throw std::logic_error("packet must be present exactly on delivery");
  RemoteEstimatorState next;
  next.last_u = u_prev;
  if (delivered) {
    next.xhat = *packet;
    next.tau = 0;
  } else {
    next.xhat = model.A * state.xhat + model.B * u_prev;
    next.tau = state.tau + 1;
  }
  return next;
}

}  // namespace netgame
