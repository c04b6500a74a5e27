#include "netgame/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace netgame {

namespace {

bool positive_definite(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) return false;
  if ((M - M.transpose()).cwiseAbs().maxCoeff() >
      1e-9 * std::max(1.0, M.cwiseAbs().maxCoeff()))
    return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  return es.eigenvalues().minCoeff() > 0.0;
}

int numeric_rank(const Eigen::MatrixXd& M) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  double cutoff = 1e-8 * std::max(1.0, sv(0));
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++r;
  return r;
}

double sup_norm(const Eigen::MatrixXd& M) { return M.cwiseAbs().maxCoeff(); }

}  // namespace

void validate_plant(const PlantModel& model) {
  const int nx = model.nx();
  if (nx == 0 || model.A.cols() != nx)
    throw std::invalid_argument("A must be square and nonempty");
  if (model.B.rows() != nx) throw std::invalid_argument("B row count must match A");
  if (model.C.cols() != nx) throw std::invalid_argument("C column count must match A");
  if (model.Q.rows() != nx || model.Q.cols() != nx)
    throw std::invalid_argument("Q must be square of the state dimension");
  if (model.R.rows() != model.nout() || model.R.cols() != model.nout())
    throw std::invalid_argument("R must be square of the output dimension");
  if (!positive_definite(model.Q))
    throw std::invalid_argument("Q must be symmetric positive definite");
  if (!positive_definite(model.R))
    throw std::invalid_argument("R must be symmetric positive definite");

  const int m = model.nin();
  Eigen::MatrixXd ctrb(nx, nx * m);
  Eigen::MatrixXd AkB = model.B;
  for (int k = 0; k < nx; ++k) {
    ctrb.middleCols(k * m, m) = AkB;
    AkB = model.A * AkB;
  }
  if (numeric_rank(ctrb) < nx)
    throw std::invalid_argument("(A, B) must be controllable");

  const int p = model.nout();
  Eigen::MatrixXd obsv(nx * p, nx);
  Eigen::MatrixXd CAk = model.C;
  for (int k = 0; k < nx; ++k) {
    obsv.middleRows(k * p, p) = CAk;
    CAk = CAk * model.A;
  }
  if (numeric_rank(obsv) < nx)
    throw std::invalid_argument("(A, C) must be observable");
}

void validate_weights(const ControlWeights& weights, int nx, int nin) {
  if (weights.W.rows() != nx || weights.W.cols() != nx)
    throw std::invalid_argument("W must be square of the state dimension");
  if (weights.U.rows() != nin || weights.U.cols() != nin)
    throw std::invalid_argument("U must be square of the input dimension");
  if ((weights.W - weights.W.transpose()).cwiseAbs().maxCoeff() >
      1e-9 * std::max(1.0, weights.W.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("W must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(weights.W);
  if (es.eigenvalues().minCoeff() < -1e-12)
    throw std::invalid_argument("W must be positive semidefinite");
  if (!positive_definite(weights.U))
    throw std::invalid_argument("U must be symmetric positive definite");
  if (!(weights.eta > 0.0) || weights.eta > 1.0)
    throw std::invalid_argument("eta must lie in (0, 1]");
}

FilterSolution steady_state_filter_riccati(const PlantModel& model, double tol,
                                           int max_iter) {
  const int nx = model.nx();
  Eigen::MatrixXd P = model.Q;
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(nx, nx);
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::MatrixXd prior = model.A * P * model.A.transpose() + model.Q;
    Eigen::MatrixXd S = model.C * prior * model.C.transpose() + model.R;
    Eigen::MatrixXd K = S.ldlt().solve(model.C * prior.transpose()).transpose();
    Eigen::MatrixXd next = (I - K * model.C) * prior;
    next = 0.5 * (next + next.transpose());
    double gap = sup_norm(next - P);
    P = next;
    if (gap <= std::max(tol, 8.0 * std::numeric_limits<double>::epsilon() *
                                 std::max(1.0, sup_norm(P)))) {
      Eigen::MatrixXd pr = model.A * P * model.A.transpose() + model.Q;
      Eigen::MatrixXd Sf = model.C * pr * model.C.transpose() + model.R;
      Eigen::MatrixXd Kf = Sf.ldlt().solve(model.C * pr.transpose()).transpose();
      return {P, Kf, it};
    }
  }
  throw std::runtime_error("filter Riccati did not converge in " +
                           std::to_string(max_iter) + " iterations");
}

std::vector<Eigen::MatrixXd> control_riccati_finite(const PlantModel& model,
                                                    const ControlWeights& weights,
                                                    int K_horizon) {
  if (K_horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
  const double eta = weights.eta;
  std::vector<Eigen::MatrixXd> S;
  S.reserve(K_horizon + 1);
  S.push_back(weights.W);
  for (int k = 0; k < K_horizon; ++k) {
    const Eigen::MatrixXd& Sk = S.back();
    Eigen::MatrixXd BtSA = model.B.transpose() * Sk * model.A;
    Eigen::MatrixXd G = eta * model.B.transpose() * Sk * model.B + weights.U;
    Eigen::MatrixXd next = weights.W +
                           eta * model.A.transpose() * Sk * model.A -
                           eta * eta * BtSA.transpose() * G.ldlt().solve(BtSA);
    S.push_back(0.5 * (next + next.transpose()));
  }
  return S;
}

Eigen::MatrixXd control_riccati_infinite(const PlantModel& model,
                                         const ControlWeights& weights,
                                         double tol, int max_iter) {
  const double eta = weights.eta;
  Eigen::MatrixXd S = weights.W;
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::MatrixXd BtSA = model.B.transpose() * S * model.A;
    Eigen::MatrixXd G = eta * model.B.transpose() * S * model.B + weights.U;
    Eigen::MatrixXd next = weights.W +
                           eta * model.A.transpose() * S * model.A -
                           eta * eta * BtSA.transpose() * G.ldlt().solve(BtSA);
    next = 0.5 * (next + next.transpose());
    double gap = sup_norm(next - S);
    S = next;
    if (gap <= std::max(tol, 8.0 * std::numeric_limits<double>::epsilon() *
                                 std::max(1.0, sup_norm(S))))
      return S;
  }
  throw std::runtime_error("control Riccati did not converge in " +
                           std::to_string(max_iter) + " iterations");
}

Eigen::MatrixXd f_apply(const Eigen::MatrixXd& X, int steps,
                        const PlantModel& model) {
  if (steps < 0) throw std::invalid_argument("steps must be nonnegative");
  Eigen::MatrixXd Y = X;
  for (int k = 0; k < steps; ++k)
    Y = model.A * Y * model.A.transpose() + model.Q;
  return Y;
}

double stability_margin(const PlantModel& model, double eta) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(model.A);
  double rho = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    rho = std::max(rho, std::abs(es.eigenvalues()(i)));
  if (rho == 0.0) return -std::numeric_limits<double>::infinity();
  return 1.0 - eta / (rho * rho);
}

}  // namespace netgame
