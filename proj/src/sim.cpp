#include "netgame/sim.hpp"

#include <cmath>
#include <cstdio>

#include "netgame/control.hpp"
#include "netgame/verify.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace netgame {

namespace {

Eigen::MatrixXd cov_sqrt(const Eigen::MatrixXd& cov, int nx) {
  if (cov.size() == 0) return Eigen::MatrixXd::Identity(nx, nx);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

EpisodeTrace run_episode(const PlantModel& model, const Eigen::MatrixXd& gain,
                         const PolicyPair& policies, const GameSpec& spec,
                         long long horizon, std::uint64_t seed,
                         const Eigen::MatrixXd& x0_cov) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  const int nx = model.nx();
  const int ny = model.nout();
  const int N = spec.N;
  const FilterSolution fs = steady_state_filter_riccati(model);
  const Eigen::MatrixXd cholQ = model.Q.llt().matrixL();
  const Eigen::MatrixXd cholR = model.R.llt().matrixL();
  const Eigen::MatrixXd x0_fac = cov_sqrt(x0_cov, nx);
  const std::vector<double> tr = holding_cost_table(spec);

  EpisodeTrace trace;
  trace.seed = seed;
  trace.generator = std::string(Rng::name);
  trace.steps.reserve(horizon);

  Rng rng(seed);
  Eigen::VectorXd z(nx), zv(ny);
  for (int i = 0; i < nx; ++i) z(i) = rng.gaussian();
  Eigen::VectorXd x = x0_fac * z;
  Eigen::VectorXd xhat_s = Eigen::VectorXd::Zero(nx);
  Eigen::VectorXd xhat = Eigen::VectorXd::Zero(nx);
  Eigen::VectorXd u = gain * xhat;
  long tau = 0;

  for (long long k = 1; k <= horizon; ++k) {
    for (int i = 0; i < nx; ++i) z(i) = rng.gaussian();
    for (int i = 0; i < ny; ++i) zv(i) = rng.gaussian();
    x = model.A * x + model.B * u + cholQ * z;
    Eigen::VectorXd y = model.C * x + cholR * zv;
    Eigen::VectorXd pred = model.A * xhat_s + model.B * u;
    xhat_s = pred + fs.Kbar * (y - model.C * pred);
    Eigen::VectorXd xbar = model.A * xhat + model.B * u;
    int look = static_cast<int>(std::min<long>(tau, N - 1));
    bool nu = rng.bernoulli(policies.pi_c[look]);
    bool a = rng.bernoulli(policies.pi_a[look]);
    bool gamma = sample_delivery(nu, a, spec.channel, rng);
    if (nu && gamma) {
      xhat = xhat_s;
      tau = 0;
    } else {
      xhat = xbar;
      tau = tau + 1;
    }
    u = gain * xhat;

    StepRecord rec;
    rec.x = x;
    rec.xhat_s = xhat_s;
    rec.xhat = xhat;
    rec.u = u;
    rec.nu = nu;
    rec.a = a;
    rec.gamma = gamma;
    rec.tau = tau;
    rec.stage_cost = tr[static_cast<int>(std::min<long>(tau, N - 1))] +
                     spec.c_s * (nu ? 1.0 : 0.0) - spec.c_a * (a ? 1.0 : 0.0);
    trace.steps.push_back(std::move(rec));
  }
  return trace;
}

Metrics metrics(const EpisodeTrace& trace, const ControlWeights& weights,
                const GameSpec& spec) {
  if (trace.steps.empty()) throw std::invalid_argument("trace must be nonempty");
  const long long K = static_cast<long long>(trace.steps.size());
  double quad_sum = 0.0, tx = 0.0, atk = 0.0, disc = 0.0, eta_pow = 1.0;
  for (const StepRecord& s : trace.steps) {
    double quad = s.x.dot(weights.W * s.x) + s.u.dot(weights.U * s.u);
    double stage = quad + spec.c_s * (s.nu ? 1.0 : 0.0) -
                   spec.c_a * (s.a ? 1.0 : 0.0);
    quad_sum += quad;
    tx += s.nu ? 1.0 : 0.0;
    atk += s.a ? 1.0 : 0.0;
    disc += eta_pow * stage;
    eta_pow *= spec.eta;
  }
  Metrics m;
  m.log_quad_cost = std::log(quad_sum / static_cast<double>(K));
  m.tx_freq = tx / static_cast<double>(K);
  m.attack_freq = atk / static_cast<double>(K);
  m.discounted_cost = disc;
  return m;
}

namespace {

SweepRow sweep_point(double cs, double ca, const GameSpec& base_spec,
                     const PlantModel& model, const ControlWeights& weights,
                     const Eigen::MatrixXd& gain, long long iter,
                     std::uint64_t base_seed, const Eigen::MatrixXd& x0_cov) {
  SweepRow row;
  row.c_s = cs;
  row.c_a = ca;
  row.seed = derive_seed(base_seed, double_bits(cs), double_bits(ca));
  try {
    GameSpec spec = base_spec;
    spec.c_s = cs;
    spec.c_a = ca;
    ShapleyResult eq = shapley_value_iteration(spec);
    row.game_value = eq.V[0];
    row.epsilon = epsilon_gap(eq.policy, spec).epsilon;
    EpisodeTrace trace =
        run_episode(model, gain, eq.policy, spec, iter, row.seed, x0_cov);
    row.m = metrics(trace, weights, spec);
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
    row.m = {std::nan(""), std::nan(""), std::nan(""), std::nan("")};
    row.game_value = std::nan("");
    row.epsilon = std::nan("");
  }
  return row;
}

}  // namespace

std::vector<SweepRow> sweep_serial(
    const std::vector<std::pair<double, double>>& grid,
    const GameSpec& base_spec, const PlantModel& model,
    const ControlWeights& weights, long long iter, std::uint64_t seed,
    const Eigen::MatrixXd& x0_cov) {
  if (grid.empty()) throw std::invalid_argument("sweep grid must be nonempty");
  const Eigen::MatrixXd gain = solve_control(model, weights).L;
  std::vector<SweepRow> rows(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    rows[i] = sweep_point(grid[i].first, grid[i].second, base_spec, model,
                          weights, gain, iter, seed, x0_cov);
  return rows;
}

std::vector<SweepRow> sweep(const std::vector<std::pair<double, double>>& grid,
                            const GameSpec& base_spec, const PlantModel& model,
                            const ControlWeights& weights, long long iter,
                            std::uint64_t seed, const Eigen::MatrixXd& x0_cov,
                            int threads) {
  if (grid.empty()) throw std::invalid_argument("sweep grid must be nonempty");
  const Eigen::MatrixXd gain = solve_control(model, weights).L;
  std::vector<SweepRow> rows(grid.size());
  const long long n = static_cast<long long>(grid.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads > 0 ? threads : 1)
#endif
  for (long long i = 0; i < n; ++i)
    rows[i] = sweep_point(grid[i].first, grid[i].second, base_spec, model,
                          weights, gain, iter, seed, x0_cov);
  return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "c_s,c_a,tx_freq,attack_freq,log_quad_cost,discounted_cost,game_value,"
      "epsilon_gap,seed\n";
  char buf[320];
  for (const SweepRow& r : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%llu\n",
                  r.c_s, r.c_a, r.m.tx_freq, r.m.attack_freq,
                  r.m.log_quad_cost, r.m.discounted_cost, r.game_value,
                  r.epsilon, static_cast<unsigned long long>(r.seed));
    out += buf;
  }
  return out;
}

}  // namespace netgame
