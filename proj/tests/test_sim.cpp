#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>

#include "netgame/control.hpp"
#include "netgame/estimation.hpp"
#include "netgame/model.hpp"
#include "netgame/sim.hpp"
#include "netgame/verify.hpp"

using namespace netgame;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

PlantModel benchmark_plant() {
  PlantModel m;
  m.A = MatrixXd{{1.25, 0.1}, {0.0, 1.0}};
  m.B = MatrixXd{{1.0}, {2.0}};
  m.C = MatrixXd{{1.0, 1.0}};
  m.Q = MatrixXd::Identity(2, 2);
  m.R = MatrixXd::Identity(1, 1);
  return m;
}

ControlWeights benchmark_weights() {
  return {MatrixXd::Identity(2, 2), MatrixXd::Identity(1, 1), 0.999};
}

GameSpec benchmark_spec(double lambda = 0.9, double lambda_a = 0.6) {
  return make_game_spec(benchmark_plant(), benchmark_weights(),
                        ChannelConfig{lambda, lambda_a}, 300.0, 200.0, 10);
}

PolicyPair constant_pair(int N, double pc, double pa) {
  PolicyPair p;
  p.pi_c.assign(N, pc);
  p.pi_a.assign(N, pa);
  return p;
}

}  // namespace

TEST_CASE("episodes are reproducible from the seed alone") {
  GameSpec spec = benchmark_spec();
  ControlSolution cs = solve_control(benchmark_plant(), benchmark_weights());
  PolicyPair p = constant_pair(10, 0.6, 0.3);
  EpisodeTrace a = run_episode(benchmark_plant(), cs.L, p, spec, 300, 99,
                               MatrixXd());
  EpisodeTrace b = run_episode(benchmark_plant(), cs.L, p, spec, 300, 99,
                               MatrixXd());
  EpisodeTrace c = run_episode(benchmark_plant(), cs.L, p, spec, 300, 100,
                               MatrixXd());
  REQUIRE(a.steps.size() == 300);
  bool identical = true, differs = false;
  for (size_t k = 0; k < 300; ++k) {
    identical = identical &&
                (a.steps[k].x - b.steps[k].x).cwiseAbs().maxCoeff() == 0.0 &&
                a.steps[k].tau == b.steps[k].tau &&
                a.steps[k].stage_cost == b.steps[k].stage_cost;
    differs =
        differs || (a.steps[k].x - c.steps[k].x).cwiseAbs().maxCoeff() != 0.0;
  }
  CHECK(identical);
  CHECK(differs);
  CHECK(a.seed == 99);
  CHECK_FALSE(a.generator.empty());
}

TEST_CASE("a perfect channel with constant transmission pins tau at zero") {
  GameSpec spec = benchmark_spec(1.0, 1.0);
  ControlSolution cs = solve_control(benchmark_plant(), benchmark_weights());
  PolicyPair p = constant_pair(10, 1.0, 1.0);
  EpisodeTrace tr = run_episode(benchmark_plant(), cs.L, p, spec, 500, 4,
                                MatrixXd());
  for (const StepRecord& s : tr.steps) {
    CHECK(s.nu);
    CHECK(s.gamma);
    CHECK(s.tau == 0);
  }
}

TEST_CASE("no process noise and a zero start stay at the origin") {
  PlantModel m;
  m.A = MatrixXd{{0.5}};
  m.B = MatrixXd{{1.0}};
  m.C = MatrixXd{{1.0}};
  m.Q = MatrixXd{{0.0}};
  m.R = MatrixXd{{1.0}};
  GameSpec spec;
  spec.channel = ChannelConfig{0.9, 0.6};
  spec.c_s = 300.0;
  spec.c_a = 200.0;
  spec.eta = 0.999;
  spec.N = 4;
  spec.M_inf = MatrixXd{{1.0}};
  spec.Pbar = MatrixXd{{0.0}};
  spec.model = m;
  MatrixXd gain{{-0.3}};
  EpisodeTrace tr = run_episode(m, gain, constant_pair(4, 0.5, 0.5), spec, 200,
                                8, MatrixXd::Zero(1, 1));
  for (const StepRecord& s : tr.steps) {
    CHECK(s.x(0) == 0.0);
    CHECK(s.u(0) == 0.0);
    // only the action prices remain in the realized cost
    double prices = 300.0 * (s.nu ? 1.0 : 0.0) - 200.0 * (s.a ? 1.0 : 0.0);
    CHECK(s.stage_cost == doctest::Approx(prices));
  }
}

TEST_CASE("metrics reduce a hand-built trace to known numbers") {
  GameSpec spec;
  spec.c_s = 10.0;
  spec.c_a = 4.0;
  spec.eta = 0.9;
  spec.N = 2;
  ControlWeights w{MatrixXd{{2.0}}, MatrixXd{{1.0}}, 0.9};

  EpisodeTrace tr;
  auto add = [&tr](double x, double u, bool nu, bool a) {
    StepRecord s;
    s.x = VectorXd{{x}};
    s.u = VectorXd{{u}};
    s.nu = nu;
    s.a = a;
    tr.steps.push_back(s);
  };
  add(2.0, 1.0, true, false);   // quad 9,  stage 19
  add(1.0, 0.0, false, true);   // quad 2,  stage -2
  add(0.0, 2.0, true, true);    // quad 4,  stage 10
  Metrics m = metrics(tr, w, spec);
  CHECK(m.log_quad_cost == doctest::Approx(std::log(5.0)).epsilon(1e-12));
  CHECK(m.tx_freq == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(m.attack_freq == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(m.discounted_cost ==
        doctest::Approx(19.0 - 0.9 * 2.0 + 0.81 * 10.0).epsilon(1e-12));
}

TEST_CASE("trace replay through the remote estimator is consistent") {
  GameSpec spec = benchmark_spec();
  PlantModel model = benchmark_plant();
  ControlSolution cs = solve_control(model, benchmark_weights());
  ShapleyResult eq = shapley_value_iteration(spec);
  EpisodeTrace tr = run_episode(model, cs.L, eq.policy, spec, 500, 31,
                                MatrixXd());
  RemoteEstimatorState st{VectorXd::Zero(2), 0, VectorXd::Zero(1)};
  VectorXd u_prev = cs.L * st.xhat;
  for (const StepRecord& s : tr.steps) {
    bool delivered = s.nu && s.gamma;
    const VectorXd* packet = delivered ? &s.xhat_s : nullptr;
    st = remote_update(st, s.nu, s.gamma, packet, u_prev, model);
    CHECK(st.tau == s.tau);
    CHECK((st.xhat - s.xhat).cwiseAbs().maxCoeff() == 0.0);
    u_prev = s.u;
  }
}

TEST_CASE("empirical discounted cost agrees with the chain computation") {
  GameSpec spec = benchmark_spec();
  PlantModel model = benchmark_plant();
  ControlSolution cs = solve_control(model, benchmark_weights());
  ShapleyResult eq = shapley_value_iteration(spec);
  double expect = discounted_value(eq.policy, spec);

  const int episodes = 40;
  const long long horizon = 20000;  // eta^horizon ~ 2e-9, tail negligible
  std::vector<double> sums(episodes);
  Rng seeder(321);
  for (int e = 0; e < episodes; ++e) {
    EpisodeTrace tr = run_episode(model, cs.L, eq.policy, spec, horizon,
                                  seeder.raw(), MatrixXd());
    double acc = 0.0, pow = 1.0;
    for (const StepRecord& s : tr.steps) {
      acc += pow * s.stage_cost;
      pow *= spec.eta;
    }
    sums[e] = acc;
  }
  double mean = 0.0;
  for (double v : sums) mean += v;
  mean /= episodes;
  double var = 0.0;
  for (double v : sums) var += (v - mean) * (v - mean);
  var /= (episodes - 1);
  double se = std::sqrt(var / episodes);
  CHECK(std::abs(mean - expect) <= 3.0 * se);
}

TEST_CASE("sweep re-solves each point and tags rows with derived seeds") {
  GameSpec spec = benchmark_spec();
  std::vector<std::pair<double, double>> grid{
      {0.0, 0.0}, {0.0, 500.0}, {500.0, 0.0}, {500.0, 500.0}};
  auto rows = sweep_serial(grid, spec, benchmark_plant(), benchmark_weights(),
                           2000, 5, MatrixXd());
  REQUIRE(rows.size() == 4);
  for (const SweepRow& r : rows) {
    CHECK(r.ok);
    CHECK(r.error.empty());
    CHECK(std::isfinite(r.m.tx_freq));
    CHECK(r.m.tx_freq >= 0.0);
    CHECK(r.m.tx_freq <= 1.0);
    CHECK(std::isfinite(r.game_value));
    CHECK(r.epsilon < 1e-6);  // the solved pair is the exact equilibrium
  }
  // distinct points, distinct streams
  CHECK(rows[0].seed != rows[1].seed);
  CHECK(rows[1].seed != rows[2].seed);
  // same costs, same stream, wherever the point sits in the grid
  auto again = sweep_serial({{500.0, 500.0}}, spec, benchmark_plant(),
                            benchmark_weights(), 2000, 5, MatrixXd());
  CHECK(again[0].seed == rows[3].seed);
  CHECK(again[0].m.tx_freq == rows[3].m.tx_freq);
}

TEST_CASE("parallel and serial sweeps emit identical tables") {
  GameSpec spec = benchmark_spec();
  std::vector<std::pair<double, double>> grid;
  for (double cs : {0.0, 300.0, 600.0})
    for (double ca : {0.0, 400.0}) grid.push_back({cs, ca});
  auto serial = sweep_serial(grid, spec, benchmark_plant(),
                             benchmark_weights(), 1500, 9, MatrixXd());
  auto parallel = sweep(grid, spec, benchmark_plant(), benchmark_weights(),
                        1500, 9, MatrixXd(), 4);
  CHECK(sweep_to_csv(serial) == sweep_to_csv(parallel));
}

TEST_CASE("the sweep table starts with the documented header") {
  std::vector<SweepRow> rows;
  std::string csv = sweep_to_csv(rows);
  CHECK(csv.rfind("c_s,c_a,tx_freq,attack_freq,log_quad_cost,"
                  "discounted_cost,game_value,epsilon_gap,seed\n",
                  0) == 0);
}
