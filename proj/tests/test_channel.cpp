#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>

#include "netgame/channel.hpp"
#include "netgame/control.hpp"
#include "netgame/model.hpp"
#include "netgame/rng.hpp"

using namespace netgame;
using Eigen::MatrixXd;

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

GameSpec benchmark_spec(int N = 10) {
  ControlWeights w{MatrixXd::Identity(2, 2), MatrixXd::Identity(1, 1), 0.999};
  return make_game_spec(benchmark_plant(), w, ChannelConfig{0.9, 0.6}, 300.0,
                        200.0, N);
}

}  // namespace

TEST_CASE("channel validation orders the two delivery rates") {
  CHECK_NOTHROW(validate_channel(ChannelConfig{0.9, 0.6}));
  CHECK_NOTHROW(validate_channel(ChannelConfig{1.0, 1.0}));
  CHECK_NOTHROW(validate_channel(ChannelConfig{0.0, 0.0}));
  CHECK_THROWS_AS(validate_channel(ChannelConfig{0.6, 0.9}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_channel(ChannelConfig{1.1, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_channel(ChannelConfig{0.9, -0.1}),
                  std::invalid_argument);
}

TEST_CASE("no transmission means no delivery and no randomness consumed") {
  ChannelConfig cfg{0.9, 0.6};
  Rng a(42), b(42);
  CHECK_FALSE(sample_delivery(false, false, cfg, a));
  CHECK_FALSE(sample_delivery(false, true, cfg, a));
  CHECK(a.raw() == b.raw());  // stream position unchanged by idle slots
}

TEST_CASE("a perfect channel always delivers") {
  ChannelConfig cfg{1.0, 1.0};
  Rng r(7);
  for (int i = 0; i < 100; ++i) {
    CHECK(sample_delivery(true, false, cfg, r));
    CHECK(sample_delivery(true, true, cfg, r));
  }
}

TEST_CASE("attacked delivery rate concentrates near lambda_a") {
  ChannelConfig cfg{0.9, 0.6};
  Rng r(2024);
  const int n = 1000000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += sample_delivery(true, true, cfg, r);
  double mean = static_cast<double>(hits) / n;
  CHECK(mean == doctest::Approx(0.6).epsilon(0.0034));  // ~7 sigma
}

TEST_CASE("holding-time transitions are deterministic without transmission") {
  GameSpec spec = benchmark_spec();
  Eigen::VectorXd d = transition_dist(2, false, true, spec);
  CHECK(d.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d(3) == 1.0);

  // saturation at the truncation boundary
  Eigen::VectorXd top = transition_dist(spec.N - 1, false, false, spec);
  CHECK(top(spec.N - 1) == 1.0);
}

TEST_CASE("a transmission under attack splits mass by the attacked rate") {
  GameSpec spec = benchmark_spec();
  Eigen::VectorXd d = transition_dist(5, true, true, spec);
  CHECK(d(0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(d(6) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(d.sum() == doctest::Approx(1.0).epsilon(1e-12));

  Eigen::VectorXd clear = transition_dist(5, true, false, spec);
  CHECK(clear(0) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(clear(6) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("transition rows reject out-of-range holding times") {
  GameSpec spec = benchmark_spec();
  CHECK_THROWS_AS(transition_dist(-1, false, false, spec), std::out_of_range);
  CHECK_THROWS_AS(transition_dist(spec.N, false, false, spec),
                  std::out_of_range);
}

TEST_CASE("sampled transitions follow the stated distribution") {
  GameSpec spec = benchmark_spec();
  Rng r(99);
  const int n = 200000;
  int resets = 0;
  for (int i = 0; i < n; ++i) resets += sample_delivery(true, true, spec.channel, r);
  // binomial: p = 0.6, sd = sqrt(p(1-p)/n)
  double p = static_cast<double>(resets) / n;
  CHECK(std::abs(p - 0.6) < 3.0 * std::sqrt(0.6 * 0.4 / n));
}

TEST_CASE("game spec composition wires the estimator into the cost") {
  GameSpec spec = benchmark_spec();
  CHECK(spec.N == 10);
  CHECK(spec.eta == doctest::Approx(0.999));
  CHECK(spec.Pbar.rows() == 2);
  CHECK(spec.M_inf.rows() == 2);

  FilterSolution fs = steady_state_filter_riccati(benchmark_plant());
  CHECK((spec.Pbar - fs.Pbar).cwiseAbs().maxCoeff() < 1e-12);

  ControlWeights w{MatrixXd::Identity(2, 2), MatrixXd::Identity(1, 1), 0.999};
  ControlSolution cs = solve_control(benchmark_plant(), w);
  CHECK((spec.M_inf - cs.M_inf).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("game spec validation rejects degenerate horizons and discounts") {
  GameSpec spec = benchmark_spec();
  spec.N = 1;
  CHECK_THROWS_AS(validate_game_spec(spec), std::invalid_argument);
  spec.N = 10;
  spec.eta = 1.0;  // the game value needs a strict discount
  CHECK_THROWS_AS(validate_game_spec(spec), std::invalid_argument);
  spec.eta = 0.999;
  spec.c_s = -1.0;
  CHECK_THROWS_AS(validate_game_spec(spec), std::invalid_argument);
}

TEST_CASE("holding cost table grows the posterior through the open loop") {
  GameSpec spec = benchmark_spec();
  auto table = holding_cost_table(spec);
  REQUIRE(table.size() == 10);
  for (int t = 0; t < 10; ++t) {
    double direct = (spec.M_inf * f_apply(spec.Pbar, t, spec.model)).trace();
    CHECK(table[t] == doctest::Approx(direct).epsilon(1e-10));
  }
  // frozen endpoints of the table at the benchmark operating point
  CHECK(table[0] == doctest::Approx(194.08619540433034).epsilon(1e-8));
  CHECK(table[9] == doctest::Approx(7050.393201563072).epsilon(1e-8));
  for (size_t t = 1; t < table.size(); ++t) CHECK(table[t] > table[t - 1]);
}
