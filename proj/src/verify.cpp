#include "netgame/verify.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace netgame {

namespace {

// The value scale is order max-stage-cost / (1 - eta); at eta = 0.999 a
// plain double solve leaves the two value routes ~5e-8 apart. The chain is
// tiny (N <= a few dozen states), so the balance and evaluation systems are
// solved in extended precision outright.
using MatLD = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VecLD = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

void check_policies(const PolicyPair& policies, const GameSpec& spec) {
  if (policies.N() != spec.N ||
      static_cast<int>(policies.pi_a.size()) != spec.N)
    throw std::invalid_argument("policy length must equal N");
  for (int t = 0; t < spec.N; ++t)
    if (policies.pi_c[t] < 0.0 || policies.pi_c[t] > 1.0 ||
        policies.pi_a[t] < 0.0 || policies.pi_a[t] > 1.0)
      throw std::invalid_argument("policy entries must be probabilities");
}

// joint action distribution at a state
std::array<double, 4> mix_weights(const PolicyPair& policies, int tau) {
  double pc = policies.pi_c[tau], pa = policies.pi_a[tau];
  return {(1.0 - pc) * (1.0 - pa), (1.0 - pc) * pa, pc * (1.0 - pa), pc * pa};
}

MatLD policy_kernel(const PolicyPair& policies, const GameSpec& spec) {
  const int N = spec.N;
  MatLD P = MatLD::Zero(N, N);
  for (int tau = 0; tau < N; ++tau) {
    auto wts = mix_weights(policies, tau);
    for (int nu = 0; nu < 2; ++nu)
      for (int a = 0; a < 2; ++a) {
        long double w = wts[2 * nu + a];
        if (w == 0.0L) continue;
        Eigen::VectorXd dist = transition_dist(tau, nu, a, spec);
        for (int nxt = 0; nxt < N; ++nxt)
          P(tau, nxt) += w * static_cast<long double>(dist(nxt));
      }
  }
  return P;
}

// expected stage cost per state under the policy mix, post-transition
VecLD policy_cost(const PolicyPair& policies, const GameSpec& spec) {
  const int N = spec.N;
  const std::vector<double> tr = holding_cost_table(spec);
  VecLD c = VecLD::Zero(N);
  for (int tau = 0; tau < N; ++tau) {
    auto wts = mix_weights(policies, tau);
    for (int nu = 0; nu < 2; ++nu)
      for (int a = 0; a < 2; ++a) {
        long double w = wts[2 * nu + a];
        if (w == 0.0L) continue;
        Eigen::VectorXd dist = transition_dist(tau, nu, a, spec);
        long double e = spec.c_s * nu - spec.c_a * a;
        for (int nxt = 0; nxt < N; ++nxt)
          e += static_cast<long double>(dist(nxt)) * tr[nxt];
        c(tau) += w * e;
      }
  }
  return c;
}

VecLD state_occupation(const PolicyPair& policies, const GameSpec& spec) {
  const int N = spec.N;
  MatLD P = policy_kernel(policies, spec);
  MatLD M = MatLD::Identity(N, N) - static_cast<long double>(spec.eta) * P;
  VecLD b = VecLD::Zero(N);
  b(0) = 1.0L - static_cast<long double>(spec.eta);
  VecLD mu = M.transpose().partialPivLu().solve(b);
  for (int t = 0; t < N; ++t)
    if (mu(t) < 0.0L && mu(t) > -1e-12L) mu(t) = 0.0L;
  return mu;
}

}  // namespace

double OccupationMeasure::total() const {
  double s = 0.0;
  for (double w : omega) s += w;
  return s;
}

OccupationMeasure occupation_measure(const PolicyPair& policies,
                                     const GameSpec& spec) {
  check_policies(policies, spec);
  VecLD mu = state_occupation(policies, spec);
  OccupationMeasure om;
  om.N = spec.N;
  om.omega.assign(4 * spec.N, 0.0);
  for (int tau = 0; tau < spec.N; ++tau) {
    auto wts = mix_weights(policies, tau);
    for (int k = 0; k < 4; ++k)
      om.omega[4 * tau + k] = static_cast<double>(mu(tau) * wts[k]);
  }
  return om;
}

double balance_residual(const OccupationMeasure& om, const GameSpec& spec) {
  const int N = spec.N;
  if (om.N != N) throw std::invalid_argument("measure size must equal N");
  VecLD lhs = VecLD::Zero(N);
  for (int tau = 0; tau < N; ++tau)
    for (int nu = 0; nu < 2; ++nu)
      for (int a = 0; a < 2; ++a) {
        long double w = om.at(tau, nu, a);
        if (w == 0.0L) continue;
        lhs(tau) += w;
        Eigen::VectorXd dist = transition_dist(tau, nu, a, spec);
        for (int nxt = 0; nxt < N; ++nxt)
          lhs(nxt) -= static_cast<long double>(spec.eta) * w *
                      static_cast<long double>(dist(nxt));
      }
  lhs(0) -= 1.0L - static_cast<long double>(spec.eta);
  long double r = 0.0L;
  for (int t = 0; t < N; ++t) r = std::max(r, fabsl(lhs(t)));
  return static_cast<double>(r);
}

double discounted_value(const PolicyPair& policies, const GameSpec& spec) {
  check_policies(policies, spec);
  VecLD mu = state_occupation(policies, spec);
  VecLD c = policy_cost(policies, spec);
  long double J = 0.0L;
  for (int t = 0; t < spec.N; ++t) J += mu(t) * c(t);
  J /= 1.0L - static_cast<long double>(spec.eta);
  return static_cast<double>(J);
}

double value_by_policy_evaluation(const PolicyPair& policies,
                                  const GameSpec& spec) {
  check_policies(policies, spec);
  const int N = spec.N;
  MatLD P = policy_kernel(policies, spec);
  VecLD c = policy_cost(policies, spec);
  MatLD M = MatLD::Identity(N, N) - static_cast<long double>(spec.eta) * P;
  VecLD v = M.partialPivLu().solve(c);
  return static_cast<double>(v(0));
}

BestResponse best_response(Player fixed_side,
                           const std::vector<double>& opponent_policy,
                           const GameSpec& spec) {
  const int N = spec.N;
  if (static_cast<int>(opponent_policy.size()) != N)
    throw std::invalid_argument("policy length must equal N");
  const bool controller_free = fixed_side == Player::attacker;
  const double eta = spec.eta;
  const std::vector<double> tr = holding_cost_table(spec);

  // expected stage cost and kernel for each (state, free action), with the
  // opponent's mix folded in
  std::vector<std::array<double, 2>> cost(N);
  std::vector<std::array<Eigen::VectorXd, 2>> kern(N);
  for (int tau = 0; tau < N; ++tau) {
    double po = opponent_policy[tau];
    for (int b = 0; b < 2; ++b) {
      Eigen::VectorXd dist = Eigen::VectorXd::Zero(N);
      double cb = 0.0;
      for (int o = 0; o < 2; ++o) {
        double w = o ? po : 1.0 - po;
        if (w == 0.0) continue;
        int nu = controller_free ? b : o;
        int a = controller_free ? o : b;
        Eigen::VectorXd d = transition_dist(tau, nu, a, spec);
        dist += w * d;
        double e = spec.c_s * nu - spec.c_a * a;
        for (int nxt = 0; nxt < N; ++nxt) e += d(nxt) * tr[nxt];
        cb += w * e;
      }
      cost[tau][b] = cb;
      kern[tau][b] = dist;
    }
  }

  std::vector<double> V(N, 0.0), Vn(N, 0.0);
  const int max_iter = 200000;
  const double tol = 1e-10;
  for (int it = 1; it <= max_iter; ++it) {
    for (int tau = 0; tau < N; ++tau) {
      double q0 = cost[tau][0], q1 = cost[tau][1];
      for (int nxt = 0; nxt < N; ++nxt) {
        q0 += eta * kern[tau][0](nxt) * V[nxt];
        q1 += eta * kern[tau][1](nxt) * V[nxt];
      }
      Vn[tau] = controller_free ? std::min(q0, q1) : std::max(q0, q1);
    }
    double gap = 0.0, vmax = 0.0;
    for (int tau = 0; tau < N; ++tau) {
      gap = std::max(gap, std::fabs(Vn[tau] - V[tau]));
      vmax = std::max(vmax, std::fabs(Vn[tau]));
    }
    V.swap(Vn);
    if (gap <= std::max(tol, 8.0 * std::numeric_limits<double>::epsilon() *
                                 std::max(1.0, vmax)))
      break;
    if (it == max_iter)
      throw std::runtime_error("best-response value iteration did not converge");
  }

  BestResponse br;
  br.policy.assign(N, 0.0);
  for (int tau = 0; tau < N; ++tau) {
    double q0 = cost[tau][0], q1 = cost[tau][1];
    for (int nxt = 0; nxt < N; ++nxt) {
      q0 += eta * kern[tau][0](nxt) * V[nxt];
      q1 += eta * kern[tau][1](nxt) * V[nxt];
    }
    bool pick1 = controller_free ? q1 < q0 : q1 > q0;
    br.policy[tau] = pick1 ? 1.0 : 0.0;
  }

  // report the exact value of the greedy policy, not the VI approximation
  PolicyPair pair;
  if (controller_free) {
    pair.pi_c = br.policy;
    pair.pi_a = opponent_policy;
  } else {
    pair.pi_c = opponent_policy;
    pair.pi_a = br.policy;
  }
  br.value = value_by_policy_evaluation(pair, spec);
  return br;
}

EquilibriumReport epsilon_gap(const PolicyPair& policies,
                              const GameSpec& spec) {
  EquilibriumReport rep;
  rep.value = value_by_policy_evaluation(policies, spec);
  BestResponse br_c = best_response(Player::attacker, policies.pi_a, spec);
  BestResponse br_a = best_response(Player::controller, policies.pi_c, spec);
  rep.controller_gap = rep.value - br_c.value;
  rep.attacker_gap = br_a.value - rep.value;
  rep.epsilon = std::max({0.0, rep.controller_gap, rep.attacker_gap});
  return rep;
}

PolicyPair extend_policies(const PolicyPair& policies, int n_ref) {
  if (n_ref < policies.N())
    throw std::invalid_argument("reference truncation must not shrink N");
  PolicyPair out = policies;
  out.pi_c.resize(n_ref, 1.0);
  out.pi_a.resize(n_ref, 1.0);
  return out;
}

namespace {

struct EpisodeSums {
  // per matrix entry: sum of products and of squared products
  std::vector<double> a1, a2, b1, b2, c1, c2;
  std::vector<long long> bin_count;
};

}  // namespace

Lemma1Report lemma1_monte_carlo(const PlantModel& model,
                                const Eigen::MatrixXd& gain,
                                const PolicyPair& policies,
                                const GameSpec& spec, long long samples,
                                Rng& rng) {
  if (samples < 1000) throw std::invalid_argument("need at least 1e3 samples");
  const int nx = model.nx();
  const int ny = model.nout();
  const int N = spec.N;
  const int nbins = N + 1;  // last bin collects tau >= N, never tested
  const int burn_in = 200;
  const int stride = 8;
  const int per_episode = 200;
  const int steps = burn_in + stride * per_episode;
  const long long episodes = (samples + per_episode - 1) / per_episode;

  const FilterSolution fs = steady_state_filter_riccati(model);
  const Eigen::MatrixXd cholQ = model.Q.llt().matrixL();
  const Eigen::MatrixXd cholR = model.R.llt().matrixL();
  const std::uint64_t base = rng.raw();

  std::vector<EpisodeSums> partial(episodes);

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long ep = 0; ep < episodes; ++ep) {
    EpisodeSums& s = partial[ep];
    s.a1.assign(nx * nx, 0.0);
    s.a2.assign(nx * nx, 0.0);
    s.b1.assign(nx * nx, 0.0);
    s.b2.assign(nx * nx, 0.0);
    s.c1.assign(nbins * nx * nx, 0.0);
    s.c2.assign(nbins * nx * nx, 0.0);
    s.bin_count.assign(nbins, 0);

    Rng erng(derive_seed(base, static_cast<std::uint64_t>(ep)));
    Eigen::VectorXd z(nx), zv(ny);
    for (int i = 0; i < nx; ++i) z(i) = erng.gaussian();
    Eigen::VectorXd x = z;
    Eigen::VectorXd xhat_s = Eigen::VectorXd::Zero(nx);
    Eigen::VectorXd xhat = Eigen::VectorXd::Zero(nx);
    Eigen::VectorXd u = gain * xhat;
    long tau = 0;

    for (int k = 1; k <= steps; ++k) {
      for (int i = 0; i < nx; ++i) z(i) = erng.gaussian();
      for (int i = 0; i < ny; ++i) zv(i) = erng.gaussian();
      x = model.A * x + model.B * u + cholQ * z;
      Eigen::VectorXd y = model.C * x + cholR * zv;
      Eigen::VectorXd pred = model.A * xhat_s + model.B * u;
      xhat_s = pred + fs.Kbar * (y - model.C * pred);
      Eigen::VectorXd xbar = model.A * xhat + model.B * u;
      long tau_prev = tau;
      int look = static_cast<int>(std::min<long>(tau_prev, N - 1));
      bool nu = erng.bernoulli(policies.pi_c[look]);
      bool a = erng.bernoulli(policies.pi_a[look]);
      bool gamma = sample_delivery(nu, a, spec.channel, erng);
      if (nu && gamma) {
        xhat = xhat_s;
        tau = 0;
      } else {
        xhat = xbar;
        tau = tau_prev + 1;
      }
      u = gain * xhat;

      if (k > burn_in && (k - burn_in) % stride == 0) {
        Eigen::VectorXd d1 = x - xbar;
        Eigen::VectorXd d2 = xhat_s - xbar;
        int bin = static_cast<int>(std::min<long>(tau_prev, N));
        ++s.bin_count[bin];
        for (int i = 0; i < nx; ++i)
          for (int j = 0; j < nx; ++j) {
            int e = i * nx + j;
            double pa = d1(i) * xbar(j);
            double pb = d2(i) * xbar(j);
            double pc = d2(i) * d2(j);
            s.a1[e] += pa;
            s.a2[e] += pa * pa;
            s.b1[e] += pb;
            s.b2[e] += pb * pb;
            s.c1[bin * nx * nx + e] += pc;
            s.c2[bin * nx * nx + e] += pc * pc;
          }
      }
    }
  }

  // reduce in episode order: the report is independent of thread count
  EpisodeSums tot;
  tot.a1.assign(nx * nx, 0.0);
  tot.a2.assign(nx * nx, 0.0);
  tot.b1.assign(nx * nx, 0.0);
  tot.b2.assign(nx * nx, 0.0);
  tot.c1.assign(nbins * nx * nx, 0.0);
  tot.c2.assign(nbins * nx * nx, 0.0);
  tot.bin_count.assign(nbins, 0);
  for (const EpisodeSums& s : partial) {
    for (int e = 0; e < nx * nx; ++e) {
      tot.a1[e] += s.a1[e];
      tot.a2[e] += s.a2[e];
      tot.b1[e] += s.b1[e];
      tot.b2[e] += s.b2[e];
    }
    for (int e = 0; e < nbins * nx * nx; ++e) {
      tot.c1[e] += s.c1[e];
      tot.c2[e] += s.c2[e];
    }
    for (int b = 0; b < nbins; ++b) tot.bin_count[b] += s.bin_count[b];
  }

  auto entry_z = [](double s1, double s2, long long n, double expected) {
    double m = s1 / n;
    double var = std::max(s2 / n - m * m, 0.0);
    double se = std::sqrt(var / n);
    double err = std::fabs(m - expected);
    if (se == 0.0) return err == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return err / se;
  };

  Lemma1Report rep;
  rep.samples = episodes * per_episode;
  rep.z_state_cross = 0.0;
  rep.z_filter_cross = 0.0;
  for (int e = 0; e < nx * nx; ++e) {
    rep.z_state_cross =
        std::max(rep.z_state_cross, entry_z(tot.a1[e], tot.a2[e], rep.samples, 0.0));
    rep.z_filter_cross =
        std::max(rep.z_filter_cross, entry_z(tot.b1[e], tot.b2[e], rep.samples, 0.0));
  }
  rep.bins.clear();
  for (int t = 0; t < N; ++t) {
    Lemma1Bin bin;
    bin.tau = t;
    bin.count = tot.bin_count[t];
    bin.tested = bin.count >= 1000;
    if (bin.tested) {
      Eigen::MatrixXd expected = f_apply(spec.Pbar, t + 1, model) - spec.Pbar;
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nx; ++j) {
          int e = t * nx * nx + i * nx + j;
          bin.max_z = std::max(
              bin.max_z, entry_z(tot.c1[e], tot.c2[e], bin.count, expected(i, j)));
        }
    }
    rep.bins.push_back(bin);
  }
  rep.pass = rep.z_state_cross <= 4.0 && rep.z_filter_cross <= 4.0;
  for (const Lemma1Bin& b : rep.bins)
    if (b.tested && b.max_z > 4.0) rep.pass = false;
  return rep;
}

}  // namespace netgame
