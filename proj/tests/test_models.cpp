#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include "bpf/models/euler_maruyama.hpp"
#include "bpf/models/ou.hpp"
#include "bpf/models/pd.hpp"
#include "bpf/models/runge_kutta.hpp"
#include "bpf/models/sir.hpp"
#include "helpers.hpp"

using namespace bpf;

namespace {

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

double integrate(const std::function<double(double)>& f, double lo, double hi) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-13);
}

const RhsFn decay = [](double, std::span<const double> x, std::span<double> d) { d[0] = -x[0]; };

}  // namespace

TEST_SUITE("models") {

TEST_CASE("ou moments") {
  const OuParams p{};
  auto m = ou_moments(0.4, 0.0, p);
  CHECK(m.mean == 0.4);
  CHECK(m.var == 0.0);
  for (double dt : {0.01, 1.0, 17.0}) CHECK(ou_moments(p.stationary_mean(), dt, p).mean == doctest::Approx(p.stationary_mean()).epsilon(1e-14));
  m = ou_moments(0.0, 1e4, p);
  CHECK(m.mean == doctest::Approx(0.0716).epsilon(1e-3));
  CHECK(m.var == doctest::Approx(9.612e-4).epsilon(1e-4));
  CHECK(p.stationary_mean() == doctest::Approx(0.0187 / 0.2610));
}

TEST_CASE("ou stepping is Markov-consistent") {
  Rng rng(1);
  for (int rep = 0; rep < 200; ++rep) {
    const OuParams p{rng.normal(), 0.05 + 3 * rng.uniform(), 0.01 + rng.uniform()};
    const double x = 2 * rng.normal(), dt = 0.01 + 5 * rng.uniform();
    const auto half = ou_moments(x, dt / 2, p);
    const double decay = std::exp(-p.theta2 * dt / 2);
    const double m = p.stationary_mean();
    const double mean2 = m + (half.mean - m) * decay;
    const double var2 = half.var * decay * decay + ou_moments(0.0, dt / 2, p).var;
    const auto full = ou_moments(x, dt, p);
    CHECK(std::abs(mean2 - full.mean) < 1e-12);
    CHECK(std::abs(var2 - full.var) < 1e-12);
  }
}

TEST_CASE("ou transition density against the moment ODEs") {
  // dm/dt = theta1 - theta2 m, dv/dt = theta3^2 - 2 theta2 v from (0, 0).
  const OuParams p{};
  using State = std::array<double, 2>;
  State s{0.0, 0.0};
  boost::numeric::odeint::integrate_adaptive(
      boost::numeric::odeint::make_controlled<boost::numeric::odeint::runge_kutta_dopri5<State>>(1e-14, 1e-14),
      [&p](const State& y, State& dy, double) {
        dy[0] = p.theta1 - p.theta2 * y[0];
        dy[1] = p.theta3 * p.theta3 - 2 * p.theta2 * y[1];
      },
      s, 0.0, 1.0, 1e-3);
  const double oracle = -0.5 * std::log(2 * std::numbers::pi * s[1]) - (0.15 - s[0]) * (0.15 - s[0]) / (2 * s[1]);
  CHECK(ou_logpdf(0.15, 0.0, 1.0, p) == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(std::exp(oracle) == doctest::Approx(2.5e-9).epsilon(0.05));
}

TEST_CASE("ou logpdf") {
  const OuParams p{};
  const double mu = ou_moments(0.3, 0.7, p).mean;
  CHECK(ou_logpdf(mu, 0.3, 0.7, p) > ou_logpdf(mu + 1e-3, 0.3, 0.7, p));
  CHECK(ou_logpdf(mu, 0.3, 0.7, p) > ou_logpdf(mu - 1e-3, 0.3, 0.7, p));
  CHECK(std::isfinite(ou_logpdf(40.0, 0.3, 0.7, p)));
  CHECK(ou_logpdf(0.2, 0.3, 0.0, p) == -INFINITY);
  CHECK(integrate([&](double x) { return std::exp(ou_logpdf(x, 0.3, 0.7, p)); }, -1, 1.6) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(OuModel({0.0, -1.0, 0.1}), std::invalid_argument);
  CHECK_NOTHROW(OuModel({0.0, 1.0, 0.0}));
}

TEST_CASE("ou sampling matches its moments") {
  const OuParams p{};
  Rng rng(7);
  const std::size_t n = 100000;
  std::vector<double> xs(n);
  for (auto& x : xs) x = ou_sample_step(0.5, 2.0, p, rng);
  const auto mo = ou_moments(0.5, 2.0, p);
  const auto st = sample_stats(xs);
  CHECK(std::abs(st.mean - mo.mean) < 4 * st.se);
  double ss = 0.0;
  for (double x : xs) ss += (x - st.mean) * (x - st.mean);
  CHECK(std::abs(ss / (n - 1) - mo.var) < 4 * mo.var * std::sqrt(2.0 / (n - 1)));
}

TEST_CASE("euler-maruyama step") {
  Rng rng(3);
  const DriftFn zero = [](const Eigen::VectorXd& x, double) { return Eigen::VectorXd::Zero(x.size()); };
  const DiffusionFn none = [](const Eigen::VectorXd& x, double) { return Eigen::MatrixXd::Zero(x.size(), 2); };
  Eigen::VectorXd x(3);
  x << 1, -2, 0.5;
  CHECK(euler_maruyama_step(zero, none, x, 0.0, 0.3, rng) == x);
  CHECK(euler_maruyama_step(0.0, 0.0, 1.25, 0.1, rng) == 1.25);

  // PD at its drift zero keeps the mean.
  const PdModel pd({});
  std::vector<double> xs(20000);
  for (auto& v : xs) {
    double s = std::numbers::pi;
    pd.propagate({&s, 1}, 0.0, 0.075, rng);
    v = s;
  }
  const auto st = sample_stats(xs);
  CHECK(std::abs(st.mean - std::numbers::pi) < 4 * st.se);
}

TEST_CASE("euler-maruyama law approaches the exact ou step") {
  const OuParams p{0.0, 2.0, 1.0};
  const double horizon = 1.0, x0 = 3.0;
  const std::size_t n = 20000;
  Rng rng(21);
  std::vector<double> exact(n);
  for (auto& v : exact) v = ou_sample_step(x0, horizon, p, rng);
  std::vector<double> ks;
  for (int steps : {1, 8, 128}) {
    const double dt = horizon / steps;
    std::vector<double> em(n);
    for (auto& v : em) {
      double x = x0;
      for (int k = 0; k < steps; ++k) x = euler_maruyama_step(-p.theta2 * x, p.theta3, x, dt, rng);
      v = x;
    }
    ks.push_back(ks_statistic(em, exact));
  }
  CHECK(ks[0] > ks[1]);
  CHECK(ks[1] > ks[2]);
  CHECK(ks[2] < 1.95 * std::sqrt(2.0 / n));
}

TEST_CASE("euler-maruyama logpdf") {
  CHECK(euler_maruyama_logpdf(0.7, 0.7, 1.0, 0.0, 1.0) == doctest::Approx(-0.5 * std::log(2 * std::numbers::pi)));
  CHECK(euler_maruyama_logpdf(0.7, 0.7, 1.0, 0.0, 1.0) == doctest::Approx(-0.9189385));
  const double peak = euler_maruyama_logpdf(1.3, 1.0, 0.5, 0.6, 2.0);
  CHECK(peak > euler_maruyama_logpdf(1.31, 1.0, 0.5, 0.6, 2.0));
  CHECK(peak > euler_maruyama_logpdf(1.29, 1.0, 0.5, 0.6, 2.0));
  CHECK(euler_maruyama_logpdf(0.0, 0.0, 0.5, 0.0, 1.0) - euler_maruyama_logpdf(0.0, 0.0, 1.0, 0.0, 1.0) ==
        doctest::Approx(0.5 * std::log(2.0)));
  CHECK_THROWS_AS(euler_maruyama_logpdf(0.0, 0.0, 1.0, 0.0, 0.0), std::domain_error);

  for (double from : {-2.0, 0.3, 5.0}) {
    const double drift = std::sin(from - std::numbers::pi), dt = 0.075;
    const double mass = integrate([&](double x) { return std::exp(euler_maruyama_logpdf(x, from, dt, drift, 1.0)); },
                                  from - 4, from + 4);
    CHECK(std::abs(mass - 1.0) < 1e-6);
  }

  // Vector form agrees with the scalar form and rejects singular covariance.
  const DriftFn a = [](const Eigen::VectorXd& x, double) { return Eigen::VectorXd(-x); };
  const DiffusionFn b = [](const Eigen::VectorXd& x, double) { return Eigen::MatrixXd::Identity(x.size(), x.size()) * 0.5; };
  Eigen::VectorXd from(2), to(2);
  from << 1, 2;
  to << 0.8, 2.2;
  const double joint = euler_maruyama_logpdf(to, from, 0.0, 0.2, a, b);
  CHECK(joint == doctest::Approx(euler_maruyama_logpdf(0.8, 1.0, 0.2, -1.0, 0.5) +
                                 euler_maruyama_logpdf(2.2, 2.0, 0.2, -2.0, 0.5)));
  const DiffusionFn rank1 = [](const Eigen::VectorXd&, double) { return Eigen::MatrixXd::Ones(2, 1); };
  CHECK_THROWS_AS(euler_maruyama_logpdf(to, from, 0.0, 0.2, a, rank1), std::domain_error);
}

TEST_CASE("pd model density is the euler-maruyama density") {
  const PdModel pd({1.0});
  const double x = 0.4, y = 0.5;
  CHECK(*pd.transition_logpdf(std::vector<double>{y}, std::vector<double>{x}, 0.0, 0.075) ==
        doctest::Approx(normal_logpdf(y, x + std::sin(x - 1.0) * 0.075, 0.075)));
}

TEST_CASE("sir right-hand side") {
  const SirParams p{};
  std::vector<double> d(5);
  sir_rhs(std::vector<double>{700, 0, 63, -6, -1}, 0.0, 0.0, 0.1, p, d);
  CHECK(d[kS] == 0.0);
  CHECK(d[kI] == 0.0);
  CHECK(d[kR] == 0.0);

  Rng rng(5);
  for (int rep = 0; rep < 500; ++rep) {
    std::vector<double> s{763 * rng.uniform(), 763 * rng.uniform(), 763 * rng.uniform(), -6 + rng.normal(),
                          -1 + rng.normal()};
    const double dw1 = rng.normal(), dw2 = rng.normal(), dt = 0.01 + rng.uniform();
    sir_rhs(s, dw1, dw2, dt, p, d);
    CHECK(std::abs(d[kS] + d[kI] + d[kR]) <= 1e-12 * (1 + std::abs(d[kS]) + std::abs(d[kR])));
    CHECK(d[kLogBeta] == doctest::Approx(p.beta.t1 - p.beta.t2 * s[kLogBeta] + p.beta.t3 * dw1 / dt));
    CHECK(d[kLogNu] == doctest::Approx(p.nu.t1 - p.nu.t2 * s[kLogNu] + p.nu.t3 * dw2 / dt));
  }
}

TEST_CASE("rk tableau order conditions") {
  const auto& t = Rk43Tableau::get();
  constexpr std::size_t S = Rk43Tableau::stages;
  auto sum = [&](const std::array<double, S>& w, auto f) {
    double s = 0.0;
    for (std::size_t i = 0; i < S; ++i) s += w[i] * f(i);
    return s;
  };
  auto ac = [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t j = 0; j < S; ++j) s += t.a[i][j] * t.c[j];
    return s;
  };
  auto ac2 = [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t j = 0; j < S; ++j) s += t.a[i][j] * t.c[j] * t.c[j];
    return s;
  };
  auto aac = [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t j = 0; j < S; ++j) s += t.a[i][j] * ac(j);
    return s;
  };
  const double tol = 1e-11;
  for (const auto* w : {&t.b, &t.b_hat}) {
    CHECK(std::abs(sum(*w, [](std::size_t) { return 1.0; }) - 1.0) < tol);
    CHECK(std::abs(sum(*w, [&](std::size_t i) { return t.c[i]; }) - 0.5) < tol);
    CHECK(std::abs(sum(*w, [&](std::size_t i) { return t.c[i] * t.c[i]; }) - 1.0 / 3) < tol);
    CHECK(std::abs(sum(*w, ac) - 1.0 / 6) < tol);
  }
  CHECK(std::abs(sum(t.b, [&](std::size_t i) { return std::pow(t.c[i], 3); }) - 0.25) < tol);
  CHECK(std::abs(sum(t.b, [&](std::size_t i) { return t.c[i] * ac(i); }) - 0.125) < tol);
  CHECK(std::abs(sum(t.b, ac2) - 1.0 / 12) < tol);
  CHECK(std::abs(sum(t.b, aac) - 1.0 / 24) < tol);
  // The embedded solution is genuinely lower order.
  CHECK(std::abs(sum(t.b_hat, aac) - 1.0 / 24) > 1e-4);
  for (std::size_t i = 0; i < S; ++i)
    for (std::size_t j = i; j < S; ++j) CHECK(t.a[i][j] == 0.0);
}

TEST_CASE("adaptive rk step") {
  RkControl ctrl;
  RkWorkspace ws(2);
  const RhsFn still = [](double, std::span<const double>, std::span<double> d) { std::fill(d.begin(), d.end(), 0.0); };
  std::vector<double> x{1.5, -2.0};
  auto res = adaptive_rk_step(still, x, 0.0, 0.1, ctrl, ws);
  CHECK(res.accepted);
  CHECK(res.error_norm == 0.0);
  CHECK(x == std::vector<double>{1.5, -2.0});
  CHECK(ws.component_error()[0] == 0.0);
  CHECK(res.h_next > 0.1);

  RkControl tight;
  tight.abs_tol = 1e-12;
  tight.rel_tol = 0.0;
  tight.h_init = 0.1;
  const RhsFn fast = [](double t, std::span<const double> y, std::span<double> d) { d[0] = -1000.0 * (y[0] - std::cos(t)); };
  std::vector<double> y{0.0};
  res = adaptive_rk_step(fast, y, 0.0, 0.1, tight, ws);
  CHECK_FALSE(res.accepted);
  CHECK(res.h_next < 0.1);
  CHECK(y[0] == 0.0);

  tight.h_min = 0.05;
  CHECK_THROWS_AS(adaptive_rk_step(fast, y, 0.0, 0.1, tight, ws), std::runtime_error);

  RkControl bad;
  bad.h_min = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("adaptive integration of exponential decay") {
  RkControl ctrl;
  ctrl.abs_tol = 1e-10;
  ctrl.rel_tol = 1e-10;
  RkWorkspace ws(1);
  std::vector<double> x{1.0};
  double h = ctrl.h_init;
  integrate_adaptive(decay, x, 0.0, 1.0, ctrl, ws, h);
  CHECK(std::abs(x[0] - std::exp(-1.0)) < 10 * ctrl.abs_tol);

  // Default loose tolerances still meet the contract.
  RkControl loose;
  x = {1.0};
  h = loose.h_init;
  integrate_adaptive(decay, x, 0.0, 1.0, loose, ws, h);
  CHECK(std::abs(x[0] - std::exp(-1.0)) < 10 * loose.abs_tol);
}

TEST_CASE("rk convergence order") {
  RkWorkspace ws(1);
  std::vector<double> lh, le;
  for (int n : {4, 8, 16, 32}) {
    const double h = 1.0 / n;
    std::vector<double> x{1.0}, hi(1), lo(1);
    for (int k = 0; k < n; ++k) {
      rk43_fixed_step(decay, x, k * h, h, hi, lo, ws);
      x = hi;
    }
    lh.push_back(std::log(h));
    le.push_back(std::log(std::abs(x[0] - std::exp(-1.0))));
  }
  const auto mx = sample_stats(lh).mean, my = sample_stats(le).mean;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lh.size(); ++i) {
    sxy += (lh[i] - mx) * (le[i] - my);
    sxx += (lh[i] - mx) * (lh[i] - mx);
  }
  CHECK(sxy / sxx >= 4.0 - 0.3);
}

TEST_CASE("sir paths conserve the population") {
  const SirModel model({});
  const auto ctrl = model.control();
  Rng rng(99);
  std::vector<double> times;
  for (int k = 0; k <= 140; ++k) times.push_back(0.1 * k);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> x0(5);
    model.sample_initial(x0, rng);
    CHECK(x0[kS] + x0[kI] + x0[kR] == 763.0);
    for (const auto& x : simulate_path(model, x0, times, rng)) {
      worst = std::max(worst, std::abs(x[kS] + x[kI] + x[kR] - 763.0));
      CHECK(std::exp(x[kLogBeta]) > 0.0);
      CHECK(x[kS] >= -10 * ctrl.abs_tol);
      CHECK(x[kI] >= -10 * ctrl.abs_tol);
    }
  }
  CHECK(worst <= 10 * (ctrl.abs_tol + ctrl.rel_tol * 763));
}

TEST_CASE("sir noise is held over one propagate call") {
  // With negligible mean reversion log beta moves by theta3 * dW, however the
  // integrator splits the interval.
  SirParams p;
  p.beta = {0.0, 1e-12, 0.5};
  p.nu = {0.0, 1e-12, 0.5};
  const SirModel model(p);
  Rng a(4), b(4);
  std::vector<double> x{700, 0, 63, -1, -1};
  model.propagate(x, 0.0, 0.3, a);
  const double dw = std::sqrt(0.3) * b.normal();
  CHECK(x[kLogBeta] == doctest::Approx(-1 + 0.5 * dw).epsilon(1e-8));
}

TEST_CASE("simulate path") {
  const OuParams p{0.05, 0.5, 0.0};
  const OuModel still(p);
  Rng rng(8);
  const std::vector<double> times{0, 0.5, 1, 3, 10};
  for (const auto& x : simulate_path(still, std::vector<double>{0.1}, times, rng)) CHECK(x[0] == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(simulate_path(still, std::vector<double>{0.1}, times, rng).size() == times.size());
  CHECK_THROWS_AS(simulate_path(still, std::vector<double>{0.1, 0.2}, times, rng), std::invalid_argument);

  const OuModel model({});
  std::vector<double> ends;
  for (int rep = 0; rep < 20000; ++rep) ends.push_back(simulate_path(model, std::vector<double>{0.2}, times, rng).back()[0]);
  const auto mo = ou_moments(0.2, 10.0, model.params());
  const auto st = sample_stats(ends);
  CHECK(std::abs(st.mean - mo.mean) < 4 * st.se);
  CHECK(st.se * st.se * 20000 == doctest::Approx(mo.var).epsilon(0.05));
}

TEST_CASE("epsilon ball") {
  CHECK(epsilon_ball_loglik(0.5, 0.25, 0.25) == doctest::Approx(std::log(2.0)));
  CHECK(epsilon_ball_loglik(0.5, 0.75, 0.25) == doctest::Approx(std::log(2.0)));
  CHECK(epsilon_ball_loglik(0.5, 0.2, 0.25) == -INFINITY);
  CHECK(epsilon_ball_loglik(10.0, 10.01, 0.02) == doctest::Approx(std::log(25.0)));
  CHECK(std::log(25.0) == doctest::Approx(3.2189).epsilon(1e-4));

  const EpsilonBallObservation obs(kI, 0.02);
  std::vector<double> x{700, 20, 43, -6, -1};
  CHECK(obs.logpdf(std::vector<double>{20.01}, x) == doctest::Approx(std::log(25.0)));
  CHECK(obs.logpdf(std::vector<double>{21}, x) == -INFINITY);
  Rng rng(1);
  for (int rep = 0; rep < 100; ++rep) {
    const auto y = obs.sample(x, rng);
    CHECK(std::abs(y[0] - 20) <= 0.02);
  }
}

TEST_CASE("gaussian observation and normal logpdf") {
  const GaussianObservation obs({0, 2}, {0.5, 2.0});
  const std::vector<double> x{1.0, 9.0, -1.0};
  CHECK(obs.logpdf(std::vector<double>{1.2, -2.0}, x) ==
        doctest::Approx(normal_logpdf(1.2, 1.0, 0.5) + normal_logpdf(-2.0, -1.0, 2.0)));
  CHECK(obs.logpdf(std::vector<double>{kMissing, -2.0}, x) == doctest::Approx(normal_logpdf(-2.0, -1.0, 2.0)));
  CHECK(normal_logpdf(0.0, 0.0, 1.0) == doctest::Approx(-0.9189385));
  CHECK(normal_logpdf(1.0, 1.0, 0.0) == INFINITY);
  CHECK(normal_logpdf(1.1, 1.0, 0.0) == -INFINITY);
}

}  // TEST_SUITE
