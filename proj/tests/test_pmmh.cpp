#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bpf/metrics/metrics.hpp"
#include "bpf/pmmh/pmmh.hpp"
#include "helpers.hpp"

using namespace bpf;

namespace {

// Standard normal log-likelihood in every coordinate.
const LogLikelihood gaussian = [](std::span<const double> th, std::uint64_t) {
  double s = 0.0;
  for (double x : th) s += -0.5 * x * x;
  return s;
};

const LogLikelihood flat = [](std::span<const double>, std::uint64_t) { return 0.0; };

}  // namespace

TEST_SUITE("pmmh") {

TEST_CASE("priors") {
  const auto u = ParamPrior::uniform(-1, 1);
  CHECK(u.log_density(0.0) == doctest::Approx(std::log(0.5)));
  CHECK(u.log_density(1.0) == doctest::Approx(std::log(0.5)));
  CHECK(ParamPrior::uniform(0, 1).log_density(-0.1) == -INFINITY);
  const auto g = ParamPrior::gamma(2, 1);
  for (double x : {0.1, 1.0, 3.7}) CHECK(g.log_density(x) == doctest::Approx(std::log(x) - x));
  CHECK(g.log_density(0.0) == -INFINITY);
  CHECK(g.log_density(-1.0) == -INFINITY);
  CHECK(ParamPrior::gamma(3, 2).log_density(1.5) ==
        doctest::Approx(2 * std::log(1.5) - 0.75 - std::lgamma(3.0) - 3 * std::log(2.0)));
  CHECK(ParamPrior::normal(1, 4).log_density(3) == doctest::Approx(-0.5 * std::log(2 * M_PI * 4) - 0.5));

  const std::vector<ParamPrior> ps{u, g};
  CHECK(log_prior(std::vector<double>{0.0, 1.0}, ps) == doctest::Approx(std::log(0.5) - 1.0));
  CHECK(log_prior(std::vector<double>{2.0, 1.0}, ps) == -INFINITY);
  CHECK_THROWS(log_prior(std::vector<double>{0.0}, ps));

  CHECK(to_string(parse_prior("uniform(-1, 1)")) == to_string(u));
  const auto p = parse_prior(" gamma( 2 ,0.5 )");
  CHECK(p.kind == PriorKind::gamma);
  CHECK(p.b == 0.5);
  CHECK(parse_prior("normal(0, 4)").kind == PriorKind::normal);
  CHECK_THROWS_AS(parse_prior("beta(1, 1)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_prior("uniform(1, -1)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_prior("gamma(2)"), std::invalid_argument);
}

TEST_CASE("proposal covariance") {
  ProposalSpec spec;
  spec.cov.resize(2, 2);
  spec.cov << 2.0, 0.6, 0.6, 0.5;
  Rng rng(1);
  const std::size_t n = 100000;
  double s00 = 0, s01 = 0, s11 = 0, m0 = 0, m1 = 0;
  const std::vector<double> at{1.0, -3.0};
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = propose(at, spec, rng);
    const double a = p[0] - at[0], b = p[1] - at[1];
    m0 += a;
    m1 += b;
    s00 += a * a;
    s01 += a * b;
    s11 += b * b;
  }
  CHECK(std::abs(m0 / n) < 4 * std::sqrt(2.0 / n));
  CHECK(std::abs(m1 / n) < 4 * std::sqrt(0.5 / n));
  CHECK(s00 / n == doctest::Approx(2.0).epsilon(0.02));
  CHECK(s01 / n == doctest::Approx(0.6).epsilon(0.04));
  CHECK(s11 / n == doctest::Approx(0.5).epsilon(0.02));

  ProposalSpec zero;
  zero.cov = Eigen::MatrixXd::Zero(2, 2);
  CHECK(propose(at, zero, rng) == at);

  // Semi-definite covariance moves only along its range.
  ProposalSpec rank1;
  rank1.cov = Eigen::MatrixXd::Ones(2, 2);
  const auto p = propose(at, rank1, rng);
  CHECK(p[0] - at[0] == doctest::Approx(p[1] - at[1]));

  CHECK(proposal_logpdf(at, std::vector<double>{0.2, -2.5}, spec) ==
        doctest::Approx(proposal_logpdf(std::vector<double>{0.2, -2.5}, at, spec)));

  ProposalSpec bad;
  bad.cov.resize(2, 2);
  bad.cov << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.cov << 1.0, 0.1, 0.0, 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  const std::vector<double> sds{0.5, 2.0};
  const auto diag = ProposalSpec::diagonal(sds);
  CHECK(diag.cov(1, 1) == 4.0);
  CHECK(diag.cov(0, 1) == 0.0);
}

TEST_CASE("transforms") {
  const std::vector<ParamPrior> ps{ParamPrior::uniform(-1, 1), ParamPrior::gamma(2, 1), ParamPrior::normal(0, 1)};
  auto spec = ProposalSpec::diagonal(std::vector<double>{0.1, 0.1, 0.1});
  set_transforms_from_priors(spec, ps);
  REQUIRE(spec.transforms.size() == 3);
  CHECK(spec.transforms[0] == Transform::logit);
  CHECK(spec.transforms[1] == Transform::log);
  CHECK(spec.transforms[2] == Transform::identity);
  CHECK(parse_transform(to_string(Transform::logit)) == Transform::logit);

  Rng rng(2);
  for (int rep = 0; rep < 200; ++rep) {
    const std::vector<double> th{2 * rng.uniform() - 1, std::exp(rng.normal()), rng.normal()};
    const auto back = from_unconstrained(to_unconstrained(th, spec), spec);
    for (int j = 0; j < 3; ++j) CHECK(back[j] == doctest::Approx(th[j]).epsilon(1e-12));

    // Jacobian against a central finite difference of the inverse map.
    const auto phi = to_unconstrained(th, spec);
    double lj = 0.0;
    for (int j = 0; j < 3; ++j) {
      const double h = 1e-6;
      auto up = phi, dn = phi;
      up[j] += h;
      dn[j] -= h;
      lj += std::log((from_unconstrained(up, spec)[j] - from_unconstrained(dn, spec)[j]) / (2 * h));
    }
    CHECK(log_jacobian(th, spec) == doctest::Approx(lj).epsilon(1e-6));
  }
  CHECK(log_jacobian(std::vector<double>{1.0, 1.0, 0.0}, spec) == -INFINITY);
  CHECK(log_jacobian(std::vector<double>{0.0, 0.0, 0.0}, spec) == -INFINITY);
  for (int rep = 0; rep < 200; ++rep) {
    const auto p = propose(std::vector<double>{0.999, 1e-3, 0.0}, spec, rng);
    CHECK(p[0] < 1.0);
    CHECK(p[0] > -1.0);
    CHECK(p[1] > 0.0);
  }
}

TEST_CASE("step rules") {
  const std::vector<ParamPrior> ps{ParamPrior::uniform(0, 1)};
  std::size_t calls = 0;
  const LogLikelihood counted = [&](std::span<const double>, std::uint64_t) {
    ++calls;
    return 0.0;
  };
  // A huge raw-scale step lands outside [0, 1] most of the time.
  const auto wide = ProposalSpec::diagonal(std::vector<double>{100.0});
  PmmhCounters counters;
  auto state = init_chain(std::vector<double>{0.5}, counted, ps, 1, &counters);
  CHECK(calls == 1);
  Rng rng(3);
  for (int i = 0; i < 500; ++i) state = pmmh_step(state, counted, ps, wide, rng, i, &counters);
  CHECK(counters.likelihood_calls == calls);
  CHECK(counters.likelihood_calls + counters.out_of_support == 501);
  CHECK(counters.out_of_support > 400);

  // Uphill moves are always taken.
  const auto small = ProposalSpec::diagonal(std::vector<double>{0.01});
  const LogLikelihood increasing = [](std::span<const double> th, std::uint64_t) { return 1e3 * th[0]; };
  for (int i = 0; i < 100; ++i) {
    auto s = init_chain(std::vector<double>{0.5}, increasing, ps, 0);
    const auto next = pmmh_step(s, increasing, ps, small, rng, 0);
    if (next.theta[0] > s.theta[0]) CHECK(next.accepted == 1);
  }

  // A degenerate estimate is rejected and the stored estimate kept.
  const LogLikelihood dead = [](std::span<const double> th, std::uint64_t) { return th[0] > 0.5 ? -INFINITY : -7.5; };
  auto s = init_chain(std::vector<double>{0.4}, dead, ps, 0);
  for (int i = 0; i < 200; ++i) {
    s = pmmh_step(s, dead, ps, small, rng, i);
    CHECK(s.theta[0] <= 0.5);
    CHECK(s.log_z == -7.5);
  }

  CHECK_THROWS_AS(init_chain(std::vector<double>{2.0}, flat, ps, 0), std::invalid_argument);
  CHECK_THROWS_AS(init_chain(std::vector<double>{0.7}, dead, ps, 0), std::invalid_argument);
}

TEST_CASE("retained estimate is never recomputed") {
  // Noisy estimates: a rejected step must carry the old noisy value.
  const std::vector<ParamPrior> ps{ParamPrior::normal(0, 100)};
  const LogLikelihood noisy = [](std::span<const double> th, std::uint64_t seed) {
    Rng r(seed);
    return -0.5 * th[0] * th[0] + r.normal();
  };
  PmmhOptions opt;
  opt.steps = 2000;
  opt.seed = 4;
  PmmhCounters counters;
  const auto trace = run_pmmh(std::vector<double>{0.0}, noisy, ps, ProposalSpec::diagonal(std::vector<double>{1.0}),
                              opt, &counters);
  CHECK(counters.likelihood_calls == 2001);
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (!trace.accepted[i]) {
      CHECK(trace.log_z[i] == trace.log_z[i - 1]);
      CHECK(trace.row(i)[0] == trace.row(i - 1)[0]);
    }
}

TEST_CASE("zero covariance gives a constant chain") {
  const std::vector<ParamPrior> ps{ParamPrior::normal(0, 1), ParamPrior::normal(0, 1)};
  ProposalSpec spec;
  spec.cov = Eigen::MatrixXd::Zero(2, 2);
  PmmhOptions opt;
  opt.steps = 300;
  const auto trace = run_pmmh(std::vector<double>{0.3, -0.2}, gaussian, ps, spec, opt);
  CHECK(trace.size() == 300);
  CHECK(trace.acceptance_rate() == 1.0);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    CHECK(trace.row(i)[0] == 0.3);
    CHECK(trace.row(i)[1] == -0.2);
  }
}

TEST_CASE("acceptance falls as the proposal widens") {
  const std::vector<ParamPrior> ps{ParamPrior::normal(0, 1e6)};
  double last = 1.1;
  for (double sd : {0.05, 0.5, 2.0, 8.0, 50.0}) {
    PmmhOptions opt;
    opt.steps = 5000;
    opt.seed = 9;
    const auto rate =
        run_pmmh(std::vector<double>{0.0}, gaussian, ps, ProposalSpec::diagonal(std::vector<double>{sd}), opt)
            .acceptance_rate();
    CAPTURE(sd);
    CHECK(rate < last);
    last = rate;
  }
}

TEST_CASE("same seed gives the same trace") {
  const std::vector<ParamPrior> ps{ParamPrior::uniform(-5, 5)};
  PmmhOptions opt;
  opt.steps = 500;
  opt.burn_in = 50;
  opt.seed = 17;
  const auto spec = ProposalSpec::diagonal(std::vector<double>{1.0});
  const auto a = run_pmmh(std::vector<double>{0.0}, gaussian, ps, spec, opt);
  const auto b = run_pmmh(std::vector<double>{0.0}, gaussian, ps, spec, opt);
  CHECK(a.theta == b.theta);
  CHECK(a.log_z == b.log_z);
  CHECK(a.accepted == b.accepted);
  opt.seed = 18;
  CHECK(run_pmmh(std::vector<double>{0.0}, gaussian, ps, spec, opt).theta != a.theta);
}

TEST_CASE("transformed random walk targets the prior under a flat likelihood") {
  const std::vector<ParamPrior> ps{ParamPrior::gamma(2, 1), ParamPrior::uniform(-1, 1)};
  auto spec = ProposalSpec::diagonal(std::vector<double>{0.8, 1.5});
  set_transforms_from_priors(spec, ps);
  PmmhOptions opt;
  opt.steps = 200000;
  opt.burn_in = 1000;
  opt.seed = 23;
  const auto trace = run_pmmh(std::vector<double>{1.0, 0.0}, flat, ps, spec, opt);
  const auto g = trace.column(0), u = trace.column(1);
  const auto sg = sample_stats(g), su = sample_stats(u);
  const double mcse_g = mcse_mean(g, 1000), mcse_u = mcse_mean(u, 1000);
  CHECK(std::abs(sg.mean - 2.0) < 4 * mcse_g);
  CHECK(std::abs(su.mean) < 4 * mcse_u);
  double ss = 0;
  for (double x : u) ss += x * x;
  CHECK(ss / u.size() == doctest::Approx(1.0 / 3).epsilon(0.05));
}

TEST_CASE("raw-scale chain recovers a gaussian posterior") {
  const std::vector<ParamPrior> ps{ParamPrior::normal(0, 1e6)};
  PmmhOptions opt;
  opt.steps = 100000;
  opt.seed = 31;
  const auto trace =
      run_pmmh(std::vector<double>{3.0}, gaussian, ps, ProposalSpec::diagonal(std::vector<double>{2.4}), opt);
  const auto x = trace.column(0);
  CHECK(std::abs(sample_stats(x).mean) < 4 * mcse_mean(x, 1000));
}

TEST_CASE("pilot covariance") {
  std::vector<std::vector<double>> draws;
  Rng rng(6);
  for (int i = 0; i < 50000; ++i) {
    const double a = rng.normal(), b = rng.normal();
    draws.push_back({a, 0.5 * a + b});
  }
  auto spec = ProposalSpec::diagonal(std::vector<double>{1.0, 1.0});
  const auto cov = pilot_covariance(draws, spec);
  const double k = 2.38 * 2.38 / 2;
  CHECK(cov(0, 0) == doctest::Approx(k).epsilon(0.03));
  CHECK(cov(0, 1) == doctest::Approx(0.5 * k).epsilon(0.05));
  CHECK(cov(1, 1) == doctest::Approx(1.25 * k).epsilon(0.03));
  CHECK(cov(0, 1) == cov(1, 0));
  CHECK_THROWS_AS(pilot_covariance({{1.0, 2.0}}, spec), std::invalid_argument);
}

TEST_CASE("trace csv") {
  ChainTrace t;
  t.dim = 2;
  t.theta = {0.1, 2.0, 0.3, 4.0};
  t.log_z = {-1.5, -2.5};
  t.accepted = {1, 0};
  std::ostringstream os;
  const std::vector<std::string> names{"a", "b"};
  write_trace_csv(os, t, names);
  CHECK(os.str() == "a,b,log_z,accepted\n0.10000000000000001,2,-1.5,1\n0.29999999999999999,4,-2.5,0\n");
  CHECK(t.acceptance_rate() == 0.5);
}

}  // TEST_SUITE
