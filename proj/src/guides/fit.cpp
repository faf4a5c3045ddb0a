#include "bpf/guides/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "bpf/guides/nelder_mead.hpp"

namespace bpf {

double gp_marginal_loglik(std::span<const double> times, std::span<const double> values, double alpha, double beta,
                          double nugget) {
  const auto n = static_cast<Eigen::Index>(times.size());
  if (n < 2 || values.size() != times.size()) throw std::invalid_argument("gp_marginal_loglik: need >= 2 points");
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) k(i, j) = k(j, i) = sq_exp_cov(times[i] - times[j], alpha, beta);
  k.diagonal().array() += nugget;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) throw std::runtime_error("gp_marginal_loglik: covariance not positive definite");
  const Eigen::Map<const Eigen::VectorXd> x(values.data(), n);
  const Eigen::VectorXd z = llt.matrixL().solve(x);
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * (z.squaredNorm() + logdet + static_cast<double>(n) * std::log(2.0 * std::numbers::pi));
}

GpFit fit_gp_guide(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size()) throw std::invalid_argument("fit_gp_guide: size mismatch");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < times.size(); ++i)
    if (!std::isnan(values[i])) pts.emplace_back(times[i], values[i]);
  if (pts.size() < 3) throw std::invalid_argument("fit_gp_guide: need at least 3 observed points");
  std::sort(pts.begin(), pts.end());

  std::vector<double> t(pts.size()), y(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) t[i] = pts[i].first;
  const double n = static_cast<double>(pts.size());
  double mean = 0.0;
  for (const auto& p : pts) mean += p.second / n;
  double var = 0.0;
  for (const auto& p : pts) var += (p.second - mean) * (p.second - mean) / n;

  GpFit fit;
  fit.params.mean = mean;
  double spacing = (t.back() - t.front()) / (n - 1.0);
  if (!(spacing > 0.0)) throw std::invalid_argument("fit_gp_guide: times must be distinct");
  if (!(var > 0.0)) {
    fit.params.alpha = kGpNugget;
    fit.params.beta = spacing * spacing;
    fit.degenerate = true;
    return fit;
  }
  const double sd = std::sqrt(var);
  for (std::size_t i = 0; i < pts.size(); ++i) y[i] = (pts[i].second - mean) / sd;

  auto objective = [&](std::span<const double> theta) {
    const double alpha = std::exp(theta[0]);
    const double beta = std::exp(theta[1]);
    try {
      return -gp_marginal_loglik(t, y, alpha, beta, kGpNugget * alpha);
    } catch (const std::runtime_error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  NelderMeadOptions opts;
  opts.initial_step = 1.0;
  opts.x_tol = 1e-7;
  opts.f_tol = 1e-9;
  opts.max_iterations = 4000;
  const auto best = nelder_mead(objective, {0.0, std::log(4.0 * spacing * spacing)}, opts);
  fit.converged = best.converged;
  fit.loglik = -best.value;
  fit.params.alpha = std::exp(best.x[0]) * var;
  fit.params.beta = std::exp(best.x[1]);
  if (!std::isfinite(fit.loglik)) throw std::runtime_error("fit_gp_guide: optimiser failed");
  return fit;
}

std::vector<PdPair> simulate_pd_pairs(const PdModel& model, double x0, std::size_t paths, double horizon,
                                      double sim_step, std::span<const double> lags, double stride, Rng& rng) {
  const auto steps = static_cast<std::size_t>(std::llround(horizon / sim_step));
  const double h = horizon / static_cast<double>(steps);
  const auto stride_steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(stride / h)));
  std::vector<PdPair> out;
  std::vector<double> path(steps + 1);
  for (std::size_t p = 0; p < paths; ++p) {
    std::vector<double> x{x0};
    path[0] = x0;
    for (std::size_t j = 1; j <= steps; ++j) {
      model.propagate(x, static_cast<double>(j - 1) * h, h, rng);
      path[j] = x[0];
    }
    for (double lag : lags) {
      const auto lag_steps = static_cast<std::size_t>(std::llround(lag / h));
      if (lag_steps == 0 || lag_steps > steps) continue;
      for (std::size_t s = 0; s + lag_steps <= steps; s += stride_steps)
        out.push_back({static_cast<double>(lag_steps) * h, path[s], path[s + lag_steps]});
    }
  }
  return out;
}

PdFit fit_pd_guide(std::span<const PdPair> pairs, double power) {
  if (pairs.empty()) throw std::invalid_argument("fit_pd_guide: no pairs");
  auto objective = [&](std::span<const double> theta) {
    PdGuideParams p{std::exp(theta[0]), std::exp(theta[1]), 1.0};
    double acc = 0.0;
    for (const auto& pr : pairs) acc += pd_guide_logpdf(pr.to, pr.from, 0.0, pr.gap, p);
    return -acc;
  };
  NelderMeadOptions opts;
  opts.initial_step = 0.5;
  opts.x_tol = 1e-6;
  opts.f_tol = 1e-8;
  const auto best = nelder_mead(objective, {std::log(0.1), std::log(0.5)}, opts);
  PdFit fit;
  fit.params = {std::exp(best.x[0]), std::exp(best.x[1]), power};
  fit.loglik = -best.value;
  fit.converged = best.converged;
  return fit;
}

}  // namespace bpf
