#include "bpf/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "bpf/core/log_math.hpp"

namespace bpf {

namespace {

bool any_positive(std::span<const double> log_z) {
  return std::any_of(log_z.begin(), log_z.end(), [](double v) { return v > kNegInf; });
}

}  // namespace

void EstimateBatch::validate() const {
  if (log_z.empty()) throw std::invalid_argument("metrics: empty batch");
  if (times.size() != log_z.size()) throw std::invalid_argument("metrics: times and estimates differ in length");
  for (double t : times)
    if (!(t > 0.0)) throw std::invalid_argument("metrics: times must be positive");
  for (double v : log_z)
    if (std::isnan(v) || v == INFINITY) throw std::invalid_argument("metrics: estimates must be finite or -inf");
}

double mse_log(const EstimateBatch& b) {
  if (!b.true_log_z) throw std::invalid_argument("mse_log: batch has no reference value");
  if (b.log_z.empty()) throw std::invalid_argument("mse_log: empty batch");
  double acc = 0.0;
  for (double v : b.log_z) {
    const double d = v - *b.true_log_z;
    acc += d * d;
  }
  return acc / static_cast<double>(b.log_z.size());
}

double mse_natural_relative(const EstimateBatch& b) {
  if (!b.true_log_z) throw std::invalid_argument("mse_natural_relative: batch has no reference value");
  double acc = 0.0;
  for (double v : b.log_z) {
    const double d = std::exp(v - *b.true_log_z) - 1.0;
    acc += d * d;
  }
  return acc / static_cast<double>(b.log_z.size());
}

// exp(v - max) for every estimate, so the largest term is exactly 1.
static std::vector<double> shifted(std::span<const double> log_z) {
  const double m = *std::max_element(log_z.begin(), log_z.end());
  std::vector<double> e(log_z.size());
  std::transform(log_z.begin(), log_z.end(), e.begin(), [m](double v) { return std::exp(v - m); });
  return e;
}

double ess_batch(std::span<const double> log_z) {
  if (!any_positive(log_z)) throw std::domain_error("ess_batch: all estimates are zero");
  double s1 = 0.0, s2 = 0.0;
  for (double x : shifted(log_z)) {
    s1 += x;
    s2 += x * x;
  }
  return s1 * s1 / s2;
}

double car(std::span<const double> log_z) {
  if (!any_positive(log_z)) throw std::domain_error("car: all estimates are zero");
  auto e = shifted(log_z);
  std::sort(e.begin(), e.end());
  // Cumulative sums in unnormalised units, divided by the total once.
  double c = 0.0, sum_c = 0.0;
  for (double x : e) {
    c += x;
    sum_c += c;
  }
  return (2.0 * (sum_c / c) - 1.0) / static_cast<double>(e.size());
}

MetricsReport time_adjusted(const EstimateBatch& b) {
  b.validate();
  MetricsReport r;
  r.mean_time = std::accumulate(b.times.begin(), b.times.end(), 0.0) / static_cast<double>(b.times.size());
  if (b.true_log_z) {
    r.mse = mse_log(b);
    r.mse_metric = 1.0 / (r.mse * r.mean_time);
  } else {
    r.mse = std::numeric_limits<double>::quiet_NaN();
    r.mse_metric = std::numeric_limits<double>::quiet_NaN();
  }
  if (any_positive(b.log_z)) {
    r.ess = ess_batch(b.log_z);
    r.car = car(b.log_z);
  }
  r.ess_metric = r.ess / r.mean_time;
  r.car_metric = r.car / r.mean_time;
  return r;
}

McmcEss ess_mcmc(std::span<const double> chain, std::size_t max_lag) {
  const std::size_t n = chain.size();
  if (n <= max_lag) throw std::invalid_argument("ess_mcmc: chain must be longer than max_lag");
  const double mean = std::accumulate(chain.begin(), chain.end(), 0.0) / static_cast<double>(n);
  double c0 = 0.0;
  for (double v : chain) c0 += (v - mean) * (v - mean);
  if (!(c0 > 0.0)) return {static_cast<double>(n), true};
  double sum = 0.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) ck += (chain[t] - mean) * (chain[t + k] - mean);
    const double r = ck / c0;
    if (r <= 0.0) break;
    sum += r;
  }
  return {static_cast<double>(n) / (1.0 + 2.0 * sum), false};
}

McmcEss ess_mcmc(const std::vector<std::vector<double>>& chains, std::size_t max_lag) {
  if (chains.empty()) throw std::invalid_argument("ess_mcmc: no parameters");
  McmcEss best{INFINITY, false};
  for (const auto& c : chains) {
    const auto e = ess_mcmc(c, max_lag);
    if (e.value < best.value) best = e;
  }
  return best;
}

double mcse_mean(std::span<const double> chain, std::size_t max_lag) {
  const auto e = ess_mcmc(chain, max_lag);
  const double n = static_cast<double>(chain.size());
  const double mean = std::accumulate(chain.begin(), chain.end(), 0.0) / n;
  double var = 0.0;
  for (double v : chain) var += (v - mean) * (v - mean);
  var /= n - 1.0;
  return std::sqrt(var / e.value);
}

}  // namespace bpf
