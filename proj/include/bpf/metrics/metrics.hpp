#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace bpf {

/// Replicate log-normalising-constant estimates and their run times.
struct EstimateBatch {
  std::vector<double> log_z;
  std::vector<double> times;  // seconds
  std::optional<double> true_log_z;

  /// Z >= 1, matching lengths, times > 0.
  void validate() const;
};

/// (1/Z) sum (log z_i - log z*)^2. Throws if there is no reference.
double mse_log(const EstimateBatch& b);
/// (1/Z) sum (z_i - z*)^2 on the natural scale, divided by z*^2 so it stays
/// representable; equals the plain MSE up to that factor.
double mse_natural_relative(const EstimateBatch& b);

/// (sum z)^2 / sum z^2, from logs. Throws if every estimate is zero.
double ess_batch(std::span<const double> log_z);
/// (1/Z)(2 sum_i c_i - 1) over normalised estimates sorted ascending,
/// c_i the cumulative sum through rank i. Throws if every estimate is zero.
double car(std::span<const double> log_z);

struct MetricsReport {
  double mse = 0.0;  // raw, log scale (NaN without a reference)
  double ess = 0.0;
  double car = 0.0;
  double mean_time = 0.0;
  double mse_metric = 0.0;  // 1 / (mse * mean_time)
  double ess_metric = 0.0;  // ess / mean_time
  double car_metric = 0.0;  // car / mean_time
};

/// All three metrics scaled by the inverse mean run time. A batch with no
/// non-zero estimate has ESS and CAR (and their metrics) of 0.
MetricsReport time_adjusted(const EstimateBatch& b);

struct McmcEss {
  double value = 0.0;
  bool degenerate = false;  // zero-variance chain: value is the chain length
};

/// N / (1 + 2 sum_{k=1}^{K} R(k)), K the last lag before the first
/// non-positive autocorrelation, capped at max_lag.
McmcEss ess_mcmc(std::span<const double> chain, std::size_t max_lag);
/// Minimum over parameters.
McmcEss ess_mcmc(const std::vector<std::vector<double>>& chains, std::size_t max_lag);

/// Monte Carlo standard error of the chain mean: sd / sqrt(ESS).
double mcse_mean(std::span<const double> chain, std::size_t max_lag);

}  // namespace bpf
