#pragma once

#include <cstddef>
#include <vector>

#include "bpf/guides/guide.hpp"

namespace bpf {

/// Squared-exponential GP guide for one observed series. `mean` is the
/// offset removed before fitting (the GP itself is zero-mean).
struct GpGuideParams {
  double alpha = 1.0;         // marginal variance
  double beta = 1.0;          // squared length-scale
  double inflation = 1.0;     // lambda >= 1
  double power = 1.0;         // tau in (0, 1]
  double obs_variance = 0.0;  // varsigma^2, observation mode only
  double mean = 0.0;

  void validate() const;
};

/// alpha exp(-dt^2 / (2 beta)).
double sq_exp_cov(double dt, double alpha, double beta);

struct GpConditional {
  double mean = 0.0;
  double var = 0.0;
};

/// Conditions the GP on the current state only:
/// mu = m + C(t_n - t_k) / alpha (x_k - m), sigma^2 = alpha - C^2 / alpha.
GpConditional gp_condition(double x_k, double t_k, double t_n, const GpGuideParams& p);

enum class GpMode { state, observation };

/// tau * log phi(target; mu_k, lambda (sigma_k^2 + varsigma^2)); varsigma^2 is
/// added in observation mode only.
double gp_guide_logpdf(double target, double x_k, double t_k, double t_n, const GpGuideParams& p, GpMode mode);

/// Observation mode: target column c is compared with state component
/// `components[c]`. State mode: the target is a full state, so its entry
/// `components[c]` is used. Missing targets are skipped; log-values summed.
class GpGuide final : public Guide {
 public:
  GpGuide(GpMode mode, std::vector<std::size_t> components, std::vector<GpGuideParams> params);
  double log_value(std::span<const double> x, double t, const Observation& target) const override;

  GpMode mode() const { return mode_; }
  const std::vector<GpGuideParams>& params() const { return params_; }

 private:
  GpMode mode_;
  std::vector<std::size_t> components_;
  std::vector<GpGuideParams> params_;
};

}  // namespace bpf
