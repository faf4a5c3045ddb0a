#include "bpf/guides/gp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bpf {

void GpGuideParams::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("gp guide: alpha must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("gp guide: beta must be positive");
  if (!(inflation >= 1.0)) throw std::invalid_argument("gp guide: inflation must be >= 1");
  if (!(power > 0.0 && power <= 1.0)) throw std::invalid_argument("gp guide: power must lie in (0, 1]");
  if (!(obs_variance >= 0.0)) throw std::invalid_argument("gp guide: obs_variance must be non-negative");
}

double sq_exp_cov(double dt, double alpha, double beta) { return alpha * std::exp(-dt * dt / (2.0 * beta)); }

GpConditional gp_condition(double x_k, double t_k, double t_n, const GpGuideParams& p) {
  const double gap = t_n - t_k;
  const double rho = std::exp(-gap * gap / (2.0 * p.beta));  // C / alpha
  // alpha - C^2 / alpha = alpha (1 - rho^2), evaluated without cancellation.
  const double var = p.alpha * -std::expm1(-gap * gap / p.beta);
  return {p.mean + rho * (x_k - p.mean), std::clamp(var, 0.0, p.alpha)};
}

double gp_guide_logpdf(double target, double x_k, double t_k, double t_n, const GpGuideParams& p, GpMode mode) {
  const auto cond = gp_condition(x_k, t_k, t_n, p);
  const double var = p.inflation * (cond.var + (mode == GpMode::observation ? p.obs_variance : 0.0));
  return p.power * normal_logpdf(target, cond.mean, var);
}

GpGuide::GpGuide(GpMode mode, std::vector<std::size_t> components, std::vector<GpGuideParams> params)
    : mode_(mode), components_(std::move(components)), params_(std::move(params)) {
  if (components_.size() != params_.size())
    throw std::invalid_argument("gp guide: one parameter set per observed component");
  for (const auto& p : params_) p.validate();
}

double GpGuide::log_value(std::span<const double> x, double t, const Observation& target) const {
  double acc = 0.0;
  for (std::size_t c = 0; c < components_.size(); ++c) {
    const double y = mode_ == GpMode::state ? target.values[components_[c]] : target.values[c];
    if (is_missing(y)) continue;
    acc += gp_guide_logpdf(y, x[components_[c]], t, target.time, params_[c], mode_);
  }
  return acc;
}

}  // namespace bpf
