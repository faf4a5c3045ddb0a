#include "bpf/models/ou.hpp"

#include <cmath>
#include <stdexcept>

namespace bpf {

void OuParams::validate() const {
  if (!(theta2 > 0.0)) throw std::invalid_argument("OU: theta2 must be positive");
  if (!(theta3 >= 0.0)) throw std::invalid_argument("OU: theta3 must be non-negative");
  if (!std::isfinite(theta1)) throw std::invalid_argument("OU: theta1 must be finite");
}

Moments ou_moments(double x, double dt, const OuParams& p) {
  const double m = p.stationary_mean();
  const double decay = std::exp(-p.theta2 * dt);
  // 1 - exp(-2 theta2 dt) without cancellation for small dt.
  const double var = p.stationary_variance() * -std::expm1(-2.0 * p.theta2 * dt);
  return {m + (x - m) * decay, var};
}

double ou_sample_step(double x, double dt, const OuParams& p, Rng& rng) {
  const auto mo = ou_moments(x, dt, p);
  return mo.mean + std::sqrt(mo.var) * rng.normal();
}

double ou_logpdf(double to, double from, double dt, const OuParams& p) {
  const auto mo = ou_moments(from, dt, p);
  return normal_logpdf(to, mo.mean, mo.var);
}

OuModel::OuModel(OuParams p) : p_(p) { p_.validate(); }

void OuModel::propagate(std::span<double> x, double, double dt, Rng& rng) const {
  // The grid step is nearly always the same, so keep its constants per thread.
  struct Cache {
    double t1 = NAN, t2 = NAN, t3 = NAN, dt = NAN;
    double mean = 0.0, decay = 0.0, sd = 0.0;
  };
  thread_local Cache c;
  if (c.dt != dt || c.t1 != p_.theta1 || c.t2 != p_.theta2 || c.t3 != p_.theta3) {
    c = {p_.theta1, p_.theta2, p_.theta3, dt, p_.stationary_mean(), std::exp(-p_.theta2 * dt),
         std::sqrt(p_.stationary_variance() * -std::expm1(-2.0 * p_.theta2 * dt))};
  }
  x[0] = c.mean + (x[0] - c.mean) * c.decay + c.sd * rng.normal();
}

void OuModel::sample_initial(std::span<double> x, Rng& rng) const {
  x[0] = rng.normal(p_.stationary_mean(), std::sqrt(p_.stationary_variance()));
}

std::optional<double> OuModel::transition_logpdf(std::span<const double> to, std::span<const double> from, double,
                                                 double dt) const {
  return ou_logpdf(to[0], from[0], dt, p_);
}

}  // namespace bpf
