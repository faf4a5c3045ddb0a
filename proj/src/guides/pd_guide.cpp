#include "bpf/guides/pd_guide.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bpf {

void PdGuideParams::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("pd guide: epsilon must be positive");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("pd guide: sigma2 must be positive");
  if (!(power > 0.0 && power <= 1.0)) throw std::invalid_argument("pd guide: power must lie in (0, 1]");
}

double nearest_multiple_2pi(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return two_pi * std::ceil(x / two_pi - 0.5);
}

double pd_guide_normalizer(double gap, const PdGuideParams& p) {
  const double s = p.sigma2 * gap;
  return std::sqrt(2.0 * std::numbers::pi * s) * (std::exp(-0.5 * s) + 1.0 + p.epsilon);
}

double pd_guide_logpdf(double x_n, double x_k, double t_k, double t_n, const PdGuideParams& p) {
  const double gap = t_n - t_k;
  if (!(gap > 0.0)) throw std::invalid_argument("pd guide: requires t_k < t_n");
  const double d = x_n - nearest_multiple_2pi(x_k);
  const double s = p.sigma2 * gap;
  const double lq = std::log(std::cos(d) + 1.0 + p.epsilon) - d * d / (2.0 * s) - std::log(pd_guide_normalizer(gap, p));
  return p.power * lq;
}

PdGuide::PdGuide(PdGuideParams p) : p_(p) { p_.validate(); }

double PdGuide::log_value(std::span<const double> x, double t, const Observation& target) const {
  return pd_guide_logpdf(target.values[0], x[0], t, target.time, p_);
}

}  // namespace bpf
