#pragma once

#include "bpf/guides/guide.hpp"

namespace bpf {

struct PdGuideParams {
  double epsilon = 0.0259;  // keeps the density positive at cosine troughs
  double sigma2 = 0.3238;   // variance growth per unit time
  double power = 0.25;

  void validate() const;
};

/// Nearest multiple of 2 pi; exact half-period ties go to the smaller multiple.
double nearest_multiple_2pi(double x);

/// sqrt(2 pi s) (exp(-s / 2) + 1 + epsilon) with s = sigma2 * gap.
double pd_guide_normalizer(double gap, const PdGuideParams& p);

/// power * log of
/// (cos(x_n - xh) + 1 + eps) exp(-(x_n - xh)^2 / (2 s)) / z, xh = nearest_multiple_2pi(x_k).
double pd_guide_logpdf(double x_n, double x_k, double t_k, double t_n, const PdGuideParams& p);

class PdGuide final : public Guide {
 public:
  explicit PdGuide(PdGuideParams p);
  double log_value(std::span<const double> x, double t, const Observation& target) const override;
  const PdGuideParams& params() const { return p_; }

 private:
  PdGuideParams p_;
};

}  // namespace bpf
