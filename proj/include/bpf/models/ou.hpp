#pragma once

#include "bpf/models/model.hpp"

namespace bpf {

/// dX = (theta1 - theta2 X) dt + theta3 dW.
struct OuParams {
  double theta1 = 0.0187;
  double theta2 = 0.2610;
  double theta3 = 0.0224;

  // theta2 > 0; theta3 >= 0 (theta3 == 0 is the deterministic limit).
  void validate() const;
  double stationary_mean() const { return theta1 / theta2; }
  double stationary_variance() const { return theta3 * theta3 / (2.0 * theta2); }
};

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

/// Exact conditional mean and variance of X(t + dt) given X(t) = x.
Moments ou_moments(double x, double dt, const OuParams& p);
double ou_sample_step(double x, double dt, const OuParams& p, Rng& rng);
/// Exact transition log-density. dt == 0 gives -inf unless to == from.
double ou_logpdf(double to, double from, double dt, const OuParams& p);

/// Scalar OU process with exact stepping; the initial prior is the
/// stationary law.
class OuModel final : public Model {
 public:
  explicit OuModel(OuParams p);

  std::size_t dim() const override { return 1; }
  void propagate(std::span<double> x, double t, double dt, Rng& rng) const override;
  void sample_initial(std::span<double> x, Rng& rng) const override;
  std::optional<double> transition_logpdf(std::span<const double> to, std::span<const double> from, double t,
                                          double dt) const override;
  bool exact_transition() const override { return true; }

  const OuParams& params() const { return p_; }

 private:
  OuParams p_;
};

}  // namespace bpf
