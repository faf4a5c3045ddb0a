#pragma once

#include <numbers>

#include "bpf/models/model.hpp"

namespace bpf {

/// dX = sin(X - theta) dt + dW.
struct PdParams {
  double theta = std::numbers::pi;
};

inline double pd_drift(double x, const PdParams& p) { return std::sin(x - p.theta); }

/// Periodic-drift diffusion simulated with Euler-Maruyama; the transition
/// density is the Euler-Maruyama approximation over dt.
class PdModel final : public Model {
 public:
  explicit PdModel(PdParams p) : p_(p) {}

  std::size_t dim() const override { return 1; }
  void propagate(std::span<double> x, double t, double dt, Rng& rng) const override;
  std::optional<double> transition_logpdf(std::span<const double> to, std::span<const double> from, double t,
                                          double dt) const override;

  const PdParams& params() const { return p_; }

 private:
  PdParams p_;
};

}  // namespace bpf
