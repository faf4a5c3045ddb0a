#pragma once

#include "bpf/models/model.hpp"
#include "bpf/models/runge_kutta.hpp"

namespace bpf {

/// OU hyperparameters of a log-rate: d log r = (t1 - t2 log r) dt + t3 dW.
struct LogRateParams {
  double t1 = 0.0;
  double t2 = 1.0;
  double t3 = 0.1;
};

struct SirParams {
  LogRateParams beta{-6.1, 1.0, 0.2};
  LogRateParams nu{-0.8, 1.0, 0.2};
  double population = 763.0;
  double initial_infected = 3.0;

  void validate() const;
};

/// State layout: S, I, R, log beta, log nu.
enum SirIndex : std::size_t { kS = 0, kI = 1, kR = 2, kLogBeta = 3, kLogNu = 4 };

/// Right-hand side of the SIR ODE with a discrete-time noise innovation held
/// fixed over a substep of length dt.
void sir_rhs(std::span<const double> state, double dw_beta, double dw_nu, double dt, const SirParams& p,
             std::span<double> deriv);

/// Default integrator tolerances; the error mean runs over S, I and R.
RkControl sir_default_control();

/// Stochastic SIR: each propagate call draws (dW_beta, dW_nu) ~ N(0, dt) once
/// and integrates the ODE adaptively across the substep.
class SirModel final : public Model {
 public:
  explicit SirModel(SirParams p, RkControl ctrl = sir_default_control());

  std::size_t dim() const override { return 5; }
  void propagate(std::span<double> x, double t, double dt, Rng& rng) const override;
  void sample_initial(std::span<double> x, Rng& rng) const override;

  const SirParams& params() const { return p_; }
  const RkControl& control() const { return ctrl_; }

 private:
  SirParams p_;
  RkControl ctrl_;
};

}  // namespace bpf
