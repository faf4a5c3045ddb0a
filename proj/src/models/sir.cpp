#include "bpf/models/sir.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bpf {

void SirParams::validate() const {
  if (!(beta.t2 > 0.0 && nu.t2 > 0.0)) throw std::invalid_argument("SIR: theta_2 must be positive");
  if (!(beta.t3 > 0.0 && nu.t3 > 0.0)) throw std::invalid_argument("SIR: theta_3 must be positive");
  if (!(population > 0.0)) throw std::invalid_argument("SIR: population must be positive");
  if (!(initial_infected >= 0.0 && initial_infected <= population))
    throw std::invalid_argument("SIR: initial_infected must lie in [0, population]");
}

void sir_rhs(std::span<const double> state, double dw_beta, double dw_nu, double dt, const SirParams& p,
             std::span<double> deriv) {
  const double s = state[kS];
  const double i = state[kI];
  const double beta = std::exp(state[kLogBeta]);
  const double nu = std::exp(state[kLogNu]);
  const double infection = beta * s * i;
  const double recovery = nu * i;
  deriv[kS] = -infection;
  deriv[kI] = infection - recovery;
  deriv[kR] = recovery;
  deriv[kLogBeta] = p.beta.t1 - p.beta.t2 * state[kLogBeta] + p.beta.t3 * dw_beta / dt;
  deriv[kLogNu] = p.nu.t1 - p.nu.t2 * state[kLogNu] + p.nu.t3 * dw_nu / dt;
}

RkControl sir_default_control() {
  RkControl c;
  c.abs_tol = 1e-2;
  c.rel_tol = 1e-5;
  c.h_init = 1e-2;
  c.h_min = 1e-9;
  c.h_max = 1.0;
  c.error_components = {kS, kI, kR};
  return c;
}

SirModel::SirModel(SirParams p, RkControl ctrl) : p_(p), ctrl_(std::move(ctrl)) {
  p_.validate();
  ctrl_.validate();
}

void SirModel::propagate(std::span<double> x, double t, double dt, Rng& rng) const {
  struct Noise {
    const SirParams* p;
    double dw_beta;
    double dw_nu;
    double dt;
  };
  const double sd = std::sqrt(dt);
  const Noise noise{&p_, sd * rng.normal(), sd * rng.normal(), dt};
  const Noise* np = &noise;
  const RhsFn rhs = [np](double, std::span<const double> s, std::span<double> d) {
    sir_rhs(s, np->dw_beta, np->dw_nu, np->dt, *np->p, d);
  };
  thread_local RkWorkspace ws(5);
  double h = std::min(ctrl_.h_init, dt);
  integrate_adaptive(rhs, x, t, t + dt, ctrl_, ws, h);
}

void SirModel::sample_initial(std::span<double> x, Rng& rng) const {
  x[kS] = p_.population - p_.initial_infected;
  x[kI] = p_.initial_infected;
  x[kR] = 0.0;
  auto stationary = [&rng](const LogRateParams& r) {
    return rng.normal(r.t1 / r.t2, r.t3 / std::sqrt(2.0 * r.t2));
  };
  x[kLogBeta] = stationary(p_.beta);
  x[kLogNu] = stationary(p_.nu);
}

}  // namespace bpf
