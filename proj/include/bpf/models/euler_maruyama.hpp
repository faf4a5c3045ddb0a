#pragma once

#include <functional>

#include <Eigen/Dense>

#include "bpf/random.hpp"

namespace bpf {

// Drift a(x, t) in R^d and diffusion B(x, t) in R^{d x m} of an Ito SDE
// dX = a dt + B dW.
using DriftFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>;
using DiffusionFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&, double)>;

/// x + a dt + B sqrt(dt) xi with xi ~ N(0, I_m).
Eigen::VectorXd euler_maruyama_step(const DriftFn& drift, const DiffusionFn& diffusion, const Eigen::VectorXd& x,
                                    double t, double dt, Rng& rng);

/// Scalar form with drift and diffusion already evaluated at (x, t).
inline double euler_maruyama_step(double drift, double diffusion, double x, double dt, Rng& rng) {
  return x + drift * dt + diffusion * std::sqrt(dt) * rng.normal();
}

/// log N(to; from + a dt, B B^T dt). Throws std::domain_error when the
/// covariance is singular.
double euler_maruyama_logpdf(const Eigen::VectorXd& to, const Eigen::VectorXd& from, double t, double dt,
                             const DriftFn& drift, const DiffusionFn& diffusion);

/// Scalar form with drift and diffusion already evaluated at (from, t).
double euler_maruyama_logpdf(double to, double from, double dt, double drift, double diffusion);

}  // namespace bpf
