#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bpf/core/log_math.hpp"
#include "bpf/models/model.hpp"

namespace bpf {

void Model::sample_initial(std::span<double>, Rng&) const {
  throw std::logic_error("model has no initial-state prior");
}

std::optional<double> Model::transition_logpdf(std::span<const double>, std::span<const double>, double,
                                               double) const {
  return std::nullopt;
}

double normal_logpdf(double x, double mean, double var) {
  const double d = x - mean;
  if (var <= 0.0) return d == 0.0 ? std::numeric_limits<double>::infinity() : kNegInf;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
}

GaussianObservation::GaussianObservation(std::vector<std::size_t> components, std::vector<double> variances)
    : components_(std::move(components)), variances_(std::move(variances)) {
  if (components_.size() != variances_.size())
    throw std::invalid_argument("GaussianObservation: one variance per component required");
  for (double v : variances_)
    if (!(v > 0.0)) throw std::invalid_argument("GaussianObservation: variance must be positive");
}

double GaussianObservation::logpdf(std::span<const double> y, std::span<const double> x) const {
  double acc = 0.0;
  for (std::size_t c = 0; c < components_.size(); ++c) {
    if (is_missing(y[c])) continue;
    acc += normal_logpdf(y[c], x[components_[c]], variances_[c]);
  }
  return acc;
}

std::vector<double> GaussianObservation::sample(std::span<const double> x, Rng& rng) const {
  std::vector<double> y(components_.size());
  for (std::size_t c = 0; c < components_.size(); ++c)
    y[c] = rng.normal(x[components_[c]], std::sqrt(variances_[c]));
  return y;
}

double epsilon_ball_loglik(double y, double x_component, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon_ball_loglik: eps must be positive");
  return std::abs(y - x_component) <= eps ? -std::log(2.0 * eps) : kNegInf;
}

EpsilonBallObservation::EpsilonBallObservation(std::size_t component, double eps)
    : component_(component), eps_(eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("EpsilonBallObservation: eps must be positive");
}

double EpsilonBallObservation::logpdf(std::span<const double> y, std::span<const double> x) const {
  if (is_missing(y[0])) return 0.0;
  return epsilon_ball_loglik(y[0], x[component_], eps_);
}

std::vector<double> EpsilonBallObservation::sample(std::span<const double> x, Rng& rng) const {
  return {x[component_] + eps_ * (2.0 * rng.uniform() - 1.0)};
}

}  // namespace bpf
