#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bpf/pmmh/prior.hpp"
#include "bpf/random.hpp"

namespace bpf {

/// Scale on which a parameter takes its random-walk step.
enum class Transform { identity, log, logit };

Transform parse_transform(std::string_view name);
std::string_view to_string(Transform t);

/// Gaussian random walk with covariance `cov` on the transformed scale.
/// logit maps (lower, upper) to the real line; log maps (lower, inf).
struct ProposalSpec {
  Eigen::MatrixXd cov;
  std::vector<Transform> transforms;  // empty: identity everywhere
  std::vector<double> lower;          // per parameter, used by log and logit
  std::vector<double> upper;          // used by logit

  std::size_t dim() const { return static_cast<std::size_t>(cov.rows()); }
  /// Symmetric positive semi-definite (zero allowed), finite, matching sizes.
  void validate() const;

  static ProposalSpec diagonal(std::span<const double> sd);
};

/// Transforms of each parameter chosen from its prior support: logit for
/// bounded intervals, log for half-lines, identity otherwise.
void set_transforms_from_priors(ProposalSpec& spec, std::span<const ParamPrior> priors);

std::vector<double> to_unconstrained(std::span<const double> theta, const ProposalSpec& spec);
std::vector<double> from_unconstrained(std::span<const double> phi, const ProposalSpec& spec);

/// log |d theta / d phi| at theta; -inf when theta is on or outside a
/// transformed boundary.
double log_jacobian(std::span<const double> theta, const ProposalSpec& spec);

/// theta' = T^{-1}(T(theta) + L xi) with L L^T = cov, xi ~ N(0, I).
std::vector<double> propose(std::span<const double> theta, const ProposalSpec& spec, Rng& rng);

/// log density of the random-walk step phi -> phi' (symmetric in its arguments).
double proposal_logpdf(std::span<const double> from, std::span<const double> to, const ProposalSpec& spec);

/// 2.38^2 / d times the sample covariance of pilot draws (rows), computed on
/// the transformed scale of `spec`.
Eigen::MatrixXd pilot_covariance(const std::vector<std::vector<double>>& draws, const ProposalSpec& spec);

}  // namespace bpf
