#include "bpf/pmmh/proposal.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bpf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Transform transform_of(const ProposalSpec& s, std::size_t i) {
  return s.transforms.empty() ? Transform::identity : s.transforms[i];
}

// Cholesky factor of a PSD matrix; LDLT handles the semi-definite case.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  if (ldlt.info() != Eigen::Success) throw std::invalid_argument("proposal: covariance factorisation failed");
  const Eigen::VectorXd d = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd l = ldlt.matrixL();
  l = ldlt.transpositionsP().transpose() * (l * d.asDiagonal());
  return l;
}

}  // namespace

Transform parse_transform(std::string_view name) {
  if (name == "identity") return Transform::identity;
  if (name == "log") return Transform::log;
  if (name == "logit") return Transform::logit;
  throw std::invalid_argument("unknown transform '" + std::string(name) + "'");
}

std::string_view to_string(Transform t) {
  switch (t) {
    case Transform::identity: return "identity";
    case Transform::log: return "log";
    case Transform::logit: return "logit";
  }
  return "identity";
}

void ProposalSpec::validate() const {
  const auto d = cov.rows();
  if (cov.cols() != d || d == 0) throw std::invalid_argument("proposal: covariance must be square and non-empty");
  if (!cov.allFinite()) throw std::invalid_argument("proposal: covariance must be finite");
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, cov.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("proposal: covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff()))
    throw std::invalid_argument("proposal: covariance must be positive semi-definite");
  const auto n = static_cast<std::size_t>(d);
  if (!transforms.empty() && transforms.size() != n) throw std::invalid_argument("proposal: transform count");
  for (std::size_t i = 0; i < transforms.size(); ++i) {
    if (transforms[i] == Transform::identity) continue;
    if (lower.size() != n || !std::isfinite(lower[i])) throw std::invalid_argument("proposal: transform needs lower");
    if (transforms[i] == Transform::logit && (upper.size() != n || !(upper[i] > lower[i]) || !std::isfinite(upper[i])))
      throw std::invalid_argument("proposal: logit needs finite upper > lower");
  }
}

ProposalSpec ProposalSpec::diagonal(std::span<const double> sd) {
  ProposalSpec s;
  s.cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sd.size()), static_cast<Eigen::Index>(sd.size()));
  for (std::size_t i = 0; i < sd.size(); ++i) s.cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = sd[i] * sd[i];
  return s;
}

void set_transforms_from_priors(ProposalSpec& spec, std::span<const ParamPrior> priors) {
  const auto n = priors.size();
  spec.transforms.assign(n, Transform::identity);
  spec.lower.assign(n, 0.0);
  spec.upper.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = priors[i].lower();
    const double hi = priors[i].upper();
    spec.lower[i] = std::isfinite(lo) ? lo : 0.0;
    spec.upper[i] = std::isfinite(hi) ? hi : 0.0;
    if (std::isfinite(lo) && std::isfinite(hi))
      spec.transforms[i] = Transform::logit;
    else if (std::isfinite(lo))
      spec.transforms[i] = Transform::log;
  }
}

std::vector<double> to_unconstrained(std::span<const double> theta, const ProposalSpec& spec) {
  std::vector<double> phi(theta.begin(), theta.end());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    switch (transform_of(spec, i)) {
      case Transform::identity: break;
      case Transform::log: phi[i] = std::log(theta[i] - spec.lower[i]); break;
      case Transform::logit: {
        const double u = (theta[i] - spec.lower[i]) / (spec.upper[i] - spec.lower[i]);
        phi[i] = std::log(u) - std::log1p(-u);
        break;
      }
    }
  }
  return phi;
}

std::vector<double> from_unconstrained(std::span<const double> phi, const ProposalSpec& spec) {
  std::vector<double> theta(phi.begin(), phi.end());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    switch (transform_of(spec, i)) {
      case Transform::identity: break;
      case Transform::log: theta[i] = spec.lower[i] + std::exp(phi[i]); break;
      case Transform::logit: {
        const double u = 1.0 / (1.0 + std::exp(-phi[i]));
        theta[i] = spec.lower[i] + (spec.upper[i] - spec.lower[i]) * u;
        break;
      }
    }
  }
  return theta;
}

double log_jacobian(std::span<const double> theta, const ProposalSpec& spec) {
  double acc = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    switch (transform_of(spec, i)) {
      case Transform::identity: break;
      case Transform::log: {
        const double v = theta[i] - spec.lower[i];
        if (!(v > 0.0)) return kNegInf;
        acc += std::log(v);
        break;
      }
      case Transform::logit: {
        const double lo = theta[i] - spec.lower[i];
        const double hi = spec.upper[i] - theta[i];
        if (!(lo > 0.0 && hi > 0.0)) return kNegInf;
        acc += std::log(lo) + std::log(hi) - std::log(spec.upper[i] - spec.lower[i]);
        break;
      }
    }
  }
  return acc;
}

std::vector<double> propose(std::span<const double> theta, const ProposalSpec& spec, Rng& rng) {
  const auto d = spec.dim();
  if (theta.size() != d) throw std::invalid_argument("propose: dimension mismatch");
  const Eigen::MatrixXd l = psd_factor(spec.cov);
  Eigen::VectorXd xi(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = rng.normal();
  const Eigen::VectorXd step = l * xi;
  auto phi = to_unconstrained(theta, spec);
  for (std::size_t i = 0; i < d; ++i) phi[i] += step(static_cast<Eigen::Index>(i));
  return from_unconstrained(phi, spec);
}

double proposal_logpdf(std::span<const double> from, std::span<const double> to, const ProposalSpec& spec) {
  const auto a = to_unconstrained(from, spec);
  const auto b = to_unconstrained(to, spec);
  const auto d = static_cast<Eigen::Index>(spec.dim());
  Eigen::VectorXd diff(d);
  for (Eigen::Index i = 0; i < d; ++i) diff(i) = b[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)];
  Eigen::LLT<Eigen::MatrixXd> llt(spec.cov);
  if (llt.info() != Eigen::Success) throw std::domain_error("proposal_logpdf: singular covariance");
  const Eigen::VectorXd z = llt.matrixL().solve(diff);
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * (z.squaredNorm() + logdet + static_cast<double>(d) * std::log(2.0 * std::numbers::pi));
}

Eigen::MatrixXd pilot_covariance(const std::vector<std::vector<double>>& draws, const ProposalSpec& spec) {
  if (draws.size() < 2) throw std::invalid_argument("pilot_covariance: need at least two draws");
  const auto d = static_cast<Eigen::Index>(draws.front().size());
  Eigen::MatrixXd x(static_cast<Eigen::Index>(draws.size()), d);
  for (std::size_t r = 0; r < draws.size(); ++r) {
    if (static_cast<Eigen::Index>(draws[r].size()) != d) throw std::invalid_argument("pilot_covariance: ragged draws");
    const auto phi = to_unconstrained(draws[r], spec);
    for (Eigen::Index c = 0; c < d; ++c) x(static_cast<Eigen::Index>(r), c) = phi[static_cast<std::size_t>(c)];
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centred = x.rowwise() - mean;
  const Eigen::MatrixXd cov = centred.transpose() * centred / static_cast<double>(x.rows() - 1);
  return cov * (2.38 * 2.38 / static_cast<double>(d));
}

}  // namespace bpf
