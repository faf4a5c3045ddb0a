#include "bpf/models/euler_maruyama.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bpf/models/model.hpp"

namespace bpf {

Eigen::VectorXd euler_maruyama_step(const DriftFn& drift, const DiffusionFn& diffusion, const Eigen::VectorXd& x,
                                    double t, double dt, Rng& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("euler_maruyama_step: dt must be positive");
  const Eigen::MatrixXd b = diffusion(x, t);
  Eigen::VectorXd xi(b.cols());
  for (Eigen::Index j = 0; j < xi.size(); ++j) xi[j] = rng.normal();
  return x + drift(x, t) * dt + b * xi * std::sqrt(dt);
}

double euler_maruyama_logpdf(const Eigen::VectorXd& to, const Eigen::VectorXd& from, double t, double dt,
                             const DriftFn& drift, const DiffusionFn& diffusion) {
  if (!(dt > 0.0)) throw std::invalid_argument("euler_maruyama_logpdf: dt must be positive");
  const Eigen::MatrixXd b = diffusion(from, t);
  const Eigen::MatrixXd cov = b * b.transpose() * dt;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success || llt.matrixL().toDenseMatrix().diagonal().minCoeff() <= 0.0)
    throw std::domain_error("euler_maruyama_logpdf: singular diffusion covariance");
  const Eigen::VectorXd resid = to - from - drift(from, t) * dt;
  const Eigen::VectorXd z = llt.matrixL().solve(resid);
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double d = static_cast<double>(to.size());
  return -0.5 * (d * std::log(2.0 * std::numbers::pi) + logdet + z.squaredNorm());
}

double euler_maruyama_logpdf(double to, double from, double dt, double drift, double diffusion) {
  if (!(dt > 0.0)) throw std::invalid_argument("euler_maruyama_logpdf: dt must be positive");
  const double var = diffusion * diffusion * dt;
  if (!(var > 0.0)) throw std::domain_error("euler_maruyama_logpdf: singular diffusion covariance");
  return normal_logpdf(to, from + drift * dt, var);
}

}  // namespace bpf
