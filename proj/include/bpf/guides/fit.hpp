#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bpf/guides/gp.hpp"
#include "bpf/guides/pd_guide.hpp"
#include "bpf/models/pd.hpp"
#include "bpf/random.hpp"

namespace bpf {

/// Relative nugget added to the covariance diagonal (times alpha).
inline constexpr double kGpNugget = 1e-8;

/// log N(x; 0, K + nugget I) with K_ij = sq_exp_cov(t_i - t_j, alpha, beta).
/// Throws std::runtime_error if the matrix is not positive definite.
double gp_marginal_loglik(std::span<const double> times, std::span<const double> values, double alpha, double beta,
                          double nugget);

struct GpFit {
  GpGuideParams params;  // original scale, mean offset included
  double loglik = 0.0;   // at the optimum, on the standardised series
  bool degenerate = false;
  bool converged = true;
};

/// Maximum-likelihood (alpha, beta) for a zero-mean squared-exponential GP.
/// The series is centred and scaled to unit variance, fitted in
/// (log alpha, log beta) by Nelder-Mead, then mapped back. Missing (NaN)
/// values are dropped; at least three points are required.
GpFit fit_gp_guide(std::span<const double> times, std::span<const double> values);

/// One (gap, x_k, x_n) triple for fitting the periodic-drift guide.
struct PdPair {
  double gap;
  double from;
  double to;
};

/// Simulates `paths` paths of the periodic-drift model from x0 over
/// [0, horizon] and pools (x(t), x(t + lag)) pairs for every lag in `lags`,
/// starting at every multiple of `stride` (stride = horizon uses t = 0 only).
std::vector<PdPair> simulate_pd_pairs(const PdModel& model, double x0, std::size_t paths, double horizon,
                                      double sim_step, std::span<const double> lags, double stride, Rng& rng);

struct PdFit {
  PdGuideParams params;
  double loglik = 0.0;
  bool converged = true;
};

/// Maximises the pooled untempered log q over (log epsilon, log sigma2). The
/// returned params carry `power` unchanged.
PdFit fit_pd_guide(std::span<const PdPair> pairs, double power = 0.25);

}  // namespace bpf
