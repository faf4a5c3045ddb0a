#include "bpf/core/log_math.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bpf {

double log_sum_exp(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("log_sum_exp: empty input");
  const double mx = *std::max_element(v.begin(), v.end());
  if (mx == kNegInf) return kNegInf;
  if (!std::isfinite(mx)) return mx;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - mx);
  return mx + std::log(acc);
}

double ess_weights(std::span<const double> logw) {
  if (logw.empty()) throw std::invalid_argument("ess_weights: empty input");
  const double mx = *std::max_element(logw.begin(), logw.end());
  if (mx == kNegInf) return 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  for (double x : logw) {
    const double w = std::exp(x - mx);
    s1 += w;
    s2 += w * w;
  }
  return s1 * s1 / s2;
}

std::vector<double> normalized_log_weights(std::span<const double> logw) {
  const double lse = log_sum_exp(logw);
  std::vector<double> out(logw.begin(), logw.end());
  if (lse == kNegInf) return out;
  for (double& x : out) x -= lse;
  return out;
}

bool resample_trigger(std::span<const double> logw, double rel_threshold) {
  if (rel_threshold <= 0.0) return false;
  return ess_weights(logw) / static_cast<double>(logw.size()) < rel_threshold;
}

}  // namespace bpf
