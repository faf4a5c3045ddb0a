#pragma once

#include <limits>
#include <span>
#include <vector>

namespace bpf {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(sum(exp(v))) with max shifting. Returns -inf when every entry is -inf.
/// Throws std::invalid_argument on empty input.
double log_sum_exp(std::span<const double> v);

/// Effective sample size (sum w)^2 / sum w^2 of log-domain weights.
/// Returns 0 when every weight is -inf (total degeneracy).
double ess_weights(std::span<const double> logw);

/// Normalised log-weights: logw - log_sum_exp(logw). All-dead input stays -inf.
std::vector<double> normalized_log_weights(std::span<const double> logw);

/// True iff ESS / N < rel_threshold. A threshold of 0 never triggers.
bool resample_trigger(std::span<const double> logw, double rel_threshold);

}  // namespace bpf
