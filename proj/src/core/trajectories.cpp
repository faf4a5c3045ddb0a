#include "bpf/core/trajectories.hpp"

#include <cmath>
#include <stdexcept>

#include "bpf/core/log_math.hpp"

namespace bpf {

Trajectories extract_trajectories(const AncestryMatrix& ancestry, const ParticleSystem& final,
                                  const Schedule& schedule) {
  if (ancestry.empty()) throw std::invalid_argument("extract_trajectories: ancestry was not recorded");
  Trajectories out;
  out.dim = ancestry.dim;
  out.rows = ancestry.rows();
  for (std::size_t idx : ancestry.time_index) out.times.push_back(schedule.times[idx]);
  const std::size_t n = final.size();
  out.states.resize(n * out.rows * out.dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto b = ancestry.lineage(i);
    for (std::size_t r = 0; r < out.rows; ++r)
      for (std::size_t c = 0; c < out.dim; ++c)
        out.states[(i * out.rows + r) * out.dim + c] = ancestry.states[r][b[r] * out.dim + c];
  }
  const auto lw = normalized_log_weights(final.logw);
  out.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.weights[i] = std::exp(lw[i]);
  return out;
}

double weighted_expectation(const std::function<double(std::span<const double>)>& f, const Trajectories& paths) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < paths.count(); ++i) {
    const double w = paths.weights[i];
    if (w == 0.0) continue;
    num += w * f(paths.path(i));
    den += w;
  }
  if (!(den > 0.0)) throw std::runtime_error("weighted_expectation: all weights are zero");
  return num / den;
}

}  // namespace bpf
