#include "bpf/models/pd.hpp"

#include <cmath>

#include "bpf/models/euler_maruyama.hpp"

namespace bpf {

void PdModel::propagate(std::span<double> x, double, double dt, Rng& rng) const {
  x[0] = euler_maruyama_step(pd_drift(x[0], p_), 1.0, x[0], dt, rng);
}

std::optional<double> PdModel::transition_logpdf(std::span<const double> to, std::span<const double> from, double,
                                                 double dt) const {
  return euler_maruyama_logpdf(to[0], from[0], dt, pd_drift(from[0], p_), 1.0);
}

}  // namespace bpf
