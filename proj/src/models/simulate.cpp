#include <stdexcept>

#include "bpf/models/model.hpp"

namespace bpf {

std::vector<std::vector<double>> simulate_path(const Model& model, std::span<const double> x0,
                                               std::span<const double> times, Rng& rng) {
  if (x0.size() != model.dim()) throw std::invalid_argument("simulate_path: x0 has the wrong dimension");
  if (times.empty()) return {};
  std::vector<std::vector<double>> out;
  out.reserve(times.size());
  std::vector<double> x(x0.begin(), x0.end());
  out.push_back(x);
  for (std::size_t j = 1; j < times.size(); ++j) {
    if (!(times[j] > times[j - 1])) throw std::invalid_argument("simulate_path: times must increase");
    model.propagate(x, times[j - 1], times[j] - times[j - 1], rng);
    out.push_back(x);
  }
  return out;
}

}  // namespace bpf
