#include "bpf/core/resample.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bpf/core/log_math.hpp"

namespace bpf {

namespace {

// Cumulative normalised weights scaled by n, so that comparisons happen in
// units of "expected offspring".
std::vector<double> scaled_cumulative(std::span<const double> logw, std::size_t n) {
  const double lse = log_sum_exp(logw);
  if (lse == kNegInf) throw std::runtime_error("resample: all particle weights are zero");
  std::vector<double> cum(logw.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < logw.size(); ++i) {
    acc += std::exp(logw[i] - lse);
    cum[i] = acc;
  }
  const double total = cum.back();
  for (double& c : cum) c = c / total * static_cast<double>(n);
  return cum;
}

// Walks sorted points (in offspring units) through the cumulative table.
std::vector<std::size_t> select_sorted(const std::vector<double>& cum, std::span<const double> points) {
  std::vector<std::size_t> parents(points.size());
  std::size_t j = 0;
  // Last index with positive weight; rounding must never select a dead tail.
  std::size_t last = cum.size() - 1;
  while (last > 0 && cum[last] == cum[last - 1]) --last;
  for (std::size_t i = 0; i < points.size(); ++i) {
    while (j < last && points[i] >= cum[j]) ++j;
    parents[i] = j;
  }
  return parents;
}

}  // namespace

ResamplerKind parse_resampler(std::string_view name) {
  if (name == "systematic") return ResamplerKind::systematic;
  if (name == "multinomial") return ResamplerKind::multinomial;
  throw std::invalid_argument("unknown resampler '" + std::string(name) + "'");
}

std::string_view to_string(ResamplerKind kind) {
  return kind == ResamplerKind::systematic ? "systematic" : "multinomial";
}

std::vector<std::size_t> resample_multinomial(std::span<const double> logw, std::size_t n, Rng& rng) {
  const auto cum = scaled_cumulative(logw, n);
  // Sorted uniforms from normalised exponential spacings.
  std::vector<double> points(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc -= std::log(rng.uniform());
    points[i] = acc;
  }
  const double total = acc - std::log(rng.uniform());
  for (double& p : points) p = p / total * static_cast<double>(n);
  return select_sorted(cum, points);
}

std::vector<std::size_t> resample_systematic(std::span<const double> logw, std::size_t n, Rng& rng) {
  const auto cum = scaled_cumulative(logw, n);
  const double u = rng.uniform();
  std::vector<double> points(n);
  for (std::size_t i = 0; i < n; ++i) points[i] = u + static_cast<double>(i);
  return select_sorted(cum, points);
}

std::vector<std::size_t> resample(ResamplerKind kind, std::span<const double> logw, std::size_t n, Rng& rng) {
  return kind == ResamplerKind::systematic ? resample_systematic(logw, n, rng)
                                           : resample_multinomial(logw, n, rng);
}

}  // namespace bpf
