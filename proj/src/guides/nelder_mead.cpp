#include "bpf/guides/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bpf {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> x0,
                             const NelderMeadOptions& opts) {
  const std::size_t n = x0.size();
  if (n == 0) throw std::invalid_argument("nelder_mead: empty starting point");
  auto eval = [&f](const std::vector<double>& x) {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += opts.initial_step;
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);
  if (!std::isfinite(fv[0])) throw std::invalid_argument("nelder_mead: objective not finite at x0");

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  NelderMeadResult res;
  auto point = [&](double coef, const std::vector<double>& worst, std::vector<double>& out) {
    for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + coef * (worst[j] - centroid[j]);
  };

  for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    {
      std::vector<std::vector<double>> s2(n + 1);
      std::vector<double> f2(n + 1);
      for (std::size_t i = 0; i <= n; ++i) {
        s2[i] = std::move(simplex[order[i]]);
        f2[i] = fv[order[i]];
      }
      simplex.swap(s2);
      fv.swap(f2);
    }

    double diam = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j) diam = std::max(diam, std::abs(simplex[i][j] - simplex[0][j]));
    const double spread = fv[n] - fv[0];
    if (diam <= opts.x_tol && spread <= opts.f_tol) {
      res.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);

    point(-1.0, simplex[n], trial);
    const double fr = eval(trial);
    if (fr < fv[0]) {
      point(-2.0, simplex[n], trial2);
      const double fe = eval(trial2);
      if (fe < fr) {
        simplex[n] = trial2;
        fv[n] = fe;
      } else {
        simplex[n] = trial;
        fv[n] = fr;
      }
      continue;
    }
    if (fr < fv[n - 1]) {
      simplex[n] = trial;
      fv[n] = fr;
      continue;
    }
    if (fr < fv[n]) {
      point(-0.5, simplex[n], trial2);  // outside contraction
      const double fc = eval(trial2);
      if (fc <= fr) {
        simplex[n] = trial2;
        fv[n] = fc;
        continue;
      }
    } else {
      point(0.5, simplex[n], trial2);  // inside contraction
      const double fc = eval(trial2);
      if (fc < fv[n]) {
        simplex[n] = trial2;
        fv[n] = fc;
        continue;
      }
    }
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
      fv[i] = eval(simplex[i]);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  res.x = simplex[best];
  res.value = fv[best];
  return res;
}

}  // namespace bpf
