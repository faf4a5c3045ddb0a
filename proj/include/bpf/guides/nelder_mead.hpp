#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace bpf {

struct NelderMeadOptions {
  double initial_step = 0.5;  // simplex edge along each axis
  double x_tol = 1e-8;        // max distance of any vertex from the best
  double f_tol = 1e-10;       // max value spread across the simplex
  std::size_t max_iterations = 10000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;  // false: iteration cap hit, x is the best so far
};

/// Minimises f by simplex descent (reflection 1, expansion 2, contraction
/// 1/2, shrink 1/2). Non-finite objective values count as +inf.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f, std::vector<double> x0,
                             const NelderMeadOptions& opts = {});

}  // namespace bpf
