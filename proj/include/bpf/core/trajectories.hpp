#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "bpf/core/particle_system.hpp"
#include "bpf/core/schedule.hpp"

namespace bpf {

/// N ancestral paths through the recorded bridge times, with normalised
/// final weights.
struct Trajectories {
  std::vector<double> times;
  std::size_t dim = 0;
  std::size_t rows = 0;
  std::vector<double> states;  // path-major: [path][row][component]
  std::vector<double> weights;

  std::size_t count() const { return weights.size(); }
  std::span<const double> path(std::size_t i) const { return {states.data() + i * rows * dim, rows * dim}; }
  double at(std::size_t i, std::size_t row, std::size_t comp = 0) const {
    return states[(i * rows + row) * dim + comp];
  }
};

/// Follows b_last = i, b_r = a_{r+1}^{b_{r+1}} back through the ancestry.
/// Requires a run with record_ancestry set.
Trajectories extract_trajectories(const AncestryMatrix& ancestry, const ParticleSystem& final,
                                  const Schedule& schedule);

/// sum_i w^i f(path_i) / sum_i w^i. f receives one path as rows x dim values.
/// Throws std::runtime_error when every weight is zero.
double weighted_expectation(const std::function<double(std::span<const double>)>& f, const Trajectories& paths);

}  // namespace bpf
