#pragma once

#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace bpf {

/// N particles at one schedule index. States are stored row-major, one row
/// of `dim` values per particle.
struct ParticleSystem {
  std::size_t dim = 0;
  std::vector<double> states;
  std::vector<double> logw;
  std::vector<std::size_t> parents;
  // log q or log r at the particle's last bridge time in the current block.
  std::vector<double> prev_guide_log;
  std::size_t k = 0;

  ParticleSystem() = default;
  ParticleSystem(std::size_t n, std::size_t d)
      : dim(d), states(n * d, 0.0), logw(n, 0.0), parents(n), prev_guide_log(n, 0.0) {
    std::iota(parents.begin(), parents.end(), std::size_t{0});
  }

  std::size_t size() const { return logw.size(); }
  std::span<double> state(std::size_t i) { return {states.data() + i * dim, dim}; }
  std::span<const double> state(std::size_t i) const { return {states.data() + i * dim, dim}; }

  /// Replace particles by their selected ancestors.
  void apply_selection(std::span<const std::size_t> selected) {
    std::vector<double> next(states.size());
    std::vector<double> guide(size());
    for (std::size_t i = 0; i < size(); ++i) {
      const auto src = state(selected[i]);
      std::copy(src.begin(), src.end(), next.begin() + static_cast<std::ptrdiff_t>(i * dim));
      guide[i] = prev_guide_log[selected[i]];
    }
    states.swap(next);
    prev_guide_log.swap(guide);
    parents.assign(selected.begin(), selected.end());
  }
};

/// Parent indices and (optionally) particle states at every bridge step of a
/// run. Row 0 is the initial population; parents[r][i] is the index at row
/// r - 1 that slot i at row r descends from.
struct AncestryMatrix {
  std::size_t dim = 0;
  std::vector<std::size_t> time_index;
  std::vector<std::vector<std::size_t>> parents;
  std::vector<std::vector<double>> states;

  std::size_t rows() const { return parents.size(); }
  bool empty() const { return parents.empty(); }

  void record(std::size_t index, std::span<const std::size_t> par, std::span<const double> st) {
    time_index.push_back(index);
    parents.emplace_back(par.begin(), par.end());
    states.emplace_back(st.begin(), st.end());
  }

  /// b_r for r = 0..rows-1, starting from slot i in the last row.
  std::vector<std::size_t> lineage(std::size_t i) const {
    std::vector<std::size_t> b(rows());
    if (b.empty()) return b;
    b.back() = i;
    for (std::size_t r = rows() - 1; r > 0; --r) b[r - 1] = parents[r][b[r]];
    return b;
  }
};

}  // namespace bpf
