#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace bpf {

/// Fine time grid with bridge (weighting/resampling) and observation flags.
/// Propagation walks every grid interval; weighting happens only at
/// bridge-flagged times.
struct Schedule {
  std::vector<double> times;
  std::vector<std::uint8_t> bridge;
  std::vector<std::uint8_t> obs;
  double sim_substep = 0.0;

  std::size_t size() const { return times.size(); }
  std::vector<std::size_t> obs_indices() const;
  std::vector<std::size_t> bridge_indices() const;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

struct ScheduleSpec {
  double t0 = 0.0;
  std::vector<double> obs_times;
  double bridge_step = 0.1;
  double sim_step = 0.01;
  // Adds a bridge time one simulation step before every observation, where a
  // pinned terminal state is scored with the transition density.
  bool pre_terminal = false;
};

/// Builds the fine grid as the union of the per-block simulation grid
/// (t_start + j * sim_step), the per-block bridge grid (t_start + j *
/// bridge_step), the pre-terminal times and the observation times. A regular
/// bridge time closer than sim_step to the next mandatory time is dropped.
Schedule make_schedule(const ScheduleSpec& spec);

/// Same grid; bridge flags kept only at observation times and, when
/// keep_pre_terminal, at the last bridge time before each observation.
Schedule restrict_bridges_to_observations(const Schedule& s, bool keep_pre_terminal);

}  // namespace bpf
