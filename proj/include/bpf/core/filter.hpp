#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "bpf/core/particle_system.hpp"
#include "bpf/core/resample.hpp"
#include "bpf/core/schedule.hpp"
#include "bpf/guides/guide.hpp"
#include "bpf/models/model.hpp"
#include "bpf/random.hpp"

namespace bpf {

/// terminal_state: x_0 fixed and each observation is the full state, scored
/// through the transition density from the last bridge time before it.
/// observed: x_0 drawn from the model prior, observations scored through an
/// ObservationModel.
enum class TargetMode { terminal_state, observed };

TargetMode parse_target_mode(std::string_view name);
std::string_view to_string(TargetMode mode);

struct FilterConfig {
  std::size_t particles = 256;
  double rel_threshold = 0.5;
  ResamplerKind resampler = ResamplerKind::systematic;
  TargetMode mode = TargetMode::terminal_state;
  std::vector<double> x0;                         // terminal_state only
  const ObservationModel* observation = nullptr;  // observed only
  std::uint64_t seed = 0;
  bool record_ancestry = false;
};

struct FilterOutput {
  double log_z = 0.0;
  ParticleSystem final;
  AncestryMatrix ancestry;
  std::vector<std::size_t> resample_events;  // schedule indices of the resampled particles
  std::vector<double> block_log_z;
  bool degenerate = false;
  double elapsed = 0.0;     // wall-clock seconds
  std::uint64_t work = 0;   // particle propagations + weight evaluations
};

/// Everything a block needs besides the particles themselves.
struct BlockContext {
  const Model& model;
  const Guide& guide;
  const Schedule& schedule;
  TargetMode mode;
  const ObservationModel* observation;
  double rel_threshold;
  ResamplerKind resampler;
};

struct BlockResult {
  double log_increment = 0.0;
  std::vector<std::size_t> resample_events;
  bool degenerate = false;
  std::uint64_t work = 0;
};

/// Particle streams: slot i always draws from stream i, selection from its
/// own stream, so results do not depend on evaluation order.
struct ParticleStreams {
  std::vector<Rng> particle;
  Rng selection;

  ParticleStreams(std::uint64_t seed, std::size_t n);
};

/// Runs the bridge steps in (start_idx, end_idx] of the schedule: select when
/// the ESS trigger fires, propagate over the fine grid, then reweight with
/// u = log g(x_k) - prev_guide_log. The last step uses the true terminal
/// density (transition density in terminal_state mode, observation density in
/// observed mode). Returns log prod_k sum_i W_{k-1}^i exp(u_k^i).
BlockResult bridge_block(const BlockContext& ctx, std::size_t start_idx, std::size_t end_idx,
                         const Observation& target, ParticleSystem& ps, ParticleStreams& streams,
                         AncestryMatrix* ancestry);

/// Bridge particle filter over a series of observations aligned with the
/// schedule's observation flags. A degenerate block yields log_z = -inf and a
/// valid output.
FilterOutput run_bridge_filter(const Model& model, const Guide& guide, const Schedule& schedule,
                               const Series& observations, const FilterConfig& config);

/// Bootstrap particle filter: unit guide, selection considered only at
/// observation times. Uses the same fine grid and particle streams as the
/// bridge filter.
FilterOutput run_bootstrap_filter(const Model& model, const Schedule& schedule, const Series& observations,
                                  const FilterConfig& config);

}  // namespace bpf
