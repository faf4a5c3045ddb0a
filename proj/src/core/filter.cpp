#include "bpf/core/filter.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "bpf/core/log_math.hpp"

namespace bpf {

namespace {

constexpr std::uint64_t kSelectionStream = 0xfffffffffffffff1ULL;

void check_target(const BlockContext& ctx, const Observation& target) {
  if (ctx.mode == TargetMode::terminal_state) {
    if (target.values.size() != ctx.model.dim())
      throw std::invalid_argument("terminal-state target must hold the full state");
    for (double v : target.values)
      if (is_missing(v)) throw std::invalid_argument("terminal-state target must be fully observed");
  } else if (ctx.observation == nullptr) {
    throw std::invalid_argument("observed mode requires an observation model");
  }
}

double terminal_log_density(const BlockContext& ctx, std::span<const double> x, double t, const Observation& target) {
  if (ctx.mode == TargetMode::observed) return ctx.observation->logpdf(target.values, x);
  const auto lp = ctx.model.transition_logpdf(target.values, x, t, target.time - t);
  if (!lp) throw std::logic_error("terminal-state mode requires a model with a transition density");
  return *lp;
}

}  // namespace

TargetMode parse_target_mode(std::string_view name) {
  if (name == "terminal") return TargetMode::terminal_state;
  if (name == "observed") return TargetMode::observed;
  throw std::invalid_argument("unknown target mode '" + std::string(name) + "'");
}

std::string_view to_string(TargetMode mode) {
  return mode == TargetMode::terminal_state ? "terminal" : "observed";
}

ParticleStreams::ParticleStreams(std::uint64_t seed, std::size_t n) : selection(seed, kSelectionStream) {
  particle.reserve(n);
  for (std::size_t i = 0; i < n; ++i) particle.emplace_back(seed, i);
}

BlockResult bridge_block(const BlockContext& ctx, std::size_t start_idx, std::size_t end_idx,
                         const Observation& target, ParticleSystem& ps, ParticleStreams& streams,
                         AncestryMatrix* ancestry) {
  const auto& sched = ctx.schedule;
  if (end_idx >= sched.size() || start_idx > end_idx) throw std::out_of_range("bridge_block: bad block");
  check_target(ctx, target);

  std::vector<std::size_t> steps;
  for (std::size_t k = start_idx + 1; k <= end_idx; ++k)
    if (sched.bridge[k]) steps.push_back(k);
  if (ctx.mode == TargetMode::terminal_state) {
    // The terminal state is pinned, never simulated.
    if (!steps.empty() && steps.back() == end_idx) steps.pop_back();
  }

  const std::size_t n = ps.size();
  BlockResult res;
  std::fill(ps.prev_guide_log.begin(), ps.prev_guide_log.end(), 0.0);

  std::vector<double> log_prev(n);
  std::vector<double> u(n);
  std::vector<std::size_t> identity(n);
  std::iota(identity.begin(), identity.end(), std::size_t{0});

  auto weigh = [&](std::size_t k, bool final) {
    const double t = sched.times[k];
    for (std::size_t i = 0; i < n; ++i) {
      if (log_prev[i] == kNegInf) {
        u[i] = kNegInf;
        continue;
      }
      const auto x = ps.state(i);
      const double g = final ? terminal_log_density(ctx, x, t, target) : ctx.guide.log_value(x, t, target);
      double inc = g - ps.prev_guide_log[i];
      if (std::isnan(inc) || g == kNegInf) inc = kNegInf;
      u[i] = inc;
      ps.prev_guide_log[i] = g;
    }
    for (std::size_t i = 0; i < n; ++i) ps.logw[i] = (u[i] == kNegInf) ? kNegInf : log_prev[i] + u[i];
    res.work += n;
    const double inc = log_sum_exp(ps.logw);
    res.log_increment += inc;
    if (inc == kNegInf || std::isnan(inc)) {
      res.log_increment = kNegInf;
      res.degenerate = true;
    }
  };

  auto select = [&](std::size_t k) {
    if (resample_trigger(ps.logw, ctx.rel_threshold)) {
      const auto parents = resample(ctx.resampler, ps.logw, n, streams.selection);
      ps.apply_selection(parents);
      std::fill(log_prev.begin(), log_prev.end(), -std::log(static_cast<double>(n)));
      res.resample_events.push_back(k);
      res.work += n;
    } else {
      ps.parents = identity;
      log_prev = normalized_log_weights(ps.logw);
    }
  };

  if (steps.empty()) {
    // Block shorter than one simulation step: score the start state directly.
    if (ctx.mode == TargetMode::observed && end_idx != start_idx)
      throw std::invalid_argument("bridge_block: observed block without bridge times");
    select(start_idx);
    weigh(start_idx, true);
    ps.k = start_idx;
    return res;
  }

  std::size_t cur = start_idx;
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const std::size_t k = steps[s];
    const bool final = s + 1 == steps.size();
    select(cur);
    for (std::size_t i = 0; i < n; ++i) {
      if (log_prev[i] == kNegInf) continue;
      auto x = ps.state(i);
      for (std::size_t j = cur; j < k; ++j)
        ctx.model.propagate(x, sched.times[j], sched.times[j + 1] - sched.times[j], streams.particle[i]);
    }
    res.work += n * (k - cur);
    weigh(k, final);
    ps.k = k;
    if (ancestry) ancestry->record(k, ps.parents, ps.states);
    if (res.degenerate) return res;
    cur = k;
  }
  return res;
}

FilterOutput run_bridge_filter(const Model& model, const Guide& guide, const Schedule& schedule,
                               const Series& observations, const FilterConfig& config) {
  const auto t_begin = std::chrono::steady_clock::now();
  if (config.particles < 2) throw std::invalid_argument("filter: particles must be at least 2");
  if (!(config.rel_threshold >= 0.0 && config.rel_threshold <= 1.0))
    throw std::invalid_argument("filter: rel_threshold must lie in [0, 1]");
  schedule.validate();

  const auto obs_idx = schedule.obs_indices();
  if (obs_idx.size() != observations.size())
    throw std::invalid_argument("filter: " + std::to_string(observations.size()) + " observations but " +
                                std::to_string(obs_idx.size()) + " observation times in the schedule");
  for (std::size_t j = 0; j < obs_idx.size(); ++j) {
    const double ts = schedule.times[obs_idx[j]];
    if (std::abs(ts - observations[j].time) > 1e-9 * std::max(1.0, std::abs(ts)))
      throw std::invalid_argument("filter: observation " + std::to_string(j) + " not aligned with schedule");
  }

  const std::size_t n = config.particles;
  const std::size_t d = model.dim();
  BlockContext ctx{model, guide, schedule, config.mode, config.observation, config.rel_threshold, config.resampler};
  ParticleStreams streams(config.seed, n);

  FilterOutput out;
  out.final = ParticleSystem(n, d);
  auto& ps = out.final;
  if (config.mode == TargetMode::terminal_state) {
    if (config.x0.size() != d) throw std::invalid_argument("filter: x0 must have the model dimension");
    for (std::size_t i = 0; i < n; ++i) std::copy(config.x0.begin(), config.x0.end(), ps.state(i).begin());
  } else {
    if (config.observation == nullptr) throw std::invalid_argument("filter: observed mode needs an observation model");
    for (std::size_t i = 0; i < n; ++i) model.sample_initial(ps.state(i), streams.particle[i]);
  }
  out.ancestry.dim = d;
  AncestryMatrix* anc = config.record_ancestry ? &out.ancestry : nullptr;
  if (anc) anc->record(0, ps.parents, ps.states);

  std::size_t start = 0;
  for (std::size_t j = 0; j < obs_idx.size(); ++j) {
    const std::size_t end = obs_idx[j];
    if (config.mode == TargetMode::terminal_state && j > 0) {
      // Every particle sits on the previous terminal state, so the weights
      // carry no information: reset them (equivalent to any selection).
      // Re-pinning also covers an observation at t0.
      for (std::size_t i = 0; i < n; ++i)
        std::copy(observations[j - 1].values.begin(), observations[j - 1].values.end(), ps.state(i).begin());
      std::fill(ps.logw.begin(), ps.logw.end(), 0.0);
    }
    if (config.mode == TargetMode::terminal_state && end == start) {
      start = end;  // observation of the fixed initial state
      continue;
    }
    auto block = bridge_block(ctx, start, end, observations[j], ps, streams, anc);
    out.block_log_z.push_back(block.log_increment);
    out.resample_events.insert(out.resample_events.end(), block.resample_events.begin(), block.resample_events.end());
    out.work += block.work;
    if (block.degenerate) {
      out.log_z = kNegInf;
      out.degenerate = true;
      break;
    }
    out.log_z += block.log_increment;
    if (config.mode == TargetMode::terminal_state) {
      // Close the block on the pinned state so lineages end at x_n.
      for (std::size_t i = 0; i < n; ++i)
        std::copy(observations[j].values.begin(), observations[j].values.end(), ps.state(i).begin());
      std::iota(ps.parents.begin(), ps.parents.end(), std::size_t{0});
      ps.k = end;
      if (anc) anc->record(end, ps.parents, ps.states);
    }
    start = end;
  }
  out.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  return out;
}

FilterOutput run_bootstrap_filter(const Model& model, const Schedule& schedule, const Series& observations,
                                  const FilterConfig& config) {
  const auto restricted =
      restrict_bridges_to_observations(schedule, config.mode == TargetMode::terminal_state);
  const ConstantGuide unit;
  return run_bridge_filter(model, unit, restricted, observations, config);
}

}  // namespace bpf
