#include "bpf/core/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bpf {

namespace {

double merge_tol(double t) { return 1e-9 * std::max(1.0, std::abs(t)); }

struct Point {
  double t;
  bool bridge;
  bool obs;
};

}  // namespace

std::vector<std::size_t> Schedule::obs_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < obs.size(); ++i)
    if (obs[i]) out.push_back(i);
  return out;
}

std::vector<std::size_t> Schedule::bridge_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bridge.size(); ++i)
    if (bridge[i]) out.push_back(i);
  return out;
}

void Schedule::validate() const {
  if (times.empty()) throw std::invalid_argument("schedule: no times");
  if (bridge.size() != times.size() || obs.size() != times.size())
    throw std::invalid_argument("schedule: flag vectors must match times");
  if (!(sim_substep > 0.0)) throw std::invalid_argument("schedule: sim_substep must be positive");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("schedule: times not strictly increasing at index " + std::to_string(i));
  for (std::size_t i = 0; i < times.size(); ++i)
    if (obs[i] && !bridge[i])
      throw std::invalid_argument("schedule: observation time at index " + std::to_string(i) +
                                  " is not a bridge time");
  double last = times.front();
  double min_interval = INFINITY;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (bridge[i]) {
      min_interval = std::min(min_interval, times[i] - last);
      last = times[i];
    }
  }
  if (min_interval + merge_tol(last) < sim_substep)
    throw std::invalid_argument("schedule: sim_substep exceeds the smallest bridge interval");
}

Schedule make_schedule(const ScheduleSpec& spec) {
  if (!(spec.sim_step > 0.0)) throw std::invalid_argument("schedule: sim_step must be positive");
  if (!(spec.bridge_step > 0.0)) throw std::invalid_argument("schedule: bridge_step must be positive");
  if (spec.bridge_step + merge_tol(spec.bridge_step) < spec.sim_step)
    throw std::invalid_argument("schedule: bridge_step must not be smaller than sim_step");

  std::vector<Point> pts{{spec.t0, true, false}};
  double start = spec.t0;
  for (std::size_t j = 0; j < spec.obs_times.size(); ++j) {
    const double end = spec.obs_times[j];
    if (j == 0 && std::abs(end - start) <= merge_tol(end)) {
      pts.front().obs = true;
      continue;
    }
    if (!(end > start))
      throw std::invalid_argument("schedule: observation times must be increasing (index " + std::to_string(j) + ")");
    const double len = end - start;
    double mandatory = end;
    if (spec.pre_terminal && len - spec.sim_step > merge_tol(end)) {
      mandatory = end - spec.sim_step;
      pts.push_back({mandatory, true, false});
    }
    for (std::size_t m = 1;; ++m) {
      const double t = start + static_cast<double>(m) * spec.sim_step;
      if (t >= end - merge_tol(end)) break;
      pts.push_back({t, false, false});
    }
    for (std::size_t m = 1;; ++m) {
      const double t = start + static_cast<double>(m) * spec.bridge_step;
      if (t >= mandatory - spec.sim_step + merge_tol(end)) break;
      pts.push_back({t, true, false});
    }
    pts.push_back({end, true, true});
    start = end;
  }

  std::stable_sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.t < b.t; });
  Schedule s;
  s.sim_substep = spec.sim_step;
  for (const auto& p : pts) {
    if (!s.times.empty() && std::abs(p.t - s.times.back()) <= merge_tol(p.t)) {
      // Prefer the exact value of a flagged point over an accumulated grid value.
      if (p.bridge || p.obs) s.times.back() = p.t;
      s.bridge.back() = s.bridge.back() || p.bridge;
      s.obs.back() = s.obs.back() || p.obs;
      continue;
    }
    s.times.push_back(p.t);
    s.bridge.push_back(p.bridge);
    s.obs.push_back(p.obs);
  }
  s.validate();
  return s;
}

Schedule restrict_bridges_to_observations(const Schedule& s, bool keep_pre_terminal) {
  Schedule out = s;
  std::fill(out.bridge.begin(), out.bridge.end(), 0);
  out.bridge.front() = 1;
  std::size_t last_bridge = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s.obs[i]) {
      if (keep_pre_terminal && last_bridge > 0 && !s.obs[last_bridge]) out.bridge[last_bridge] = 1;
      out.bridge[i] = 1;
    }
    if (s.bridge[i]) last_bridge = i;
  }
  return out;
}

}  // namespace bpf
