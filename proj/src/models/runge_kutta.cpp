#include "bpf/models/runge_kutta.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bpf {

struct RkAccess {
  static std::span<double> stage(RkWorkspace& ws, std::size_t s) { return {ws.k_.data() + s * ws.dim_, ws.dim_}; }
  static std::vector<double>& tmp(RkWorkspace& ws) { return ws.tmp_; }
  static std::vector<double>& high(RkWorkspace& ws) { return ws.high_; }
  static std::vector<double>& low(RkWorkspace& ws) { return ws.low_; }
  static std::vector<double>& err(RkWorkspace& ws) { return ws.err_; }
};

void RkControl::validate() const {
  if (!(abs_tol > 0.0)) throw std::invalid_argument("RkControl: abs_tol must be positive");
  if (!(rel_tol >= 0.0)) throw std::invalid_argument("RkControl: rel_tol must be non-negative");
  if (!(h_min > 0.0 && h_min <= h_init && h_init <= h_max))
    throw std::invalid_argument("RkControl: require 0 < h_min <= h_init <= h_max");
}

const Rk43Tableau& Rk43Tableau::get() {
  static const Rk43Tableau tab = [] {
    Rk43Tableau t;
    const std::array<double, 4> sub = {970286171893.0 / 4311952581923.0, 6584761158862.0 / 12103376702013.0,
                                       2251764453980.0 / 15575788980749.0, 26877169314380.0 / 34165994151039.0};
    t.b = {1153189308089.0 / 22510343858157.0, 1772645290293.0 / 4653164025191.0,
           -1672844663538.0 / 4480602732383.0, 2114624349019.0 / 3568978502595.0,
           5198255086312.0 / 14908931495163.0};
    t.b_hat = {1016888040809.0 / 7410784769900.0, 11231460423587.0 / 58533540763752.0,
               -1563879915014.0 / 6823010717585.0, 606302364029.0 / 971179775848.0,
               1097981568119.0 / 3980877426909.0};
    for (std::size_t i = 1; i < stages; ++i) {
      for (std::size_t j = 0; j + 1 < i; ++j) t.a[i][j] = t.b[j];
      t.a[i][i - 1] = sub[i - 1];
    }
    for (std::size_t i = 0; i < stages; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < stages; ++j) s += t.a[i][j];
      t.c[i] = s;
    }
    return t;
  }();
  return tab;
}

void RkWorkspace::resize(std::size_t dim) {
  dim_ = dim;
  k_.assign(Rk43Tableau::stages * dim, 0.0);
  tmp_.assign(dim, 0.0);
  high_.assign(dim, 0.0);
  low_.assign(dim, 0.0);
  err_.assign(dim, 0.0);
}

void rk43_fixed_step(const RhsFn& rhs, std::span<const double> x, double t, double h, std::span<double> high,
                     std::span<double> low, RkWorkspace& ws) {
  const auto& tab = Rk43Tableau::get();
  const std::size_t d = x.size();
  if (ws.dim() != d) ws.resize(d);
  auto& tmp = RkAccess::tmp(ws);
  for (std::size_t s = 0; s < Rk43Tableau::stages; ++s) {
    for (std::size_t i = 0; i < d; ++i) {
      double acc = x[i];
      for (std::size_t j = 0; j < s; ++j) acc += h * tab.a[s][j] * RkAccess::stage(ws, j)[i];
      tmp[i] = acc;
    }
    rhs(t + tab.c[s] * h, tmp, RkAccess::stage(ws, s));
  }
  for (std::size_t i = 0; i < d; ++i) {
    double hi = x[i];
    double lo = x[i];
    for (std::size_t s = 0; s < Rk43Tableau::stages; ++s) {
      const double k = RkAccess::stage(ws, s)[i];
      hi += h * tab.b[s] * k;
      lo += h * tab.b_hat[s] * k;
    }
    high[i] = hi;
    low[i] = lo;
  }
}

RkStepResult adaptive_rk_step(const RhsFn& rhs, std::span<double> x, double t, double h, const RkControl& ctrl,
                              RkWorkspace& ws) {
  const std::size_t d = x.size();
  if (ws.dim() != d) ws.resize(d);
  auto& high = RkAccess::high(ws);
  auto& low = RkAccess::low(ws);
  rk43_fixed_step(rhs, x, t, h, high, low, ws);

  RkStepResult res;
  auto& err = RkAccess::err(ws);
  double sum = 0.0;
  std::size_t count = 0;
  auto scaled = [&](std::size_t i) {
    const double mag = std::max(std::abs(x[i]), std::abs(high[i]));
    return err[i] / (ctrl.abs_tol + ctrl.rel_tol * mag);
  };
  for (std::size_t i = 0; i < d; ++i) err[i] = std::abs(high[i] - low[i]);
  if (ctrl.error_components.empty()) {
    for (std::size_t i = 0; i < d; ++i) sum += scaled(i);
    count = d;
  } else {
    for (std::size_t i : ctrl.error_components) sum += scaled(i);
    count = ctrl.error_components.size();
  }
  res.error_norm = count > 0 ? sum / static_cast<double>(count) : 0.0;
  if (!std::isfinite(res.error_norm)) res.error_norm = std::numeric_limits<double>::infinity();

  // Proportional controller for the third-order embedded error.
  const double fac = res.error_norm > 0.0 ? 0.9 * std::pow(res.error_norm, -0.25) : 5.0;
  res.accepted = res.error_norm < 1.0;
  if (res.accepted) {
    std::copy(high.begin(), high.end(), x.begin());
    res.h_next = std::clamp(h * std::clamp(fac, 0.2, 5.0), ctrl.h_min, ctrl.h_max);
  } else {
    res.h_next = h * std::clamp(fac, 0.2, 0.9);
    if (res.h_next < ctrl.h_min)
      throw std::runtime_error("adaptive_rk_step: step size fell below h_min (stiff or unstable system)");
  }
  return res;
}

std::size_t integrate_adaptive(const RhsFn& rhs, std::span<double> x, double t0, double t1, const RkControl& ctrl,
                               RkWorkspace& ws, double& h) {
  std::size_t rejected = 0;
  double t = t0;
  h = std::clamp(h, ctrl.h_min, ctrl.h_max);
  const double tiny = 1e-12 * std::max(1.0, std::abs(t1));
  while (t1 - t > tiny) {
    const double remaining = t1 - t;
    const bool last = h >= remaining;
    const double step = last ? remaining : h;
    RkStepResult res;
    if (step < ctrl.h_min) {
      // Final sliver of the interval, shorter than h_min.
      RkControl local = ctrl;
      local.h_min = step * 0.2;
      res = adaptive_rk_step(rhs, x, t, step, local, ws);
    } else {
      res = adaptive_rk_step(rhs, x, t, step, ctrl, ws);
    }
    if (res.accepted) {
      t = last ? t1 : t + step;
      // Do not let a forced short final step shrink the carried step size.
      if (!last || step >= h) h = res.h_next;
    } else {
      ++rejected;
      h = res.h_next;
    }
  }
  return rejected;
}

}  // namespace bpf
