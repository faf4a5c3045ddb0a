#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace bpf {

// dx/dt = f(t, x), written into dxdt.
using RhsFn = std::function<void(double t, std::span<const double> x, std::span<double> dxdt)>;

/// Tolerances and step bounds for the embedded pair.
struct RkControl {
  double abs_tol = 1e-2;
  double rel_tol = 1e-5;
  double h_init = 1e-2;
  double h_min = 1e-10;
  double h_max = 1.0;
  // Components entering the scaled error mean; empty means all.
  std::vector<std::size_t> error_components;

  void validate() const;
};

/// Carpenter-Kennedy RK4(3)5[2R+]C: five stages, fourth-order solution with
/// an embedded third-order solution. Coefficients from Kennedy, Carpenter &
/// Lewis (2000), Appl. Numer. Math. 35, table for RK4(3)5[2R+]C, written here
/// in full Butcher form (a_ij = b_j for j < i - 1).
struct Rk43Tableau {
  static constexpr std::size_t stages = 5;
  std::array<std::array<double, stages>, stages> a{};
  std::array<double, stages> b{};
  std::array<double, stages> b_hat{};
  std::array<double, stages> c{};

  static const Rk43Tableau& get();
};

/// Scratch buffers for one state dimension.
class RkWorkspace {
 public:
  explicit RkWorkspace(std::size_t dim = 0) { resize(dim); }
  void resize(std::size_t dim);
  std::size_t dim() const { return dim_; }
  // |high - low| per component from the most recent step attempt.
  std::span<const double> component_error() const { return err_; }

 private:
  friend struct RkAccess;
  std::size_t dim_ = 0;
  std::vector<double> k_;  // stages x dim
  std::vector<double> tmp_;
  std::vector<double> high_;
  std::vector<double> low_;
  std::vector<double> err_;
};

struct RkStepResult {
  bool accepted = false;
  double error_norm = 0.0;  // mean scaled error
  double h_next = 0.0;
};

/// One attempt of the embedded pair from (t, x) with step h. On acceptance x
/// is overwritten with the fourth-order solution; on rejection x is untouched
/// and h_next < h. Per-component errors are left in ws.component_error(). Throws std::runtime_error when the step would have to fall
/// below h_min.
RkStepResult adaptive_rk_step(const RhsFn& rhs, std::span<double> x, double t, double h, const RkControl& ctrl,
                              RkWorkspace& ws);

/// Fixed step of the pair without error control; writes both solutions.
void rk43_fixed_step(const RhsFn& rhs, std::span<const double> x, double t, double h, std::span<double> high,
                     std::span<double> low, RkWorkspace& ws);

/// Integrates x from t0 to t1 adaptively. h carries the step size across
/// calls; returns the number of rejected attempts.
std::size_t integrate_adaptive(const RhsFn& rhs, std::span<double> x, double t0, double t1, const RkControl& ctrl,
                               RkWorkspace& ws, double& h);

}  // namespace bpf
