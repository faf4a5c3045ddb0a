#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "bpf/random.hpp"

namespace bpf {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

/// One observation: a time and one value per observed column. Missing
/// entries are NaN (partial observation).
struct Observation {
  double time = 0.0;
  std::vector<double> values;
};

using Series = std::vector<Observation>;

/// A continuous-time Markov state process that can be simulated forward.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::size_t dim() const = 0;

  /// Advance x in place from t to t + dt by one simulation substep.
  virtual void propagate(std::span<double> x, double t, double dt, Rng& rng) const = 0;

  /// Draw from p(dx_0). Models without a prior on the initial state throw.
  virtual void sample_initial(std::span<double> x, Rng& rng) const;

  /// log p(to | from) over dt, exact or approximate; nullopt when the model
  /// provides no pointwise density.
  virtual std::optional<double> transition_logpdf(std::span<const double> to, std::span<const double> from,
                                                  double t, double dt) const;

  /// True when transition_logpdf is the exact transition density for every dt.
  virtual bool exact_transition() const { return false; }
};

/// Observation density p(y | x) for indirectly observed states.
class ObservationModel {
 public:
  virtual ~ObservationModel() = default;
  /// y holds one value per observed column; NaN columns are skipped.
  virtual double logpdf(std::span<const double> y, std::span<const double> x) const = 0;
  virtual std::vector<double> sample(std::span<const double> x, Rng& rng) const = 0;
  /// State component observed by each column.
  virtual std::span<const std::size_t> components() const = 0;
};

/// Independent Gaussian noise on selected state components.
class GaussianObservation final : public ObservationModel {
 public:
  GaussianObservation(std::vector<std::size_t> components, std::vector<double> variances);
  double logpdf(std::span<const double> y, std::span<const double> x) const override;
  std::vector<double> sample(std::span<const double> x, Rng& rng) const override;
  std::span<const std::size_t> components() const override { return components_; }
  std::span<const double> variances() const { return variances_; }

 private:
  std::vector<std::size_t> components_;
  std::vector<double> variances_;
};

/// Closed-interval uniform density 1/(2 eps) on [y - eps, y + eps].
double epsilon_ball_loglik(double y, double x_component, double eps);

/// Uniform U(x - eps, x + eps) observation of one state component.
class EpsilonBallObservation final : public ObservationModel {
 public:
  EpsilonBallObservation(std::size_t component, double eps);
  double logpdf(std::span<const double> y, std::span<const double> x) const override;
  std::vector<double> sample(std::span<const double> x, Rng& rng) const override;
  std::span<const std::size_t> components() const override { return {&component_, 1}; }
  double epsilon() const { return eps_; }

 private:
  std::size_t component_;
  double eps_;
};

/// Log-density of N(mean, var) at x. var == 0 gives +inf at the mean, -inf elsewhere.
double normal_logpdf(double x, double mean, double var);

}  // namespace bpf

namespace bpf {

/// Forward simulation from x0 at times[0] through each later time, one
/// propagate call per interval. Returns the state at every time (x0 first).
std::vector<std::vector<double>> simulate_path(const Model& model, std::span<const double> x0,
                                               std::span<const double> times, Rng& rng);

}  // namespace bpf
