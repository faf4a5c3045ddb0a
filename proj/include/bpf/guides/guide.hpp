#pragma once

#include <span>
#include <string_view>

#include "bpf/models/model.hpp"

namespace bpf {

enum class GuideKind { exact_transition, gp_state, gp_observation, pd_parametric, constant };

GuideKind parse_guide_kind(std::string_view name);
std::string_view to_string(GuideKind kind);

/// Guide (weight) function: log q(x_n | x_k) for a pinned terminal state or
/// log r(y_n | x_k) for an indirect observation, evaluated at the current
/// state x_k and time t_k against the block's target.
class Guide {
 public:
  virtual ~Guide() = default;
  virtual double log_value(std::span<const double> x, double t, const Observation& target) const = 0;
};

/// g == 1. Turns the bridge filter into the bootstrap filter.
class ConstantGuide final : public Guide {
 public:
  double log_value(std::span<const double>, double, const Observation&) const override { return 0.0; }
};

/// q(x_n | x_k) := p(x_n | x_k) for models with an exact transition density.
class ExactTransitionGuide final : public Guide {
 public:
  explicit ExactTransitionGuide(const Model& model);
  double log_value(std::span<const double> x, double t, const Observation& target) const override;

 private:
  const Model* model_;
};

}  // namespace bpf
