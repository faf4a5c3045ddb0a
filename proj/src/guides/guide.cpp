#include "bpf/guides/guide.hpp"

#include <stdexcept>
#include <string>

namespace bpf {

GuideKind parse_guide_kind(std::string_view name) {
  if (name == "exact") return GuideKind::exact_transition;
  if (name == "gp-state") return GuideKind::gp_state;
  if (name == "gp-observation") return GuideKind::gp_observation;
  if (name == "pd") return GuideKind::pd_parametric;
  if (name == "constant") return GuideKind::constant;
  throw std::invalid_argument("unknown guide kind '" + std::string(name) + "'");
}

std::string_view to_string(GuideKind kind) {
  switch (kind) {
    case GuideKind::exact_transition: return "exact";
    case GuideKind::gp_state: return "gp-state";
    case GuideKind::gp_observation: return "gp-observation";
    case GuideKind::pd_parametric: return "pd";
    case GuideKind::constant: return "constant";
  }
  return "constant";
}

ExactTransitionGuide::ExactTransitionGuide(const Model& model) : model_(&model) {
  if (!model.exact_transition())
    throw std::invalid_argument("exact-transition guide requires a model with an exact transition density");
}

double ExactTransitionGuide::log_value(std::span<const double> x, double t, const Observation& target) const {
  return *model_->transition_logpdf(target.values, x, t, target.time - t);
}

}  // namespace bpf
