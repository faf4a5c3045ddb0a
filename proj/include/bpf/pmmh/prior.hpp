#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bpf {

enum class PriorKind { uniform, gamma, normal };

/// uniform(a, b): closed interval [a, b]. gamma(shape, scale): x > 0.
/// normal(mean, var): the real line.
struct ParamPrior {
  PriorKind kind = PriorKind::uniform;
  double a = 0.0;
  double b = 1.0;

  static ParamPrior uniform(double lo, double hi);
  static ParamPrior gamma(double shape, double scale);
  static ParamPrior normal(double mean, double var);

  double lower() const;
  double upper() const;
  bool in_support(double x) const;
  double log_density(double x) const;
  void validate() const;
};

/// Parses "uniform(-1, 1)", "gamma(2, 1)" or "normal(0, 4)".
ParamPrior parse_prior(std::string_view text);
std::string to_string(const ParamPrior& p);

/// Sum of component log-densities; -inf outside the support.
double log_prior(std::span<const double> theta, std::span<const ParamPrior> priors);

}  // namespace bpf
