#include "bpf/pmmh/prior.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bpf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(std::string_view s, std::string_view what) {
  const auto t = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw std::invalid_argument("prior: bad number '" + t + "' in " + std::string(what));
  return v;
}

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

ParamPrior ParamPrior::uniform(double lo, double hi) {
  ParamPrior p{PriorKind::uniform, lo, hi};
  p.validate();
  return p;
}

ParamPrior ParamPrior::gamma(double shape, double scale) {
  ParamPrior p{PriorKind::gamma, shape, scale};
  p.validate();
  return p;
}

ParamPrior ParamPrior::normal(double mean, double var) {
  ParamPrior p{PriorKind::normal, mean, var};
  p.validate();
  return p;
}

void ParamPrior::validate() const {
  switch (kind) {
    case PriorKind::uniform:
      if (!(std::isfinite(a) && std::isfinite(b) && a < b)) throw std::invalid_argument("prior: uniform needs a < b");
      break;
    case PriorKind::gamma:
      if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("prior: gamma needs positive shape and scale");
      break;
    case PriorKind::normal:
      if (!(std::isfinite(a) && b > 0.0)) throw std::invalid_argument("prior: normal needs positive variance");
      break;
  }
}

double ParamPrior::lower() const {
  switch (kind) {
    case PriorKind::uniform: return a;
    case PriorKind::gamma: return 0.0;
    case PriorKind::normal: return -kInf;
  }
  return -kInf;
}

double ParamPrior::upper() const { return kind == PriorKind::uniform ? b : kInf; }

bool ParamPrior::in_support(double x) const {
  if (std::isnan(x)) return false;
  switch (kind) {
    case PriorKind::uniform: return x >= a && x <= b;
    case PriorKind::gamma: return x > 0.0 && x < kInf;
    case PriorKind::normal: return std::isfinite(x);
  }
  return false;
}

double ParamPrior::log_density(double x) const {
  if (!in_support(x)) return -kInf;
  switch (kind) {
    case PriorKind::uniform: return -std::log(b - a);
    case PriorKind::gamma: return (a - 1.0) * std::log(x) - x / b - std::lgamma(a) - a * std::log(b);
    case PriorKind::normal: {
      const double z = x - a;
      return -0.5 * (z * z / b + std::log(2.0 * std::numbers::pi * b));
    }
  }
  return -kInf;
}

ParamPrior parse_prior(std::string_view text) {
  const auto t = trim(text);
  const auto open = t.find('(');
  const auto close = t.rfind(')');
  if (open == std::string::npos || close != t.size() - 1)
    throw std::invalid_argument("prior: expected name(a, b), got '" + t + "'");
  const auto name = trim(std::string_view(t).substr(0, open));
  const auto args = std::string_view(t).substr(open + 1, close - open - 1);
  const auto comma = args.find(',');
  if (comma == std::string_view::npos || args.find(',', comma + 1) != std::string_view::npos)
    throw std::invalid_argument("prior: expected two arguments in '" + t + "'");
  const double a = parse_number(args.substr(0, comma), t);
  const double b = parse_number(args.substr(comma + 1), t);
  if (name == "uniform") return ParamPrior::uniform(a, b);
  if (name == "gamma") return ParamPrior::gamma(a, b);
  if (name == "normal") return ParamPrior::normal(a, b);
  throw std::invalid_argument("prior: unknown distribution '" + name + "'");
}

std::string to_string(const ParamPrior& p) {
  const char* name = p.kind == PriorKind::uniform ? "uniform" : p.kind == PriorKind::gamma ? "gamma" : "normal";
  return std::string(name) + "(" + fmt(p.a) + ", " + fmt(p.b) + ")";
}

double log_prior(std::span<const double> theta, std::span<const ParamPrior> priors) {
  if (theta.size() != priors.size()) throw std::invalid_argument("log_prior: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double lp = priors[i].log_density(theta[i]);
    if (lp == -kInf) return -kInf;
    acc += lp;
  }
  return acc;
}

}  // namespace bpf
