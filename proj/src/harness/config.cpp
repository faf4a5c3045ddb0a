#include "bpf/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "bpf/core/schedule.hpp"
#include "bpf/harness/csv.hpp"

namespace bpf {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

double to_double(std::string_view s) {
  const double v = parse_double(s);
  if (std::isnan(v)) throw std::invalid_argument("expected a number, got '" + std::string(s) + "'");
  return v;
}

std::uint64_t to_u64(std::string_view s) {
  const auto t = trim(s);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw std::invalid_argument("expected a non-negative integer, got '" + t + "'");
  return v;
}

std::size_t to_size(std::string_view s) { return static_cast<std::size_t>(to_u64(s)); }

bool to_bool(std::string_view s) {
  const auto t = trim(s);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw std::invalid_argument("expected true or false, got '" + t + "'");
}

std::vector<double> to_doubles(std::string_view s) {
  std::vector<double> out;
  for (const auto& x : split_list(s, ',')) out.push_back(to_double(x));
  return out;
}

std::vector<std::size_t> to_sizes(std::string_view s) {
  std::vector<std::size_t> out;
  for (const auto& x : split_list(s, ',')) out.push_back(to_size(x));
  return out;
}

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

template <class T, class F>
std::string join(const std::vector<T>& v, F f, std::string_view sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += f(v[i]);
  }
  return out;
}

std::string fmt(const std::vector<double>& v) {
  return join(v, [](double x) { return format_double(x); });
}
std::string fmt(const std::vector<std::size_t>& v) {
  return join(v, [](std::size_t x) { return std::to_string(x); });
}

ObservationKind parse_observation_kind(std::string_view s) {
  if (s == "none") return ObservationKind::none;
  if (s == "gaussian") return ObservationKind::gaussian;
  if (s == "epsilon") return ObservationKind::epsilon;
  throw std::invalid_argument("expected none, gaussian or epsilon, got '" + std::string(s) + "'");
}

std::string_view to_string(ObservationKind k) {
  switch (k) {
    case ObservationKind::none: return "none";
    case ObservationKind::gaussian: return "gaussian";
    case ObservationKind::epsilon: return "epsilon";
  }
  return "none";
}

ReferenceKind parse_reference(std::string_view s) {
  if (s == "none") return ReferenceKind::none;
  if (s == "exact") return ReferenceKind::exact;
  if (s == "bootstrap") return ReferenceKind::bootstrap;
  throw std::invalid_argument("expected none, exact or bootstrap, got '" + std::string(s) + "'");
}

std::string_view to_string(ReferenceKind k) {
  switch (k) {
    case ReferenceKind::none: return "none";
    case ReferenceKind::exact: return "exact";
    case ReferenceKind::bootstrap: return "bootstrap";
  }
  return "none";
}

TimingMode parse_timing(std::string_view s) {
  if (s == "wall") return TimingMode::wall;
  if (s == "work") return TimingMode::work;
  throw std::invalid_argument("expected wall or work, got '" + std::string(s) + "'");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct Key {
  std::string section;
  std::string name;
  Setter set;
  Getter get;
};

#define BPF_DOUBLE(sec, key, field) \
  Key{sec, key, [](ExperimentConfig& c, const std::string& v) { c.field = to_double(v); }, \
      [](const ExperimentConfig& c) { return fmt(c.field); }}
#define BPF_SIZE(sec, key, field) \
  Key{sec, key, [](ExperimentConfig& c, const std::string& v) { c.field = to_size(v); }, \
      [](const ExperimentConfig& c) { return fmt(static_cast<std::uint64_t>(c.field)); }}
#define BPF_DOUBLES(sec, key, field) \
  Key{sec, key, [](ExperimentConfig& c, const std::string& v) { c.field = to_doubles(v); }, \
      [](const ExperimentConfig& c) { return fmt(c.field); }}
#define BPF_SIZES(sec, key, field) \
  Key{sec, key, [](ExperimentConfig& c, const std::string& v) { c.field = to_sizes(v); }, \
      [](const ExperimentConfig& c) { return fmt(c.field); }}
#define BPF_BOOL(sec, key, field) \
  Key{sec, key, [](ExperimentConfig& c, const std::string& v) { c.field = to_bool(v); }, \
      [](const ExperimentConfig& c) { return fmt(c.field); }}
#define BPF_STRING(sec, key, field) \
  Key{sec, key, [](ExperimentConfig& c, const std::string& v) { c.field = v; }, \
      [](const ExperimentConfig& c) { return c.field; }}
#define BPF_ENUM(sec, key, field, parse) \
  Key{sec, key, [](ExperimentConfig& c, const std::string& v) { c.field = parse(v); }, \
      [](const ExperimentConfig& c) { return std::string(to_string(c.field)); }}

const std::vector<Key>& keys() {
  static const std::vector<Key> k{
      BPF_STRING("experiment", "name", name),
      Key{"experiment", "filters",
          [](ExperimentConfig& c, const std::string& v) {
            c.filters.clear();
            for (const auto& f : split_list(v, ',')) c.filters.push_back(parse_filter_kind(f));
          },
          [](const ExperimentConfig& c) {
            return join(c.filters, [](FilterKind f) { return std::string(to_string(f)); });
          }},
      BPF_SIZES("experiment", "particles", particles),
      BPF_SIZE("experiment", "replicates", replicates),
      BPF_DOUBLE("experiment", "rel_threshold", rel_threshold),
      BPF_ENUM("experiment", "resampler", resampler, parse_resampler),
      BPF_ENUM("experiment", "mode", mode, parse_target_mode),
      Key{"experiment", "seed", [](ExperimentConfig& c, const std::string& v) { c.seed = to_u64(v); },
          [](const ExperimentConfig& c) { return fmt(c.seed); }},
      BPF_SIZE("experiment", "threads", threads),
      Key{"experiment", "timing", [](ExperimentConfig& c, const std::string& v) { c.timing = parse_timing(v); },
          [](const ExperimentConfig& c) { return std::string(c.timing == TimingMode::wall ? "wall" : "work"); }},
      BPF_DOUBLE("experiment", "work_rate", work_rate),

      BPF_ENUM("model", "kind", model.kind, parse_model_kind),
      BPF_DOUBLE("ou", "theta1", model.ou.theta1),
      BPF_DOUBLE("ou", "theta2", model.ou.theta2),
      BPF_DOUBLE("ou", "theta3", model.ou.theta3),
      BPF_DOUBLE("pd", "theta", model.pd.theta),
      BPF_DOUBLE("sir", "beta_t1", model.sir.beta.t1),
      BPF_DOUBLE("sir", "beta_t2", model.sir.beta.t2),
      BPF_DOUBLE("sir", "beta_t3", model.sir.beta.t3),
      BPF_DOUBLE("sir", "nu_t1", model.sir.nu.t1),
      BPF_DOUBLE("sir", "nu_t2", model.sir.nu.t2),
      BPF_DOUBLE("sir", "nu_t3", model.sir.nu.t3),
      BPF_DOUBLE("sir", "population", model.sir.population),
      BPF_DOUBLE("sir", "initial_infected", model.sir.initial_infected),
      BPF_DOUBLE("sir", "abs_tol", model.abs_tol),
      BPF_DOUBLE("sir", "rel_tol", model.rel_tol),

      BPF_DOUBLE("schedule", "t0", schedule.t0),
      BPF_DOUBLES("schedule", "obs_times", schedule.obs_times),
      BPF_SIZE("schedule", "obs_count", schedule.obs_count),
      BPF_DOUBLE("schedule", "obs_spacing", schedule.obs_spacing),
      BPF_DOUBLE("schedule", "bridge_step", schedule.bridge_step),
      BPF_DOUBLE("schedule", "sim_step", schedule.sim_step),

      BPF_STRING("data", "path", data.path),
      BPF_SIZE("data", "datasets", data.datasets),
      BPF_DOUBLES("data", "x0", data.x0),
      BPF_BOOL("data", "x0_from_prior", data.x0_from_prior),
      BPF_ENUM("data", "observation", data.observation, parse_observation_kind),
      BPF_SIZES("data", "components", data.components),
      BPF_DOUBLES("data", "obs_variance", data.obs_variance),
      BPF_DOUBLE("data", "epsilon", data.epsilon),
      BPF_ENUM("data", "reference", data.reference, parse_reference),
      BPF_SIZE("data", "reference_particles", data.reference_particles),

      BPF_ENUM("guide", "kind", guide.kind, parse_guide_kind),
      BPF_BOOL("guide", "fit", guide.fit),
      BPF_DOUBLE("guide", "power", guide.power),
      BPF_DOUBLE("guide", "inflation", guide.inflation),
      BPF_DOUBLE("guide", "obs_variance", guide.obs_variance),
      BPF_SIZES("guide", "components", guide.components),
      BPF_DOUBLES("guide", "alpha", guide.alpha),
      BPF_DOUBLES("guide", "beta", guide.beta),
      BPF_DOUBLES("guide", "mean", guide.mean),
      BPF_DOUBLE("guide", "epsilon", guide.pd.epsilon),
      BPF_DOUBLE("guide", "sigma2", guide.pd.sigma2),

      BPF_STRING("output", "records", records),
      BPF_STRING("output", "metrics", metrics),

      BPF_SIZE("pmmh", "steps", pmmh.steps),
      BPF_SIZE("pmmh", "burn_in", pmmh.burn_in),
      BPF_ENUM("pmmh", "filter", pmmh.filter, parse_filter_kind),
      BPF_BOOL("pmmh", "exact_likelihood", pmmh.exact_likelihood),
      BPF_SIZE("pmmh", "particles", pmmh.particles),
      Key{"pmmh", "priors",
          [](ExperimentConfig& c, const std::string& v) {
            c.pmmh.priors.clear();
            for (const auto& p : split_list(v, ';')) c.pmmh.priors.push_back(parse_prior(p));
          },
          [](const ExperimentConfig& c) {
            return join(c.pmmh.priors, [](const ParamPrior& p) { return to_string(p); }, "; ");
          }},
      BPF_DOUBLES("pmmh", "init", pmmh.init),
      BPF_DOUBLES("pmmh", "proposal_sd", pmmh.proposal_sd),
      BPF_BOOL("pmmh", "transform", pmmh.transform),
      BPF_SIZE("pmmh", "max_lag", pmmh.max_lag),
      BPF_STRING("pmmh", "trace", pmmh.trace),
  };
  return k;
}

#undef BPF_DOUBLE
#undef BPF_SIZE
#undef BPF_DOUBLES
#undef BPF_SIZES
#undef BPF_BOOL
#undef BPF_STRING
#undef BPF_ENUM

const Key& find_key(const std::string& section, const std::string& name) {
  for (const auto& k : keys())
    if (k.section == section && k.name == name) return k;
  throw std::invalid_argument("config: unknown key '" + section + "." + name + "'");
}

void apply(ExperimentConfig& c, const std::string& section, const std::string& name, const std::string& value) {
  const auto& k = find_key(section, name);
  try {
    k.set(c, trim(value));
  } catch (const std::exception& e) {
    throw std::invalid_argument("config: invalid value for '" + section + "." + name + "': " + e.what());
  }
}

double default_power(GuideKind k) { return k == GuideKind::pd_parametric ? 0.25 : 1.0; }

}  // namespace

ModelKind parse_model_kind(std::string_view name) {
  if (name == "ou") return ModelKind::ou;
  if (name == "pd") return ModelKind::pd;
  if (name == "sir") return ModelKind::sir;
  throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::ou: return "ou";
    case ModelKind::pd: return "pd";
    case ModelKind::sir: return "sir";
  }
  return "ou";
}

FilterKind parse_filter_kind(std::string_view name) {
  if (name == "bootstrap") return FilterKind::bootstrap;
  if (name == "bridge") return FilterKind::bridge;
  throw std::invalid_argument("unknown filter '" + std::string(name) + "'");
}

std::string_view to_string(FilterKind k) { return k == FilterKind::bootstrap ? "bootstrap" : "bridge"; }

std::vector<double> ScheduleConfig::observation_times() const {
  if (!obs_times.empty()) return obs_times;
  std::vector<double> t(obs_count);
  for (std::size_t i = 0; i < obs_count; ++i) t[i] = t0 + static_cast<double>(i + 1) * obs_spacing;
  return t;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& why) {
    throw std::invalid_argument("config: '" + key + "' " + why);
  };
  if (particles.empty()) fail("experiment.particles", "must list at least one value");
  for (auto n : particles)
    if (n < 2) fail("experiment.particles", "values must be at least 2");
  if (filters.empty()) fail("experiment.filters", "must list at least one filter");
  if (replicates < 1) fail("experiment.replicates", "must be at least 1");
  if (!(rel_threshold >= 0.0 && rel_threshold <= 1.0)) fail("experiment.rel_threshold", "must lie in [0, 1]");
  if (!(work_rate > 0.0)) fail("experiment.work_rate", "must be positive");
  try {
    switch (model.kind) {
      case ModelKind::ou: model.ou.validate(); break;
      case ModelKind::pd: break;
      case ModelKind::sir: model.sir.validate(); break;
    }
  } catch (const std::exception& e) {
    fail(std::string(to_string(model.kind)), e.what());
  }
  if (!(model.abs_tol > 0.0)) fail("sir.abs_tol", "must be positive");
  if (!(model.rel_tol >= 0.0)) fail("sir.rel_tol", "must be non-negative");
  if (schedule.obs_times.empty() && !(schedule.obs_spacing > 0.0)) fail("schedule.obs_spacing", "must be positive");
  try {
    ScheduleSpec spec{schedule.t0, schedule.observation_times(), schedule.bridge_step, schedule.sim_step,
                      mode == TargetMode::terminal_state};
    make_schedule(spec).validate();
  } catch (const std::exception& e) {
    fail("schedule", e.what());
  }
  if (data.path.empty() && data.datasets < 1) fail("data.datasets", "must be at least 1");
  if (data.observation == ObservationKind::gaussian && data.obs_variance.size() != data.components.size())
    fail("data.obs_variance", "needs one value per observed component");
  if (data.observation == ObservationKind::epsilon && data.components.size() != 1)
    fail("data.components", "an epsilon ball observes exactly one component");
  if (!(data.epsilon > 0.0)) fail("data.epsilon", "must be positive");
  if (mode == TargetMode::observed && data.observation == ObservationKind::none)
    fail("data.observation", "observed mode needs an observation model");
  if (data.reference == ReferenceKind::bootstrap && data.reference_particles < 2)
    fail("data.reference_particles", "must be at least 2");
  if (!(guide.power > 0.0 && guide.power <= 1.0)) fail("guide.power", "must lie in (0, 1]");
  if (!(guide.inflation >= 1.0)) fail("guide.inflation", "must be at least 1");
  if (!(guide.obs_variance >= 0.0)) fail("guide.obs_variance", "must be non-negative");
  if (guide.kind == GuideKind::gp_state || guide.kind == GuideKind::gp_observation) {
    if (guide.components.empty()) fail("guide.components", "must list at least one component");
    if (!guide.fit && (guide.alpha.size() != guide.components.size() || guide.beta.size() != guide.components.size() ||
                       guide.mean.size() != guide.components.size()))
      fail("guide.alpha", "alpha, beta and mean need one value per component unless fit = true");
  }
  if (!(guide.pd.epsilon >= 0.0)) fail("guide.epsilon", "must be non-negative");
  if (!(guide.pd.sigma2 > 0.0)) fail("guide.sigma2", "must be positive");
  if (pmmh.particles < 2) fail("pmmh.particles", "must be at least 2");
  if (!pmmh.init.empty() && pmmh.init.size() != parameter_names(model.kind).size())
    fail("pmmh.init", "needs one value per model parameter");
}

ExperimentConfig parse_config(std::string_view text, const ConfigOverrides& overrides) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream is{std::string(text)};
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  ExperimentConfig c;
  bool power_set = false;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw std::invalid_argument("config: key '" + section + "' outside a section");
    for (const auto& [name, value] : body) {
      apply(c, section, name, value.data());
      if (section == "guide" && name == "power") power_set = true;
    }
  }
  for (const auto& [path, value] : overrides) {
    const auto dot = path.find('.');
    if (dot == std::string::npos) throw std::invalid_argument("config: override '" + path + "' needs section.key");
    apply(c, path.substr(0, dot), path.substr(dot + 1), value);
    if (path == "guide.power") power_set = true;
  }
  if (!power_set) c.guide.power = default_power(c.guide.kind);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::string to_text(const ExperimentConfig& c) {
  std::string out;
  std::string current;
  for (const auto& k : keys()) {
    if (k.section != current) {
      if (!current.empty()) out += '\n';
      out += "[" + k.section + "]\n";
      current = k.section;
    }
    out += k.name + " = " + k.get(c) + "\n";
  }
  return out;
}

std::vector<std::string> parameter_names(ModelKind kind) {
  switch (kind) {
    case ModelKind::ou: return {"theta1", "theta2", "theta3"};
    case ModelKind::pd: return {"theta"};
    case ModelKind::sir: return {"beta_t1", "beta_t2", "beta_t3", "nu_t1", "nu_t2", "nu_t3"};
  }
  return {};
}

std::vector<double> model_parameters(const ModelConfig& m) {
  switch (m.kind) {
    case ModelKind::ou: return {m.ou.theta1, m.ou.theta2, m.ou.theta3};
    case ModelKind::pd: return {m.pd.theta};
    case ModelKind::sir:
      return {m.sir.beta.t1, m.sir.beta.t2, m.sir.beta.t3, m.sir.nu.t1, m.sir.nu.t2, m.sir.nu.t3};
  }
  return {};
}

ModelConfig with_parameters(const ModelConfig& m, std::span<const double> theta) {
  if (theta.size() != parameter_names(m.kind).size()) throw std::invalid_argument("with_parameters: wrong count");
  ModelConfig out = m;
  switch (m.kind) {
    case ModelKind::ou: out.ou = {theta[0], theta[1], theta[2]}; break;
    case ModelKind::pd: out.pd.theta = theta[0]; break;
    case ModelKind::sir:
      out.sir.beta = {theta[0], theta[1], theta[2]};
      out.sir.nu = {theta[3], theta[4], theta[5]};
      break;
  }
  return out;
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BPF_THREADS")) {
    try {
      const auto n = to_size(env);
      if (n > 0) return n;
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("BPF_THREADS must be a positive integer");
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

}  // namespace bpf
