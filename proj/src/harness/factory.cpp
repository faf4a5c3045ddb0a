#include "bpf/harness/factory.hpp"

#include <cmath>
#include <stdexcept>

#include "bpf/guides/fit.hpp"
#include "bpf/guides/gp.hpp"
#include "bpf/guides/pd_guide.hpp"

namespace bpf {

std::unique_ptr<Model> make_model(const ModelConfig& m) {
  switch (m.kind) {
    case ModelKind::ou: return std::make_unique<OuModel>(m.ou);
    case ModelKind::pd: return std::make_unique<PdModel>(m.pd);
    case ModelKind::sir: {
      auto ctrl = sir_default_control();
      ctrl.abs_tol = m.abs_tol;
      ctrl.rel_tol = m.rel_tol;
      return std::make_unique<SirModel>(m.sir, ctrl);
    }
  }
  throw std::logic_error("make_model: unknown kind");
}

std::unique_ptr<ObservationModel> make_observation(const DataConfig& d) {
  switch (d.observation) {
    case ObservationKind::none: return nullptr;
    case ObservationKind::gaussian: return std::make_unique<GaussianObservation>(d.components, d.obs_variance);
    case ObservationKind::epsilon: return std::make_unique<EpsilonBallObservation>(d.components.at(0), d.epsilon);
  }
  return nullptr;
}

ScheduleSpec schedule_spec(const ExperimentConfig& c) {
  return {c.schedule.t0, c.schedule.observation_times(), c.schedule.bridge_step, c.schedule.sim_step,
          c.mode == TargetMode::terminal_state};
}

Schedule make_experiment_schedule(const ExperimentConfig& c) { return make_schedule(schedule_spec(c)); }

std::vector<std::string> state_names(ModelKind kind) {
  switch (kind) {
    case ModelKind::ou:
    case ModelKind::pd: return {"x"};
    case ModelKind::sir: return {"S", "I", "R", "log_beta", "log_nu"};
  }
  return {};
}

std::vector<std::string> data_columns(const ExperimentConfig& c) {
  const auto names = state_names(c.model.kind);
  if (c.mode == TargetMode::terminal_state) return names;
  std::vector<std::string> out;
  for (auto comp : c.data.components) {
    if (comp >= names.size()) throw std::invalid_argument("data.components: component out of range");
    out.push_back("y_" + names[comp]);
  }
  return out;
}

std::vector<double> initial_state(const ExperimentConfig& c) {
  std::vector<double> x0 = c.data.x0;
  if (c.model.kind == ModelKind::sir && x0.size() != 5) {
    const auto& p = c.model.sir;
    x0 = {p.population - p.initial_infected, p.initial_infected, 0.0, p.beta.t1 / p.beta.t2, p.nu.t1 / p.nu.t2};
  }
  const auto d = state_names(c.model.kind).size();
  if (x0.size() != d) throw std::invalid_argument("data.x0: needs " + std::to_string(d) + " values");
  return x0;
}

namespace {

GpGuideParams fit_one(const std::vector<double>& t, const std::vector<double>& y, const GuideConfig& g) {
  auto fit = fit_gp_guide(t, y);
  fit.params.inflation = g.inflation;
  fit.params.power = g.power;
  fit.params.obs_variance = g.obs_variance;
  return fit.params;
}

}  // namespace

GuideConfig fit_guide(const ExperimentConfig& c, const Series& data) {
  GuideConfig g = c.guide;
  if (!g.fit) return g;
  g.fit = false;
  switch (g.kind) {
    case GuideKind::gp_state:
    case GuideKind::gp_observation: {
      const bool state = g.kind == GuideKind::gp_state;
      g.alpha.clear();
      g.beta.clear();
      g.mean.clear();
      for (std::size_t j = 0; j < g.components.size(); ++j) {
        // State mode: columns are state components. Observation mode: column j.
        const std::size_t col = state ? g.components[j] : j;
        std::vector<double> t, y;
        if (state && c.mode == TargetMode::terminal_state) {
          t.push_back(c.schedule.t0);
          y.push_back(initial_state(c).at(col));
        }
        for (const auto& o : data) {
          if (col >= o.values.size()) throw std::invalid_argument("guide.components: column out of range");
          t.push_back(o.time);
          y.push_back(o.values[col]);
        }
        const auto p = fit_one(t, y, g);
        g.alpha.push_back(p.alpha);
        g.beta.push_back(p.beta);
        g.mean.push_back(p.mean);
      }
      return g;
    }
    case GuideKind::pd_parametric: {
      const PdModel model(c.model.pd);
      const double horizon = c.schedule.obs_spacing;
      std::vector<double> lags;
      for (double lag = c.schedule.bridge_step; lag <= horizon + 1e-9; lag += c.schedule.bridge_step)
        lags.push_back(lag);
      Rng rng(c.seed, 0x6669742d7064ULL);
      const auto pairs = simulate_pd_pairs(model, initial_state(c).at(0), 256, horizon, c.schedule.sim_step, lags,
                                           c.schedule.bridge_step, rng);
      const auto fit = fit_pd_guide(pairs, g.power);
      g.pd = fit.params;
      return g;
    }
    case GuideKind::exact_transition:
    case GuideKind::constant: return g;
  }
  return g;
}

std::unique_ptr<Guide> make_guide(const GuideConfig& g, TargetMode mode, const Model& model) {
  if (g.fit) throw std::invalid_argument("make_guide: guide parameters must be fitted first");
  switch (g.kind) {
    case GuideKind::exact_transition: return std::make_unique<ExactTransitionGuide>(model);
    case GuideKind::constant: return std::make_unique<ConstantGuide>();
    case GuideKind::pd_parametric: {
      PdGuideParams p = g.pd;
      p.power = g.power;
      return std::make_unique<PdGuide>(p);
    }
    case GuideKind::gp_state:
    case GuideKind::gp_observation: {
      const auto gm = g.kind == GuideKind::gp_state ? GpMode::state : GpMode::observation;
      if (gm == GpMode::state && mode != TargetMode::terminal_state)
        throw std::invalid_argument("guide.kind: gp-state needs terminal mode");
      if (gm == GpMode::observation && mode != TargetMode::observed)
        throw std::invalid_argument("guide.kind: gp-observation needs observed mode");
      std::vector<GpGuideParams> ps;
      for (std::size_t j = 0; j < g.components.size(); ++j) {
        GpGuideParams p;
        p.alpha = g.alpha.at(j);
        p.beta = g.beta.at(j);
        p.mean = g.mean.at(j);
        p.inflation = g.inflation;
        p.power = g.power;
        p.obs_variance = g.obs_variance;
        ps.push_back(p);
      }
      return std::make_unique<GpGuide>(gm, g.components, ps);
    }
  }
  throw std::logic_error("make_guide: unknown kind");
}

FilterConfig make_filter_config(const ExperimentConfig& c, std::size_t particles, std::uint64_t seed,
                                const ObservationModel* observation) {
  FilterConfig f;
  f.particles = particles;
  f.rel_threshold = c.rel_threshold;
  f.resampler = c.resampler;
  f.mode = c.mode;
  f.observation = observation;
  f.seed = seed;
  if (c.mode == TargetMode::terminal_state) f.x0 = initial_state(c);
  return f;
}

FilterOutput run_filter(FilterKind kind, const Model& model, const Guide& guide, const Schedule& schedule,
                        const Series& data, const FilterConfig& config) {
  if (kind == FilterKind::bootstrap) return run_bootstrap_filter(model, schedule, data, config);
  return run_bridge_filter(model, guide, schedule, data, config);
}

std::optional<double> exact_log_likelihood(const ExperimentConfig& c, const Model& model, const Series& data) {
  if (c.mode != TargetMode::terminal_state || !model.exact_transition()) return std::nullopt;
  std::vector<double> prev = initial_state(c);
  double prev_t = c.schedule.t0;
  double acc = 0.0;
  for (const auto& o : data) {
    if (std::abs(o.time - prev_t) <= 1e-9 * std::max(1.0, std::abs(o.time))) continue;
    acc += *model.transition_logpdf(o.values, prev, prev_t, o.time - prev_t);
    prev = o.values;
    prev_t = o.time;
  }
  return acc;
}

LogLikelihood make_likelihood(const ExperimentConfig& c, const Series& data, const GuideConfig& guide) {
  auto schedule = std::make_shared<const Schedule>(make_experiment_schedule(c));
  std::shared_ptr<const ObservationModel> obs = make_observation(c.data);
  return [c, data, guide, schedule, obs](std::span<const double> theta, std::uint64_t seed) -> double {
    std::unique_ptr<Model> model;
    try {
      model = make_model(with_parameters(c.model, theta));
    } catch (const std::invalid_argument&) {
      return -INFINITY;
    }
    if (c.pmmh.exact_likelihood) {
      const auto ll = exact_log_likelihood(c, *model, data);
      if (!ll) throw std::invalid_argument("pmmh.exact_likelihood: model has no closed-form likelihood");
      return *ll;
    }
    const auto g = make_guide(guide, c.mode, *model);
    const auto fc = make_filter_config(c, c.pmmh.particles, seed, obs.get());
    return run_filter(c.pmmh.filter, *model, *g, *schedule, data, fc).log_z;
  };
}

}  // namespace bpf
