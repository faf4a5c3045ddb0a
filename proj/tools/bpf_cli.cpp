// Command-line front end: simulate, fit-guide, filter, grid, pmmh, metrics.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bpf/core/log_math.hpp"
#include "bpf/harness/config.hpp"
#include "bpf/harness/csv.hpp"
#include "bpf/harness/dataset.hpp"
#include "bpf/harness/factory.hpp"
#include "bpf/harness/grid.hpp"
#include "bpf/metrics/metrics.hpp"
#include "bpf/pmmh/pmmh.hpp"

using namespace bpf;

namespace {

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string data;
};

ConfigOverrides overrides(const std::vector<std::string>& sets) {
  ConfigOverrides o;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects section.key=value, got '" + s + "'");
    o[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return o;
}

ExperimentConfig load(const Common& c) {
  if (c.config.empty()) return parse_config("", overrides(c.sets));
  return load_config(c.config, overrides(c.sets));
}

Series data_for(const ExperimentConfig& cfg, const Common& c) {
  if (!c.data.empty()) return load_csv_file(c.data, data_columns(cfg));
  return experiment_dataset(cfg, 0);
}

void add_common(CLI::App* app, Common& c, bool with_data) {
  app->add_option("-c,--config", c.config, "experiment config (INI)");
  app->add_option("-s,--set", c.sets, "override a config key: section.key=value")->take_all();
  if (with_data) app->add_option("-d,--data", c.data, "observation CSV (default: simulated dataset 0)");
}

std::ostream& open_out(const std::string& path, std::ofstream& f) {
  if (path.empty() || path == "-") return std::cout;
  f.open(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bridge and bootstrap particle filters for diffusion processes"};
  app.require_subcommand(1);

  Common sim_c;
  std::size_t sim_index = 0;
  std::string sim_out;
  auto* sim = app.add_subcommand("simulate", "simulate a dataset from the config");
  add_common(sim, sim_c, false);
  sim->add_option("-i,--index", sim_index, "dataset index");
  sim->add_option("-o,--out", sim_out, "output CSV (default stdout)");

  Common fit_c;
  auto* fit = app.add_subcommand("fit-guide", "fit guide parameters; prints a [guide] section");
  add_common(fit, fit_c, true);

  Common filt_c;
  std::string filt_kind = "bridge";
  std::size_t filt_n = 0;
  std::uint64_t filt_seed = 0;
  bool filt_seed_set = false;
  auto* filt = app.add_subcommand("filter", "run one filter and print its estimate");
  add_common(filt, filt_c, true);
  filt->add_option("-f,--filter", filt_kind, "bridge or bootstrap");
  filt->add_option("-n,--particles", filt_n, "particle count (default: first of experiment.particles)");
  filt->add_option("--seed", filt_seed, "stream seed")->each([&](const std::string&) { filt_seed_set = true; });

  Common grid_c;
  std::size_t grid_threads = 0;
  std::string grid_records, grid_metrics;
  auto* grid = app.add_subcommand("grid", "run the replicated comparison grid");
  add_common(grid, grid_c, false);
  grid->add_option("-t,--threads", grid_threads, "worker threads (default: config, BPF_THREADS, hardware)");
  grid->add_option("--records", grid_records, "raw records CSV (default: output.records)");
  grid->add_option("--metrics", grid_metrics, "metrics CSV (default: output.metrics)");

  Common pm_c;
  std::string pm_out;
  auto* pm = app.add_subcommand("pmmh", "run a particle marginal Metropolis-Hastings chain");
  add_common(pm, pm_c, true);
  pm->add_option("-o,--out", pm_out, "trace CSV (default: pmmh.trace)");

  std::string met_in, met_out;
  auto* met = app.add_subcommand("metrics", "recompute metrics from a records CSV");
  met->add_option("-r,--records", met_in, "records CSV")->required();
  met->add_option("-o,--out", met_out, "metrics CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (sim->parsed()) {
      const auto cfg = load(sim_c);
      const auto series = experiment_dataset(cfg, sim_index);
      std::ofstream f;
      write_series_csv(open_out(sim_out, f), series, data_columns(cfg));
    } else if (fit->parsed()) {
      auto cfg = load(fit_c);
      cfg.guide.fit = true;
      const auto data = data_for(cfg, fit_c);
      cfg.guide = fit_guide(cfg, data);
      const auto text = to_text(cfg);
      const auto b = text.find("[guide]");
      const auto e = text.find("\n[", b);
      std::cout << text.substr(b, e == std::string::npos ? std::string::npos : e - b + 1);
    } else if (filt->parsed()) {
      const auto cfg = load(filt_c);
      const auto data = data_for(cfg, filt_c);
      const auto model = make_model(cfg.model);
      const auto obs = make_observation(cfg.data);
      const auto guide_cfg = fit_guide(cfg, data);
      const auto guide = make_guide(guide_cfg, cfg.mode, *model);
      const auto schedule = make_experiment_schedule(cfg);
      const std::size_t n = filt_n ? filt_n : cfg.particles.front();
      const auto fc = make_filter_config(cfg, n, filt_seed_set ? filt_seed : cfg.seed, obs.get());
      const auto out = run_filter(parse_filter_kind(filt_kind), *model, *guide, schedule, data, fc);
      std::cout << "log_z = " << format_double(out.log_z) << "\n"
                << "elapsed = " << format_double(out.elapsed) << "\n"
                << "work = " << out.work << "\n"
                << "resample_events = " << out.resample_events.size() << "\n"
                << "degenerate = " << (out.degenerate ? "true" : "false") << "\n";
      if (const auto exact = exact_log_likelihood(cfg, *model, data))
        std::cout << "exact_log_z = " << format_double(*exact) << "\n";
    } else if (grid->parsed()) {
      const auto cfg = load(grid_c);
      const auto threads = resolve_threads(grid_threads ? grid_threads : cfg.threads);
      const auto input = prepare_grid(cfg, threads);
      const auto records = run_grid(cfg, input, threads);
      emit_results(records, grid_records.empty() ? cfg.records : grid_records,
                   grid_metrics.empty() ? cfg.metrics : grid_metrics);
      std::size_t failed = 0;
      for (const auto& r : records) failed += r.error.empty() ? 0 : 1;
      std::cerr << records.size() << " runs, " << failed << " failed\n";
    } else if (pm->parsed()) {
      const auto cfg = load(pm_c);
      const auto data = data_for(cfg, pm_c);
      const auto guide = fit_guide(cfg, data);
      const auto names = parameter_names(cfg.model.kind);
      const auto& priors = cfg.pmmh.priors;
      if (priors.size() != names.size()) throw std::invalid_argument("pmmh.priors: one prior per model parameter");
      const auto init = cfg.pmmh.init.empty() ? model_parameters(cfg.model) : cfg.pmmh.init;
      if (cfg.pmmh.proposal_sd.size() != names.size())
        throw std::invalid_argument("pmmh.proposal_sd: one value per model parameter");
      auto spec = ProposalSpec::diagonal(cfg.pmmh.proposal_sd);
      if (cfg.pmmh.transform) set_transforms_from_priors(spec, priors);
      PmmhCounters counters;
      const auto trace = run_pmmh(init, make_likelihood(cfg, data, guide), priors, spec,
                                  {cfg.pmmh.steps, cfg.pmmh.burn_in, cfg.seed}, &counters);
      std::ofstream f;
      write_trace_csv(open_out(pm_out.empty() ? cfg.pmmh.trace : pm_out, f), trace, names);
      std::vector<std::vector<double>> cols;
      for (std::size_t j = 0; j < names.size(); ++j) cols.push_back(trace.column(j));
      std::cerr << "acceptance_rate = " << format_double(trace.acceptance_rate()) << "\n"
                << "likelihood_calls = " << counters.likelihood_calls << "\n";
      if (trace.size() > cfg.pmmh.max_lag) {
        const auto ess = ess_mcmc(cols, cfg.pmmh.max_lag);
        std::cerr << "ess_mcmc = " << format_double(ess.value) << (ess.degenerate ? " (degenerate)" : "") << "\n";
      }
    } else if (met->parsed()) {
      std::ifstream in(met_in);
      if (!in) throw std::runtime_error("cannot open '" + met_in + "'");
      const auto records = read_records_csv(in);
      std::ofstream f;
      write_metrics_csv(open_out(met_out, f), summarize(records));
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
