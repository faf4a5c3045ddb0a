#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bpf/core/filter.hpp"
#include "bpf/guides/gp.hpp"
#include "bpf/guides/guide.hpp"
#include "bpf/guides/pd_guide.hpp"
#include "bpf/models/ou.hpp"
#include "bpf/models/pd.hpp"
#include "bpf/models/sir.hpp"
#include "bpf/pmmh/prior.hpp"

namespace bpf {

enum class ModelKind { ou, pd, sir };
ModelKind parse_model_kind(std::string_view name);
std::string_view to_string(ModelKind k);

enum class FilterKind { bootstrap, bridge };
FilterKind parse_filter_kind(std::string_view name);
std::string_view to_string(FilterKind k);

/// wall: elapsed seconds around each filter call. work: work units times
/// `work_rate`, reproducible across runs and thread counts.
enum class TimingMode { wall, work };

enum class ObservationKind { none, gaussian, epsilon };

struct ModelConfig {
  ModelKind kind = ModelKind::ou;
  OuParams ou;
  PdParams pd;
  SirParams sir;
  double abs_tol = 1e-2;  // sir integrator
  double rel_tol = 1e-5;
};

struct ScheduleConfig {
  double t0 = 0.0;
  std::vector<double> obs_times;  // explicit; otherwise obs_count * obs_spacing
  std::size_t obs_count = 100;
  double obs_spacing = 1.0;
  double bridge_step = 0.1;
  double sim_step = 0.01;

  std::vector<double> observation_times() const;
};

enum class ReferenceKind { none, exact, bootstrap };

struct DataConfig {
  std::string path;  // CSV; empty means simulate `datasets` series
  std::size_t datasets = 4;
  std::vector<double> x0{0.0};  // terminal mode start state, also the simulation start
  bool x0_from_prior = false;   // simulate from the model prior instead of x0
  ObservationKind observation = ObservationKind::none;
  std::vector<std::size_t> components{0};
  std::vector<double> obs_variance{1.0};  // gaussian
  double epsilon = 0.02;                  // epsilon ball
  ReferenceKind reference = ReferenceKind::exact;
  std::size_t reference_particles = 16384;
};

struct GuideConfig {
  GuideKind kind = GuideKind::exact_transition;
  bool fit = false;  // estimate GP or PD parameters from data
  double power = 1.0;
  double inflation = 1.0;
  double obs_variance = 0.0;
  std::vector<std::size_t> components{0};
  std::vector<double> alpha{1.0};
  std::vector<double> beta{1.0};
  std::vector<double> mean{0.0};
  PdGuideParams pd;
};

struct PmmhConfig {
  std::size_t steps = 1000;
  std::size_t burn_in = 100;
  FilterKind filter = FilterKind::bridge;
  bool exact_likelihood = false;
  std::size_t particles = 256;
  std::vector<ParamPrior> priors;
  std::vector<double> init;
  std::vector<double> proposal_sd;
  bool transform = false;  // log/logit scale chosen from each prior's support
  std::size_t max_lag = 250;
  std::string trace = "trace.csv";
};

struct ExperimentConfig {
  std::string name = "experiment";
  ModelConfig model;
  GuideConfig guide;
  ScheduleConfig schedule;
  DataConfig data;
  std::vector<FilterKind> filters{FilterKind::bootstrap, FilterKind::bridge};
  std::vector<std::size_t> particles{32, 64, 128, 256};
  std::size_t replicates = 256;
  double rel_threshold = 0.5;
  ResamplerKind resampler = ResamplerKind::systematic;
  TargetMode mode = TargetMode::terminal_state;
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0: BPF_THREADS, else hardware concurrency
  TimingMode timing = TimingMode::wall;
  double work_rate = 1e-8;
  std::string records = "records.csv";
  std::string metrics = "metrics.csv";
  PmmhConfig pmmh;

  void validate() const;
};

/// "section.key" -> value, applied after the text is read.
using ConfigOverrides = std::map<std::string, std::string>;

/// INI text with [experiment], [model], [ou], [pd], [sir], [schedule],
/// [data], [guide], [output] and [pmmh] sections. Unknown sections or keys
/// and out-of-range values throw std::invalid_argument naming the key.
ExperimentConfig parse_config(std::string_view text, const ConfigOverrides& overrides = {});
ExperimentConfig load_config(const std::string& path, const ConfigOverrides& overrides = {});

/// Every setting, defaults included; parse_config(to_text(c)) reproduces c.
std::string to_text(const ExperimentConfig& c);

/// Parameter vector used by pmmh for each model kind, and its inverse.
std::vector<std::string> parameter_names(ModelKind kind);
std::vector<double> model_parameters(const ModelConfig& m);
ModelConfig with_parameters(const ModelConfig& m, std::span<const double> theta);

/// Thread count from an explicit value, then BPF_THREADS, then the hardware.
std::size_t resolve_threads(std::size_t requested);

}  // namespace bpf
