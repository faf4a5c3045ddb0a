#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bpf/core/filter.hpp"
#include "bpf/harness/config.hpp"
#include "bpf/pmmh/pmmh.hpp"

namespace bpf {

std::unique_ptr<Model> make_model(const ModelConfig& m);
/// nullptr for ObservationKind::none.
std::unique_ptr<ObservationModel> make_observation(const DataConfig& d);

ScheduleSpec schedule_spec(const ExperimentConfig& c);
Schedule make_experiment_schedule(const ExperimentConfig& c);

std::vector<std::string> state_names(ModelKind kind);
/// Data columns: the full state in terminal mode, one per observed
/// component otherwise.
std::vector<std::string> data_columns(const ExperimentConfig& c);

/// Terminal-mode start state: data.x0 padded from the model's defaults.
std::vector<double> initial_state(const ExperimentConfig& c);

/// Fits the guide's free parameters when guide.fit is set: GP parameters
/// from the data series, PD parameters from simulated paths. Returns the
/// guide section with fit cleared so it can be echoed as config text.
GuideConfig fit_guide(const ExperimentConfig& c, const Series& data);

std::unique_ptr<Guide> make_guide(const GuideConfig& g, TargetMode mode, const Model& model);

FilterConfig make_filter_config(const ExperimentConfig& c, std::size_t particles, std::uint64_t seed,
                                const ObservationModel* observation);

FilterOutput run_filter(FilterKind kind, const Model& model, const Guide& guide, const Schedule& schedule,
                        const Series& data, const FilterConfig& config);

/// Exact log-likelihood when the model has a closed-form transition and the
/// mode is terminal_state; nullopt otherwise.
std::optional<double> exact_log_likelihood(const ExperimentConfig& c, const Model& model, const Series& data);

/// Likelihood over the model's parameter vector for pmmh: the closed form
/// when pmmh.exact_likelihood is set, otherwise one run of pmmh.filter with
/// pmmh.particles. Parameters the model rejects give -inf.
LogLikelihood make_likelihood(const ExperimentConfig& c, const Series& data, const GuideConfig& guide);

}  // namespace bpf
