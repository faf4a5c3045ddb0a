#pragma once

#include <optional>
#include <span>

#include "bpf/core/schedule.hpp"
#include "bpf/harness/config.hpp"
#include "bpf/models/model.hpp"

namespace bpf {

/// Simulates the model over the schedule's fine grid from x0 (or from the
/// model prior when x0 is empty) and records one observation per
/// observation time: the full state when `observation` is null, otherwise a
/// draw from the observation model.
Series simulate_dataset(const Model& model, std::span<const double> x0, const Schedule& schedule,
                        const ObservationModel* observation, Rng& rng);

/// Dataset `index` of an experiment, simulated from the config with a seed
/// derived from the master seed, or loaded from data.path.
Series experiment_dataset(const ExperimentConfig& c, std::size_t index);

}  // namespace bpf
