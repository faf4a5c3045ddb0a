#include "bpf/harness/dataset.hpp"

#include <stdexcept>

#include "bpf/harness/csv.hpp"
#include "bpf/harness/factory.hpp"

namespace bpf {

namespace {
constexpr std::uint64_t kDatasetStream = 0x6461746173657400ULL;
}

Series simulate_dataset(const Model& model, std::span<const double> x0, const Schedule& schedule,
                        const ObservationModel* observation, Rng& rng) {
  schedule.validate();
  std::vector<double> x(model.dim());
  if (x0.empty()) {
    model.sample_initial(x, rng);
  } else {
    if (x0.size() != model.dim()) throw std::invalid_argument("simulate_dataset: x0 has the wrong dimension");
    x.assign(x0.begin(), x0.end());
  }
  Series out;
  auto record = [&](double t) {
    Observation o{t, {}};
    o.values = observation ? observation->sample(x, rng) : x;
    out.push_back(std::move(o));
  };
  if (schedule.obs[0]) record(schedule.times[0]);
  for (std::size_t j = 1; j < schedule.size(); ++j) {
    model.propagate(x, schedule.times[j - 1], schedule.times[j] - schedule.times[j - 1], rng);
    if (schedule.obs[j]) record(schedule.times[j]);
  }
  return out;
}

Series experiment_dataset(const ExperimentConfig& c, std::size_t index) {
  if (!c.data.path.empty()) {
    const auto cols = data_columns(c);
    return load_csv_file(c.data.path, cols);
  }
  const auto model = make_model(c.model);
  const auto obs = c.mode == TargetMode::observed ? make_observation(c.data) : nullptr;
  const auto schedule = make_experiment_schedule(c);
  Rng rng(derive_key(c.seed, kDatasetStream), index);
  std::vector<double> x0;
  if (!c.data.x0_from_prior) x0 = initial_state(c);
  return simulate_dataset(*model, x0, schedule, obs.get(), rng);
}

}  // namespace bpf
