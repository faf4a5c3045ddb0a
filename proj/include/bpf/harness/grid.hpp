#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bpf/harness/config.hpp"
#include "bpf/metrics/metrics.hpp"

namespace bpf {

struct RunRecord {
  std::string experiment;
  std::size_t dataset = 0;
  std::size_t particles = 0;
  FilterKind filter = FilterKind::bridge;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  double log_z = 0.0;  // NaN when the run failed
  double elapsed = 0.0;
  std::size_t resample_events = 0;
  double true_log_z = 0.0;  // NaN without a reference
  std::string error;
};

/// Datasets, fitted guides and reference log-likelihoods for a grid.
struct GridInput {
  std::vector<Series> datasets;
  std::vector<GuideConfig> guides;
  std::vector<std::optional<double>> true_log_z;
};

/// Stream seed of one grid cell. Every component is hashed in, so records
/// never share streams and do not depend on execution order.
std::uint64_t record_seed(std::uint64_t master, std::size_t dataset, std::size_t particles, FilterKind filter,
                          std::size_t replicate);

/// Runs f(0..count-1) on `threads` workers. Exceptions are rethrown after
/// all workers finish (the first by index wins).
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& f);

GridInput prepare_grid(const ExperimentConfig& c, std::size_t threads);

/// Every (dataset, N, filter, replicate) combination, ordered by that key.
/// A failing run is recorded with its error and the grid continues.
std::vector<RunRecord> run_grid(const ExperimentConfig& c, const GridInput& input, std::size_t threads);

struct FilterSummary {
  std::size_t runs = 0;
  std::size_t failures = 0;
  std::optional<MetricsReport> report;
};

struct ExperimentMetrics {
  std::string experiment;
  std::size_t dataset = 0;
  std::size_t particles = 0;
  double true_log_z = 0.0;
  FilterSummary bootstrap;
  FilterSummary bridge;
};

/// Groups records by (experiment, dataset, N) in first-seen order.
std::vector<ExperimentMetrics> summarize(const std::vector<RunRecord>& records);

void write_records_csv(std::ostream& os, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_records_csv(std::istream& is);
/// Fixed columns for both filter kinds, NaN where a kind did not run.
void write_metrics_csv(std::ostream& os, const std::vector<ExperimentMetrics>& metrics);

/// Writes both files. Throws if records is empty or a file cannot be written.
void emit_results(const std::vector<RunRecord>& records, const std::string& records_path,
                  const std::string& metrics_path);

}  // namespace bpf
