#include "bpf/harness/grid.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <array>
#include <tuple>

#include "bpf/harness/csv.hpp"
#include "bpf/harness/dataset.hpp"
#include "bpf/harness/factory.hpp"

namespace bpf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kReferenceStream = 0x7265666572656e63ULL;

std::string sanitize(std::string s) {
  for (auto& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return s;
}

double record_time(const ExperimentConfig& c, const FilterOutput& out) {
  return c.timing == TimingMode::work ? static_cast<double>(out.work) * c.work_rate : out.elapsed;
}

}  // namespace

std::uint64_t record_seed(std::uint64_t master, std::size_t dataset, std::size_t particles, FilterKind filter,
                          std::size_t replicate) {
  std::uint64_t k = derive_key(master, dataset);
  k = derive_key(k, particles);
  k = derive_key(k, filter == FilterKind::bootstrap ? 1 : 2);
  return derive_key(k, replicate);
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& f) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

GridInput prepare_grid(const ExperimentConfig& c, std::size_t threads) {
  const std::size_t count = c.data.path.empty() ? c.data.datasets : 1;
  GridInput in;
  in.datasets.resize(count);
  in.guides.resize(count);
  in.true_log_z.resize(count);
  const auto model = make_model(c.model);
  const auto obs = make_observation(c.data);
  const auto schedule = make_experiment_schedule(c);
  parallel_for(count, threads, [&](std::size_t d) {
    in.datasets[d] = experiment_dataset(c, d);
    in.guides[d] = fit_guide(c, in.datasets[d]);
    switch (c.data.reference) {
      case ReferenceKind::none: break;
      case ReferenceKind::exact:
        in.true_log_z[d] = exact_log_likelihood(c, *model, in.datasets[d]);
        if (!in.true_log_z[d])
          throw std::invalid_argument("data.reference: exact needs terminal mode and a closed-form transition");
        break;
      case ReferenceKind::bootstrap: {
        const auto fc = make_filter_config(c, c.data.reference_particles,
                                           derive_key(derive_key(c.seed, kReferenceStream), d), obs.get());
        in.true_log_z[d] = run_bootstrap_filter(*model, schedule, in.datasets[d], fc).log_z;
        break;
      }
    }
  });
  return in;
}

std::vector<RunRecord> run_grid(const ExperimentConfig& c, const GridInput& input, std::size_t threads) {
  const auto model = make_model(c.model);
  const auto obs = make_observation(c.data);
  const auto schedule = make_experiment_schedule(c);
  std::vector<std::unique_ptr<Guide>> guides;
  for (const auto& g : input.guides) guides.push_back(make_guide(g, c.mode, *model));

  std::vector<RunRecord> records;
  for (std::size_t d = 0; d < input.datasets.size(); ++d)
    for (auto n : c.particles)
      for (auto f : c.filters)
        for (std::size_t r = 0; r < c.replicates; ++r) {
          RunRecord rec;
          rec.experiment = c.name;
          rec.dataset = d;
          rec.particles = n;
          rec.filter = f;
          rec.replicate = r;
          rec.seed = record_seed(c.seed, d, n, f, r);
          rec.true_log_z = input.true_log_z[d] ? *input.true_log_z[d] : kNaN;
          records.push_back(std::move(rec));
        }

  parallel_for(records.size(), threads, [&](std::size_t i) {
    auto& rec = records[i];
    try {
      const auto fc = make_filter_config(c, rec.particles, rec.seed, obs.get());
      const auto out = run_filter(rec.filter, *model, *guides[rec.dataset], schedule, input.datasets[rec.dataset], fc);
      rec.log_z = out.log_z;
      rec.elapsed = record_time(c, out);
      rec.resample_events = out.resample_events.size();
    } catch (const std::exception& e) {
      rec.log_z = kNaN;
      rec.elapsed = kNaN;
      rec.error = sanitize(e.what());
    }
  });
  return records;
}

std::vector<ExperimentMetrics> summarize(const std::vector<RunRecord>& records) {
  using Key = std::tuple<std::string, std::size_t, std::size_t>;
  std::map<Key, std::size_t> index;
  std::vector<ExperimentMetrics> out;
  std::vector<std::array<EstimateBatch, 2>> batches;
  for (const auto& r : records) {
    const Key key{r.experiment, r.dataset, r.particles};
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      ExperimentMetrics m;
      m.experiment = r.experiment;
      m.dataset = r.dataset;
      m.particles = r.particles;
      m.true_log_z = r.true_log_z;
      out.push_back(m);
      batches.emplace_back();
    }
    auto& m = out[it->second];
    const int f = r.filter == FilterKind::bootstrap ? 0 : 1;
    auto& s = f == 0 ? m.bootstrap : m.bridge;
    ++s.runs;
    if (std::isnan(r.log_z) || !r.error.empty()) {
      ++s.failures;
      continue;
    }
    batches[it->second][f].log_z.push_back(r.log_z);
    batches[it->second][f].times.push_back(r.elapsed);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (int f = 0; f < 2; ++f) {
      auto& b = batches[i][f];
      if (b.log_z.empty()) continue;
      if (!std::isnan(out[i].true_log_z)) b.true_log_z = out[i].true_log_z;
      (f == 0 ? out[i].bootstrap : out[i].bridge).report = time_adjusted(b);
    }
  }
  return out;
}

void write_records_csv(std::ostream& os, const std::vector<RunRecord>& records) {
  os << "experiment,dataset,particles,filter,replicate,seed,log_z,elapsed,resample_events,true_log_z,error\n";
  for (const auto& r : records) {
    os << sanitize(r.experiment) << ',' << r.dataset << ',' << r.particles << ',' << to_string(r.filter) << ','
       << r.replicate << ',' << r.seed << ',' << format_double(r.log_z) << ',' << format_double(r.elapsed) << ','
       << r.resample_events << ',' << format_double(r.true_log_z) << ',' << sanitize(r.error) << '\n';
  }
}

std::vector<RunRecord> read_records_csv(std::istream& is) {
  const auto t = read_csv_table(is);
  const auto c_exp = t.column("experiment"), c_ds = t.column("dataset"), c_n = t.column("particles"),
             c_f = t.column("filter"), c_rep = t.column("replicate"), c_seed = t.column("seed"),
             c_lz = t.column("log_z"), c_el = t.column("elapsed"), c_rs = t.column("resample_events"),
             c_true = t.column("true_log_z"), c_err = t.column("error");
  std::vector<RunRecord> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    try {
      RunRecord r;
      r.experiment = row[c_exp];
      r.dataset = std::stoul(row[c_ds]);
      r.particles = std::stoul(row[c_n]);
      r.filter = parse_filter_kind(row[c_f]);
      r.replicate = std::stoul(row[c_rep]);
      r.seed = std::stoull(row[c_seed]);
      r.log_z = parse_double(row[c_lz]);
      r.elapsed = parse_double(row[c_el]);
      r.resample_events = std::stoul(row[c_rs]);
      r.true_log_z = parse_double(row[c_true]);
      r.error = row[c_err];
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::invalid_argument("records: data row " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

void write_metrics_csv(std::ostream& os, const std::vector<ExperimentMetrics>& metrics) {
  os << "experiment,dataset,particles,true_log_z";
  for (const char* f : {"bootstrap", "bridge"})
    for (const char* col : {"runs", "failures", "mse", "ess", "car", "mean_time", "mse_metric", "ess_metric",
                            "car_metric"})
      os << ',' << f << '_' << col;
  os << '\n';
  for (const auto& m : metrics) {
    os << sanitize(m.experiment) << ',' << m.dataset << ',' << m.particles << ',' << format_double(m.true_log_z);
    for (const auto* s : {&m.bootstrap, &m.bridge}) {
      os << ',' << s->runs << ',' << s->failures;
      if (s->report) {
        const auto& r = *s->report;
        for (double v : {r.mse, r.ess, r.car, r.mean_time, r.mse_metric, r.ess_metric, r.car_metric})
          os << ',' << format_double(v);
      } else {
        for (int k = 0; k < 7; ++k) os << ",nan";
      }
    }
    os << '\n';
  }
}

void emit_results(const std::vector<RunRecord>& records, const std::string& records_path,
                  const std::string& metrics_path) {
  if (records.empty()) throw std::invalid_argument("emit_results: no records");
  std::ofstream rf(records_path);
  if (!rf) throw std::runtime_error("cannot write '" + records_path + "'");
  write_records_csv(rf, records);
  std::ofstream mf(metrics_path);
  if (!mf) throw std::runtime_error("cannot write '" + metrics_path + "'");
  write_metrics_csv(mf, summarize(records));
  if (!rf || !mf) throw std::runtime_error("error while writing results");
}

}  // namespace bpf
