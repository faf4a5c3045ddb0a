#include "bpf/pmmh/pmmh.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "bpf/harness/csv.hpp"

namespace bpf {

namespace {

constexpr std::uint64_t kProposalStream = 0x70726f706f736531ULL;
constexpr std::uint64_t kLikelihoodStream = 0x6c696b656c69686fULL;

double call(const LogLikelihood& f, std::span<const double> theta, std::uint64_t seed, PmmhCounters* c) {
  if (c) ++c->likelihood_calls;
  const double v = f(theta, seed);
  return std::isnan(v) ? -INFINITY : v;
}

}  // namespace

std::vector<double> ChainTrace::column(std::size_t j) const {
  if (j >= dim) throw std::out_of_range("ChainTrace::column");
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = theta[i * dim + j];
  return out;
}

double ChainTrace::acceptance_rate() const {
  if (accepted.empty()) return 0.0;
  std::size_t n = 0;
  for (auto a : accepted) n += a;
  return static_cast<double>(n) / static_cast<double>(accepted.size());
}

ChainState init_chain(std::span<const double> theta, const LogLikelihood& loglik, std::span<const ParamPrior> priors,
                      std::uint64_t seed, PmmhCounters* counters) {
  ChainState s;
  s.theta.assign(theta.begin(), theta.end());
  s.log_prior = log_prior(theta, priors);
  if (!std::isfinite(s.log_prior)) throw std::invalid_argument("pmmh: initial parameters outside prior support");
  s.log_z = call(loglik, theta, seed, counters);
  if (!std::isfinite(s.log_z)) throw std::invalid_argument("pmmh: initial likelihood estimate is not finite");
  return s;
}

ChainState pmmh_step(const ChainState& state, const LogLikelihood& loglik, std::span<const ParamPrior> priors,
                     const ProposalSpec& spec, Rng& rng, std::uint64_t seed, PmmhCounters* counters) {
  ChainState next = state;
  ++next.iteration;
  const auto prop = propose(state.theta, spec, rng);
  const double u = rng.uniform();
  const double lp = log_prior(prop, priors);
  if (lp == -INFINITY) {
    if (counters) ++counters->out_of_support;
    return next;
  }
  const double lz = call(loglik, prop, seed, counters);
  if (lz == -INFINITY) return next;
  // Random walk on the transformed scale: the Jacobian enters the target.
  const double log_ratio = (lz + lp + log_jacobian(prop, spec)) -
                           (state.log_z + state.log_prior + log_jacobian(state.theta, spec));
  if (log_ratio >= 0.0 || std::log(u) < log_ratio) {
    next.theta = prop;
    next.log_prior = lp;
    next.log_z = lz;
    ++next.accepted;
  }
  return next;
}

ChainTrace run_pmmh(std::span<const double> init, const LogLikelihood& loglik, std::span<const ParamPrior> priors,
                    const ProposalSpec& spec, const PmmhOptions& options, PmmhCounters* counters) {
  spec.validate();
  if (init.size() != spec.dim() || priors.size() != spec.dim())
    throw std::invalid_argument("pmmh: dimension mismatch between init, priors and proposal");
  Rng rng(options.seed, kProposalStream);
  auto seed_for = [&](std::size_t it) { return derive_key(derive_key(options.seed, kLikelihoodStream), it); };

  ChainState s = init_chain(init, loglik, priors, seed_for(0), counters);
  ChainTrace trace;
  trace.dim = init.size();
  trace.theta.reserve(options.steps * trace.dim);
  trace.log_z.reserve(options.steps);
  trace.accepted.reserve(options.steps);
  const std::size_t total = options.burn_in + options.steps;
  for (std::size_t it = 1; it <= total; ++it) {
    const std::size_t before = s.accepted;
    s = pmmh_step(s, loglik, priors, spec, rng, seed_for(it), counters);
    if (it <= options.burn_in) continue;
    trace.theta.insert(trace.theta.end(), s.theta.begin(), s.theta.end());
    trace.log_z.push_back(s.log_z);
    trace.accepted.push_back(s.accepted != before ? 1 : 0);
  }
  return trace;
}

void write_trace_csv(std::ostream& os, const ChainTrace& trace, std::span<const std::string> names) {
  if (names.size() != trace.dim) throw std::invalid_argument("write_trace_csv: name count");
  for (const auto& n : names) os << n << ',';
  os << "log_z,accepted\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    for (double v : trace.row(i)) os << format_double(v) << ',';
    os << format_double(trace.log_z[i]) << ',' << int(trace.accepted[i]) << '\n';
  }
}

}  // namespace bpf
