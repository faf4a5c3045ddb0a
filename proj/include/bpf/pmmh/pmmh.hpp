#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bpf/pmmh/prior.hpp"
#include "bpf/pmmh/proposal.hpp"
#include "bpf/random.hpp"

namespace bpf {

/// Log-likelihood estimate at theta. `seed` identifies the filter's random
/// streams for this evaluation; exact likelihoods ignore it.
using LogLikelihood = std::function<double(std::span<const double> theta, std::uint64_t seed)>;

struct ChainState {
  std::vector<double> theta;
  double log_prior = 0.0;
  double log_z = 0.0;
  std::size_t accepted = 0;
  std::size_t iteration = 0;
};

struct ChainTrace {
  std::size_t dim = 0;
  std::vector<double> theta;  // row-major, one row per stored iteration
  std::vector<double> log_z;
  std::vector<std::uint8_t> accepted;

  std::size_t size() const { return log_z.size(); }
  std::span<const double> row(std::size_t i) const { return {theta.data() + i * dim, dim}; }
  std::vector<double> column(std::size_t j) const;
  double acceptance_rate() const;
};

struct PmmhOptions {
  std::size_t steps = 1000;   // stored iterations after burn-in
  std::size_t burn_in = 0;
  std::uint64_t seed = 0;
};

/// Counts likelihood evaluations.
struct PmmhCounters {
  std::size_t likelihood_calls = 0;
  std::size_t out_of_support = 0;
};

/// Starting state: evaluates the prior and one likelihood estimate.
/// Throws if either is not finite.
ChainState init_chain(std::span<const double> theta, const LogLikelihood& loglik, std::span<const ParamPrior> priors,
                      std::uint64_t seed, PmmhCounters* counters = nullptr);

/// One Metropolis-Hastings step using the estimate as the likelihood. A
/// proposal outside the prior support is rejected without evaluating the
/// likelihood; a rejected proposal keeps the current estimate as is.
ChainState pmmh_step(const ChainState& state, const LogLikelihood& loglik, std::span<const ParamPrior> priors,
                     const ProposalSpec& spec, Rng& rng, std::uint64_t seed, PmmhCounters* counters = nullptr);

ChainTrace run_pmmh(std::span<const double> init, const LogLikelihood& loglik, std::span<const ParamPrior> priors,
                    const ProposalSpec& spec, const PmmhOptions& options, PmmhCounters* counters = nullptr);

/// Header: theta names..., log_z, accepted.
void write_trace_csv(std::ostream& os, const ChainTrace& trace, std::span<const std::string> names);

}  // namespace bpf
