#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "bpf/random.hpp"

namespace bpf {

enum class ResamplerKind { systematic, multinomial };

ResamplerKind parse_resampler(std::string_view name);
std::string_view to_string(ResamplerKind kind);

// Both resamplers throw std::runtime_error when every weight is -inf.
// Returned parent indices are sorted ascending.

/// N i.i.d. draws with probability proportional to exp(logw).
std::vector<std::size_t> resample_multinomial(std::span<const double> logw, std::size_t n, Rng& rng);

/// One uniform offset, N evenly spaced points. Index j is selected
/// floor(N W_j) or ceil(N W_j) times.
std::vector<std::size_t> resample_systematic(std::span<const double> logw, std::size_t n, Rng& rng);

std::vector<std::size_t> resample(ResamplerKind kind, std::span<const double> logw, std::size_t n, Rng& rng);

}  // namespace bpf
