#pragma once

#include <cstdint>
#include <optional>

#include "hawkes/core.hpp"

// Exact sampling of multivariate Hawkes paths. The workhorse is the cluster
// (branching) sampler: Poisson immigrants spawn Poisson offspring trees, no
// rejection involved. An Ogata thinning sampler is provided as an independent
// cross-check; it shares nothing with the cluster code path.

namespace hawkes::sim {

struct SimulationConfig {
  HawkesParams params;
  double end_time = 0.0;
  std::size_t n_samples = 1;
  std::optional<std::uint64_t> seed;
  // Accept mu entries equal to zero (degenerate components without
  // spontaneous activity). Off by default: the admissible set requires mu > 0.
  bool allow_degenerate = false;
  unsigned n_threads = 1;
};

/// Samples n_samples independent paths by the cluster representation.
/// Each sample draws from its own seed-derived substream, so the output is
/// reproducible and independent of the thread count.
/// Throws std::invalid_argument for invalid or super-critical parameters.
Dataset simulate_cluster(const SimulationConfig& config);

/// One path from the cluster sampler, drawn from the substream derived from
/// (root_seed, stream_index) — the same stream simulate_cluster assigns to
/// the sample with that index.
Path simulate_cluster_path(const HawkesParams& params, double end_time, std::uint64_t root_seed,
                           std::uint64_t stream_index);

/// Samples one path by Ogata thinning under a piecewise-constant dominating
/// rate, refreshed after every accepted or rejected candidate. Used as a
/// validation oracle for the cluster sampler.
Path simulate_thinning(const HawkesParams& params, double end_time, std::uint64_t seed);

}  // namespace hawkes::sim
