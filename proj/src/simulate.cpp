#include "hawkes/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>

#include "hawkes/parallel.hpp"

namespace hawkes {

unsigned default_thread_count() {
  if (const char* env = std::getenv("HAWKES_NUM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

}  // namespace hawkes

namespace hawkes::sim {

namespace {

std::mt19937_64 substream(std::uint64_t root, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(root & 0xffffffffu),
                    static_cast<std::uint32_t>(root >> 32),
                    static_cast<std::uint32_t>(index & 0xffffffffu),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

void check_simulable(const HawkesParams& params, double end_time, bool allow_degenerate) {
  if (!(end_time > 0.0)) {
    throw std::invalid_argument("end_time must be positive");
  }
  const ValidationReport report = validate(params);
  if (!report.shapes_ok) {
    throw std::invalid_argument(report.errors.front());
  }
  if (!report.positivity_ok) {
    const bool only_mu_zero = allow_degenerate && params.beta > 0.0 &&
                              (params.mu.array() >= 0.0).all() &&
                              (params.alpha.array() >= 0.0).all();
    if (!only_mu_zero) {
      throw std::invalid_argument("invalid parameters: " + report.errors.front());
    }
  }
  if (!report.sub_critical) {
    throw std::invalid_argument("simulation requires a sub-critical process (spectral radius " +
                                std::to_string(report.spectral_radius) + " >= 1)");
  }
}

struct Event {
  double time;
  Eigen::Index dim;
};

Path sample_cluster_path(const HawkesParams& params, double end_time, std::mt19937_64& rng) {
  const Eigen::Index d = params.dim();
  std::vector<std::vector<double>> events(static_cast<std::size_t>(d));
  std::vector<Event> ancestors;

  // Immigrants: homogeneous Poisson of rate mu_j on [0, T].
  for (Eigen::Index j = 0; j < d; ++j) {
    if (params.mu[j] == 0.0) continue;
    std::poisson_distribution<long> count(params.mu[j] * end_time);
    std::uniform_real_distribution<double> position(0.0, end_time);
    const long k = count(rng);
    for (long l = 0; l < k; ++l) {
      const double t = position(rng);
      if (t < end_time) {
        events[static_cast<std::size_t>(j)].push_back(t);
        ancestors.push_back({t, j});
      }
    }
  }

  // Offspring generations until extinction. An ancestor of type k spawns a
  // Poisson(alpha(j, k)) brood in dimension j at exponential lags; children
  // at or beyond T are dropped immediately (they could only parent events
  // beyond T themselves).
  std::exponential_distribution<double> lag(params.beta);
  std::vector<Event> next_generation;
  while (!ancestors.empty()) {
    next_generation.clear();
    for (const Event& parent : ancestors) {
      for (Eigen::Index j = 0; j < d; ++j) {
        const double a = params.alpha(j, parent.dim);
        if (a == 0.0) continue;
        std::poisson_distribution<long> brood(a);
        const long k = brood(rng);
        for (long l = 0; l < k; ++l) {
          const double t = parent.time + lag(rng);
          if (t < end_time) {
            events[static_cast<std::size_t>(j)].push_back(t);
            next_generation.push_back({t, j});
          }
        }
      }
    }
    ancestors.swap(next_generation);
  }

  for (auto& ts : events) {
    std::sort(ts.begin(), ts.end());
    // A duplicate timestamp has probability zero but would violate the Path
    // invariant; nudge it by one ulp if it ever happens.
    for (std::size_t l = 1; l < ts.size(); ++l) {
      if (ts[l] <= ts[l - 1]) {
        ts[l] = std::nextafter(ts[l - 1], end_time);
      }
    }
    while (!ts.empty() && ts.back() >= end_time) ts.pop_back();
  }
  return Path(std::move(events), end_time);
}

}  // namespace

Dataset simulate_cluster(const SimulationConfig& config) {
  check_simulable(config.params, config.end_time, config.allow_degenerate);
  if (config.n_samples == 0) {
    throw std::invalid_argument("n_samples must be positive");
  }
  const std::uint64_t root = config.seed ? *config.seed : std::random_device{}();

  std::vector<std::optional<Path>> slots(config.n_samples);
  parallel_for(config.n_samples, config.n_threads, [&](std::size_t i) {
    std::mt19937_64 rng = substream(root, i);
    slots[i] = sample_cluster_path(config.params, config.end_time, rng);
  });

  std::vector<Path> paths;
  paths.reserve(config.n_samples);
  for (auto& slot : slots) paths.push_back(std::move(*slot));
  return Dataset(std::move(paths), config.end_time);
}

Path simulate_cluster_path(const HawkesParams& params, double end_time, std::uint64_t root_seed,
                           std::uint64_t stream_index) {
  check_simulable(params, end_time, /*allow_degenerate=*/true);
  std::mt19937_64 rng = substream(root_seed, stream_index);
  return sample_cluster_path(params, end_time, rng);
}

Path simulate_thinning(const HawkesParams& params, double end_time, std::uint64_t seed) {
  check_simulable(params, end_time, /*allow_degenerate=*/true);
  const Eigen::Index d = params.dim();
  std::mt19937_64 rng = substream(seed, 0);
  std::exponential_distribution<double> unit_exp(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::vector<double>> events(static_cast<std::size_t>(d));
  // g[k] = sum over past events of dimension k of beta * exp(-beta (t - s)),
  // evaluated just after the current time. Between events every g[k] decays,
  // so mu + alpha * g bounds the future intensity from above.
  Vector g = Vector::Zero(d);
  const double mu_total = params.mu.sum();
  double t = 0.0;

  while (true) {
    const double bound = mu_total + (params.alpha * g).sum();
    if (bound <= 0.0) break;  // degenerate: nothing can ever fire
    const double wait = unit_exp(rng) / bound;
    const double candidate = t + wait;
    if (candidate >= end_time) break;

    g *= std::exp(-params.beta * wait);
    Vector lambda = params.mu + params.alpha * g;
    const double total = lambda.sum();
    t = candidate;
    if (unit(rng) * bound <= total) {
      // Accepted: attribute the event to a dimension proportionally.
      double u = unit(rng) * total;
      Eigen::Index j = 0;
      for (; j + 1 < d; ++j) {
        if (u < lambda[j]) break;
        u -= lambda[j];
      }
      auto& ts = events[static_cast<std::size_t>(j)];
      if (!ts.empty() && candidate <= ts.back()) continue;
      ts.push_back(candidate);
      g[j] += params.beta;
    }
  }
  return Path(std::move(events), end_time);
}

}  // namespace hawkes::sim
