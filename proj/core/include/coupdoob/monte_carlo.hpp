#ifndef COUPDOOB_MONTE_CARLO_HPP
#define COUPDOOB_MONTE_CARLO_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "coupdoob/chain.hpp"
#include "coupdoob/coupling.hpp"

namespace coupdoob {

// A simulated trajectory. Reproducible: identical (chain, start, steps,
// seed) always give the identical trajectory.
struct PathSample {
    std::vector<std::uint64_t> trajectory; // length steps + 1, starts at x0
    std::uint64_t seed;

    std::size_t steps() const { return trajectory.empty() ? 0 : trajectory.size() - 1; }
};

PathSample sample_path(const FiniteChain &chain, std::size_t x0, std::size_t steps,
                       std::uint64_t seed);
PathSample sample_path(const CountableChain &chain, std::uint64_t x0, std::size_t steps,
                       std::uint64_t seed);

// A coupled trajectory under a coupling kernel. After the first entry into
// the diagonal the two components move together; coupling_time records that
// first entry (in kernel steps), absent when it does not occur within the
// sampled horizon.
struct CoupledSample {
    std::vector<PairKey> trajectory;
    std::optional<std::size_t> coupling_time;
    std::uint64_t seed;
};

CoupledSample sample_coupled(const CouplingKernel &kernel, PairKey z0, std::size_t steps,
                             std::uint64_t seed);

struct McEstimate {
    double point = 0.0;
    double stderr_ = 0.0; // sample standard deviation / sqrt(n_samples)
    std::size_t n_samples = 0;
};

McEstimate bernoulli_estimate(std::size_t successes, std::size_t n_samples);

// Fraction of replicas whose path from x0 hits `target` within `horizon`
// steps. Runs directly on the unbounded state space; no truncation.
McEstimate estimate_hit_probability(const FiniteChain &chain, std::size_t x0, std::size_t target,
                                    std::size_t horizon, std::size_t replicas,
                                    std::uint64_t seed);
McEstimate estimate_hit_probability(const CountableChain &chain, std::uint64_t x0,
                                    std::uint64_t target, std::size_t horizon,
                                    std::size_t replicas, std::uint64_t seed);

// Empirical P(Z^1_n != Z^2_n) for n = 0..n_max over seeded replicas.
std::vector<McEstimate> empirical_uncoupled_tail(const CouplingKernel &kernel, PairKey z0,
                                                 std::size_t n_max, std::size_t replicas,
                                                 std::uint64_t seed);

// Statistics of the coupling attempts at the successive visit times
// tau_k = inf{n > tau_{k-1} : Z_n in C}. Attempt k succeeds when T <= tau_k;
// replicas whose k-th visit does not occur within the horizon count as
// failures for attempt k.
struct AttemptStats {
    double doeblin_p = 0.0;     // the p of the Doeblin set used
    std::size_t replicas = 0;
    std::size_t horizon = 0;
    // visit_times[r] holds the first k_max visit times of replica r.
    std::vector<std::vector<std::uint64_t>> visit_times;
    std::vector<std::optional<std::size_t>> coupling_times;
    std::vector<double> p_hat;               // index k-1 = empirical P(T <= tau_k)
    std::vector<double> p_hat_stderr;
    // Replicas whose tau_k is determined: simulated within the horizon, or
    // known exactly because the pair had already coupled (consecutive visits
    // from the diagonal). The remainder are censored and count as failures.
    std::vector<std::size_t> tau_observed;

    // Success flag of attempt k for one replica: T <= tau_k, both observed.
    // Success at k implies success at every later k.
    bool attempt_succeeded(std::size_t replica, std::size_t k) const;
    // Empirical rate against the recursion lower bound 1 - (1-p)^k.
    bool bound_satisfied(std::size_t k) const;
};

AttemptStats attempt_statistics(const CouplingKernel &kernel, const DoeblinSet &c, PairKey z0,
                                std::size_t replicas, std::size_t horizon, std::uint64_t seed,
                                std::size_t k_max = 8);

} // namespace coupdoob

#endif
