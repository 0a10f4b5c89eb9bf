#include "coupdoob/monte_carlo.hpp"

#include <algorithm>
#include <cmath>

#include "coupdoob/errors.hpp"
#include "coupdoob/parallel.hpp"
#include "coupdoob/rng.hpp"

namespace coupdoob {

namespace {

// Inverse-CDF draw over a sparse row in ascending target order.
std::size_t draw(const SparseRow &row, double u) {
    double cum = 0.0;
    for (const Transition &t : row) {
        cum += t.probability;
        if (u < cum)
            return t.target;
    }
    return row.back().target;
}

PairKey draw(const JointDist &row, double u) {
    double cum = 0.0;
    const auto &entries = row.entries();
    for (const JointDist::Entry &e : entries) {
        cum += e.second;
        if (u < cum)
            return e.first;
    }
    return entries.back().first;
}

} // namespace

PathSample sample_path(const FiniteChain &chain, std::size_t x0, std::size_t steps,
                       std::uint64_t seed) {
    if (x0 >= chain.size())
        throw InputError("sample_path: start state out of range");
    SplitMix64 rng(seed);
    PathSample out;
    out.seed = seed;
    out.trajectory.reserve(steps + 1);
    std::size_t state = x0;
    out.trajectory.push_back(state);
    for (std::size_t i = 0; i < steps; ++i) {
        state = draw(chain.row(state), rng.next_unit());
        out.trajectory.push_back(state);
    }
    return out;
}

PathSample sample_path(const CountableChain &chain, std::uint64_t x0, std::size_t steps,
                       std::uint64_t seed) {
    SplitMix64 rng(seed);
    PathSample out;
    out.seed = seed;
    out.trajectory.reserve(steps + 1);
    std::uint64_t state = x0;
    out.trajectory.push_back(state);
    for (std::size_t i = 0; i < steps; ++i) {
        state = chain.step(state, rng.next_unit());
        out.trajectory.push_back(state);
    }
    return out;
}

CoupledSample sample_coupled(const CouplingKernel &kernel, PairKey z0, std::size_t steps,
                             std::uint64_t seed) {
    const FiniteChain &chain = kernel.step_chain();
    if (z0.first >= chain.size() || z0.second >= chain.size())
        throw InputError("sample_coupled: start pair out of range");
    SplitMix64 rng(seed);
    CoupledSample out;
    out.seed = seed;
    out.trajectory.reserve(steps + 1);
    PairKey z = z0;
    out.trajectory.push_back(z);
    if (z.diagonal())
        out.coupling_time = 0;
    for (std::size_t i = 0; i < steps; ++i) {
        if (out.coupling_time) {
            // Coupled components move together from the single-site row.
            std::size_t y = draw(chain.row(z.first), rng.next_unit());
            z = {y, y};
        } else {
            z = draw(kernel.row(z), rng.next_unit());
            if (z.diagonal())
                out.coupling_time = i + 1;
        }
        out.trajectory.push_back(z);
    }
    return out;
}

McEstimate bernoulli_estimate(std::size_t successes, std::size_t n_samples) {
    McEstimate est;
    est.n_samples = n_samples;
    if (n_samples == 0)
        return est;
    double p = static_cast<double>(successes) / static_cast<double>(n_samples);
    est.point = p;
    if (n_samples > 1) {
        double var = p * (1.0 - p) * static_cast<double>(n_samples) /
                     static_cast<double>(n_samples - 1);
        est.stderr_ = std::sqrt(var / static_cast<double>(n_samples));
    }
    return est;
}

namespace {

template <typename StepFn>
McEstimate hit_probability_impl(StepFn step, std::uint64_t x0, std::uint64_t target,
                                std::size_t horizon, std::size_t replicas, std::uint64_t seed) {
    if (replicas < 1)
        throw InputError("estimate_hit_probability: replicas must be >= 1");
    std::vector<std::uint8_t> hit(replicas, 0);
    parallel_blocks(replicas, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            SplitMix64 rng = SplitMix64::stream(seed, r);
            std::uint64_t state = x0;
            if (state == target) {
                hit[r] = 1;
                continue;
            }
            for (std::size_t n = 0; n < horizon; ++n) {
                state = step(state, rng.next_unit());
                if (state == target) {
                    hit[r] = 1;
                    break;
                }
            }
        }
    });
    std::size_t successes = 0;
    for (std::uint8_t h : hit)
        successes += h;
    return bernoulli_estimate(successes, replicas);
}

} // namespace

McEstimate estimate_hit_probability(const FiniteChain &chain, std::size_t x0, std::size_t target,
                                    std::size_t horizon, std::size_t replicas,
                                    std::uint64_t seed) {
    if (x0 >= chain.size() || target >= chain.size())
        throw InputError("estimate_hit_probability: state index out of range");
    return hit_probability_impl(
        [&chain](std::uint64_t s, double u) {
            return static_cast<std::uint64_t>(draw(chain.row(static_cast<std::size_t>(s)), u));
        },
        x0, target, horizon, replicas, seed);
}

McEstimate estimate_hit_probability(const CountableChain &chain, std::uint64_t x0,
                                    std::uint64_t target, std::size_t horizon,
                                    std::size_t replicas, std::uint64_t seed) {
    return hit_probability_impl(
        [&chain](std::uint64_t s, double u) { return chain.step(s, u); }, x0, target, horizon,
        replicas, seed);
}

std::vector<McEstimate> empirical_uncoupled_tail(const CouplingKernel &kernel, PairKey z0,
                                                 std::size_t n_max, std::size_t replicas,
                                                 std::uint64_t seed) {
    if (replicas < 1)
        throw InputError("empirical_uncoupled_tail: replicas must be >= 1");
    const FiniteChain &chain = kernel.step_chain();
    if (z0.first >= chain.size() || z0.second >= chain.size())
        throw InputError("empirical_uncoupled_tail: start pair out of range");

    const std::size_t columns = n_max + 1;
    // first_coupled[r] = first diagonal time, clamped to columns when the
    // pair stays uncoupled through n_max. Per-replica slots keep the result
    // independent of the thread count.
    std::vector<std::uint32_t> first_coupled(replicas, 0);
    parallel_blocks(replicas, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            SplitMix64 rng = SplitMix64::stream(seed, r);
            PairKey z = z0;
            std::size_t first = z.diagonal() ? 0 : columns;
            for (std::size_t n = 1; n <= n_max && first == columns; ++n) {
                z = draw(kernel.row(z), rng.next_unit());
                if (z.diagonal())
                    first = n;
            }
            first_coupled[r] = static_cast<std::uint32_t>(first);
        }
    });

    std::vector<std::size_t> uncoupled(columns, 0);
    for (std::size_t r = 0; r < replicas; ++r)
        for (std::size_t n = 0; n < first_coupled[r]; ++n)
            ++uncoupled[n];

    std::vector<McEstimate> out;
    out.reserve(columns);
    for (std::size_t n = 0; n < columns; ++n)
        out.push_back(bernoulli_estimate(uncoupled[n], replicas));
    return out;
}

bool AttemptStats::attempt_succeeded(std::size_t replica, std::size_t k) const {
    if (replica >= visit_times.size() || k < 1)
        throw InputError("attempt_succeeded: index out of range");
    const auto &taus = visit_times[replica];
    const auto &t = coupling_times[replica];
    return t && taus.size() >= k && *t <= taus[k - 1];
}

bool AttemptStats::bound_satisfied(std::size_t k) const {
    if (k < 1 || k > p_hat.size())
        throw InputError("bound_satisfied: attempt index out of range");
    double bound = 1.0 - std::pow(1.0 - doeblin_p, static_cast<double>(k));
    return p_hat[k - 1] >= bound - 3.0 * p_hat_stderr[k - 1];
}

AttemptStats attempt_statistics(const CouplingKernel &kernel, const DoeblinSet &c, PairKey z0,
                                std::size_t replicas, std::size_t horizon, std::uint64_t seed,
                                std::size_t k_max) {
    if (replicas < 1)
        throw InputError("attempt_statistics: replicas must be >= 1");
    if (k_max < 1)
        throw InputError("attempt_statistics: k_max must be >= 1");
    if (!same_space(kernel.step_chain().space(), c.space()))
        throw InputError("attempt_statistics: Doeblin set over a different state list");
    if (z0.first >= kernel.step_chain().size() || z0.second >= kernel.step_chain().size())
        throw InputError("attempt_statistics: start pair out of range");

    AttemptStats stats;
    stats.doeblin_p = c.p();
    stats.replicas = replicas;
    stats.horizon = horizon;
    stats.visit_times.assign(replicas, {});
    stats.coupling_times.assign(replicas, std::nullopt);

    parallel_blocks(replicas, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            SplitMix64 rng = SplitMix64::stream(seed, r);
            PairKey z = z0;
            std::optional<std::size_t> coupled =
                z.diagonal() ? std::optional<std::size_t>(0) : std::nullopt;
            std::vector<std::uint64_t> &taus = stats.visit_times[r];
            taus.reserve(k_max);
            for (std::size_t n = 1; n <= horizon && taus.size() < k_max; ++n) {
                if (coupled) {
                    // On the diagonal every later step stays in C, so the
                    // remaining visit times are consecutive integers.
                    std::uint64_t next = taus.empty() ? n : taus.back() + 1;
                    while (taus.size() < k_max)
                        taus.push_back(next++);
                    break;
                }
                z = draw(kernel.row(z), rng.next_unit());
                if (z.diagonal())
                    coupled = n;
                if (c.contains(z))
                    taus.push_back(n);
            }
            stats.coupling_times[r] = coupled;
        }
    });

    stats.p_hat.resize(k_max);
    stats.p_hat_stderr.resize(k_max);
    stats.tau_observed.resize(k_max);
    for (std::size_t k = 1; k <= k_max; ++k) {
        std::size_t successes = 0, observed = 0;
        for (std::size_t r = 0; r < replicas; ++r) {
            if (stats.visit_times[r].size() >= k)
                ++observed;
            if (stats.attempt_succeeded(r, k))
                ++successes;
        }
        McEstimate est = bernoulli_estimate(successes, replicas);
        stats.p_hat[k - 1] = est.point;
        stats.p_hat_stderr[k - 1] = est.stderr_;
        stats.tau_observed[k - 1] = observed;
    }
    return stats;
}

} // namespace coupdoob
