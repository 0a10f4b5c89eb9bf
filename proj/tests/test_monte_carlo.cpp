#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "coupdoob/chain_ops.hpp"
#include "coupdoob/errors.hpp"
#include "coupdoob/exact.hpp"
#include "coupdoob/gallery.hpp"
#include "coupdoob/monte_carlo.hpp"
#include "support/test_support.hpp"

using namespace coupdoob;
using test::chain_a;
using test::identity2;
using test::swap_chain;

TEST_SUITE_BEGIN("monte_carlo");

TEST_CASE("sample_path determinism and deterministic chains") {
    SUBCASE("swap chain alternates regardless of seed") {
        for (std::uint64_t seed : {0ULL, 7ULL, 123456789ULL}) {
            PathSample p = sample_path(swap_chain(), 0, 4, seed);
            std::vector<std::uint64_t> expected{0, 1, 0, 1, 0};
            CHECK(p.trajectory == expected);
        }
    }
    SUBCASE("counterexample chain is frozen at the origin") {
        CountableChain cc = std::get<CountableChain>(build_gallery("doob-counterexample"));
        PathSample p = sample_path(cc, 0, 10, 99);
        for (std::uint64_t s : p.trajectory)
            CHECK(s == 0);
    }
    SUBCASE("identical inputs give identical trajectories") {
        PathSample p1 = sample_path(chain_a(), 0, 1000, 2024);
        PathSample p2 = sample_path(chain_a(), 0, 1000, 2024);
        CHECK(p1.trajectory == p2.trajectory);
        PathSample p3 = sample_path(chain_a(), 0, 1000, 2025);
        CHECK(p1.trajectory != p3.trajectory);
    }
}

TEST_CASE("sample_coupled") {
    SUBCASE("diagonal start stays together with T = 0") {
        CouplingKernel s = maximal_kernel(chain_a());
        CoupledSample cs = sample_coupled(s, {1, 1}, 50, 5);
        CHECK(cs.coupling_time == 0);
        for (const PairKey &z : cs.trajectory)
            CHECK(z.first == z.second);
    }
    SUBCASE("independent coupling of the identity chain never couples") {
        CouplingKernel r = independent_kernel(identity2());
        CoupledSample cs = sample_coupled(r, {0, 1}, 100, 11);
        CHECK_FALSE(cs.coupling_time.has_value());
    }
    SUBCASE("components stay together after coupling") {
        CouplingKernel s = maximal_kernel(chain_a());
        CoupledSample cs = sample_coupled(s, {0, 1}, 60, 17);
        REQUIRE(cs.coupling_time.has_value());
        for (std::size_t n = *cs.coupling_time; n < cs.trajectory.size(); ++n)
            CHECK(cs.trajectory[n].first == cs.trajectory[n].second);
    }
}

TEST_CASE("empirical tail matches the exact tail on the exact-mode fixtures") {
    SUBCASE("chain A, maximal kernel") {
        CouplingKernel s = maximal_kernel(chain_a());
        CouplingAnalysis exact = evolve_coupled(s, {0, 1}, 5);
        auto tail = empirical_uncoupled_tail(s, {0, 1}, 5, 100000, 20250808);
        for (std::size_t n = 1; n <= 5; ++n) {
            double margin = 3.0 * std::max(tail[n].stderr_, 1e-4);
            CHECK(std::abs(tail[n].point - exact.uncoupled_tail[n]) < margin);
        }
    }
    SUBCASE("swap chain: singular rows keep the pair apart forever") {
        CouplingKernel s = maximal_kernel(swap_chain());
        auto tail = empirical_uncoupled_tail(s, {0, 1}, 8, 2000, 5);
        for (const McEstimate &est : tail)
            CHECK(est.point == 1.0);
    }
}

TEST_CASE("coupled marginals pass a chi-squared test at n in {1, 5}") {
    FiniteChain chain = random_chain(4, {.sparsity = 1.0}, 314159);
    CouplingKernel s = maximal_kernel(chain);
    const std::size_t replicas = 100000;
    const std::uint64_t seed = 271828;
    for (std::size_t n : {std::size_t(1), std::size_t(5)}) {
        std::vector<std::size_t> counts_1(chain.size(), 0), counts_2(chain.size(), 0);
        for (std::size_t r = 0; r < replicas; ++r) {
            CoupledSample cs = sample_coupled(s, {0, 2}, n, SplitMix64::stream(seed, r).next_u64());
            ++counts_1[cs.trajectory[n].first];
            ++counts_2[cs.trajectory[n].second];
        }
        Dist law_1 = n_step(chain, 0, n), law_2 = n_step(chain, 2, n);
        double p1 = test::chi_squared_pvalue(counts_1, law_1.weights(), replicas);
        double p2 = test::chi_squared_pvalue(counts_2, law_2.weights(), replicas);
        CHECK(p1 > 0.001);
        CHECK(p2 > 0.001);
    }
}

TEST_CASE("hit probability") {
    SUBCASE("start at the target") {
        CountableChain cc = std::get<CountableChain>(build_gallery("doob-counterexample"));
        McEstimate est = estimate_hit_probability(cc, 4, 4, 100, 10, 1);
        CHECK(est.point == 1.0);
        CHECK(est.stderr_ == 0.0);
    }
    SUBCASE("gambler's ruin oracle at moderate precision") {
        CountableChain cc = std::get<CountableChain>(build_gallery("doob-counterexample"));
        McEstimate est = estimate_hit_probability(cc, 2, 0, 2000, 20000, 77);
        CHECK(std::abs(est.point - 0.25) < 0.25 * 0.12);
    }
    SUBCASE("downward drift reaches the origin") {
        CountableChain cc = std::get<CountableChain>(build_gallery("remark3-drift-down"));
        McEstimate est = estimate_hit_probability(cc, 5, 0, 2000, 5000, 99);
        CHECK(est.point > 0.999);
    }
    SUBCASE("zero replicas rejected") {
        CountableChain cc = std::get<CountableChain>(build_gallery("doob-counterexample"));
        CHECK_THROWS_AS(estimate_hit_probability(cc, 1, 0, 10, 0, 1), InputError);
    }
}

TEST_CASE("attempt statistics") {
    auto a = chain_a();
    SUBCASE("all-maximal coupling succeeds with rate about 0.7") {
        DoeblinSet c = doeblin_set(a, 1, 0.7);
        CouplingKernel s = hybrid_kernel(a, c);
        AttemptStats stats = attempt_statistics(s, c, {0, 1}, 50000, 200, 31337, 6);
        CHECK(std::abs(stats.p_hat[0] - 0.7) < 3.0 * std::max(stats.p_hat_stderr[0], 1e-4));
        for (std::size_t k = 1; k <= 6; ++k)
            CHECK(stats.bound_satisfied(k));
        // Success flags are monotone in k, per replica and in aggregate.
        for (std::size_t k = 1; k < 6; ++k)
            CHECK(stats.p_hat[k - 1] <= stats.p_hat[k] + 1e-12);
        for (std::size_t r = 0; r < 200; ++r)
            for (std::size_t k = 1; k < 6; ++k)
                if (stats.attempt_succeeded(r, k))
                    CHECK(stats.attempt_succeeded(r, k + 1));
    }
    SUBCASE("diagonal start is already successful everywhere") {
        DoeblinSet c = doeblin_set(a, 1, 0.7);
        CouplingKernel s = hybrid_kernel(a, c);
        AttemptStats stats = attempt_statistics(s, c, {0, 0}, 200, 50, 1, 4);
        for (double p : stats.p_hat)
            CHECK(p == 1.0);
    }
    SUBCASE("frozen chain never reaches a diagonal-only C") {
        auto id = identity2();
        DoeblinSet c = doeblin_set(id, 1, 0.5); // contains the diagonal only
        CHECK(c.member_count() == 2);
        CouplingKernel r = independent_kernel(id);
        AttemptStats stats = attempt_statistics(r, c, {0, 1}, 100, 100, 5, 3);
        CHECK(stats.tau_observed[0] == 0);
        for (double p : stats.p_hat)
            CHECK(p == 0.0);
        // Visit times are strictly increasing while finite.
        for (const auto &taus : stats.visit_times)
            CHECK(taus.empty());
    }
    SUBCASE("visit times strictly increase") {
        DoeblinSet c = doeblin_set(a, 1, 0.7);
        CouplingKernel s = hybrid_kernel(a, c);
        AttemptStats stats = attempt_statistics(s, c, {0, 1}, 500, 100, 9, 5);
        for (const auto &taus : stats.visit_times)
            for (std::size_t i = 1; i < taus.size(); ++i)
                CHECK(taus[i] > taus[i - 1]);
    }
}

TEST_CASE("thread count does not change results") {
    CountableChain cc = std::get<CountableChain>(build_gallery("doob-counterexample"));
    auto run = [&](const char *threads) {
        setenv("COUPDOOB_THREADS", threads, 1);
        McEstimate est = estimate_hit_probability(cc, 3, 0, 500, 20000, 424242);
        unsetenv("COUPDOOB_THREADS");
        return est;
    };
    McEstimate one = run("1");
    McEstimate four = run("4");
    CHECK(one.point == four.point);
    CHECK(one.stderr_ == four.stderr_);
}

TEST_SUITE_END();
