#include <doctest.h>

#include <cmath>

#include "coupdoob/chain_ops.hpp"
#include "coupdoob/errors.hpp"
#include "coupdoob/exact.hpp"
#include "coupdoob/gallery.hpp"
#include "support/test_support.hpp"

using namespace coupdoob;
using test::chain_a;
using test::identity2;
using test::swap_chain;

TEST_SUITE_BEGIN("exact_analysis");

TEST_CASE("evolve_coupled closed forms on chain A") {
    CouplingKernel s = maximal_kernel(chain_a());
    CouplingAnalysis analysis = evolve_coupled(s, {0, 1}, 20);
    // Residual product re-enters (0,1), so the uncoupled mass contracts by
    // exactly 0.3 per step and the TV curve is 0.6 * 0.3^(n-1).
    for (std::size_t n = 0; n <= 20; ++n) {
        double expected_tail = std::pow(0.3, static_cast<double>(n));
        double expected_tv =
            n == 0 ? 2.0 : 0.6 * std::pow(0.3, static_cast<double>(n - 1));
        CHECK(std::abs(analysis.uncoupled_tail[n] - expected_tail) < 1e-12);
        CHECK(std::abs(analysis.tv_curve[n] - expected_tv) < 1e-12);
        CHECK(std::abs(analysis.bound_slack[n]) < 1e-12);
    }
    SUBCASE("tail at n=1 equals TV1 / 2") {
        CHECK(std::abs(analysis.uncoupled_tail[1] - 0.3) < 1e-12);
    }
}

TEST_CASE("evolve_coupled degenerate starts") {
    SUBCASE("diagonal start never uncouples") {
        CouplingKernel s = maximal_kernel(chain_a());
        CouplingAnalysis analysis = evolve_coupled(s, {1, 1}, 15);
        for (double v : analysis.uncoupled_tail)
            CHECK(v == 0.0);
    }
    SUBCASE("independent coupling of the identity chain is frozen") {
        CouplingKernel r = independent_kernel(identity2());
        CouplingAnalysis analysis = evolve_coupled(r, {0, 1}, 15);
        for (double v : analysis.uncoupled_tail)
            CHECK(v == 1.0);
        for (double v : analysis.tv_curve)
            CHECK(v == 2.0);
    }
}

TEST_CASE("evolve_coupled from a product law (theorem-2 mode)") {
    auto a = chain_a();
    Dist mu = invariant_measures(a).front();
    CouplingKernel s = maximal_kernel(a);
    CouplingAnalysis analysis = evolve_coupled(s, JointDist::product(mu, mu), 25);
    // Both marginals are stationary, so the TV curve vanishes and the tail
    // still decays to zero.
    for (double v : analysis.tv_curve)
        CHECK(v < 1e-12);
    CHECK(analysis.uncoupled_tail.back() < 1e-9);
    for (std::size_t n = 1; n < analysis.uncoupled_tail.size(); ++n)
        CHECK(analysis.uncoupled_tail[n] <= analysis.uncoupled_tail[n - 1] + 1e-12);
}

TEST_CASE("coupling inequality and monotone tails on random chains") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        FiniteChain chain = random_chain(2 + seed % 6, {.sparsity = 0.7}, 3000 + seed);
        CouplingKernel s = maximal_kernel(chain);
        for (std::size_t x1 = 0; x1 < chain.size(); ++x1)
            for (std::size_t x2 = 0; x2 < chain.size(); ++x2) {
                CouplingAnalysis analysis = evolve_coupled(s, {x1, x2}, 30);
                for (std::size_t n = 0; n <= 30; ++n)
                    CHECK(analysis.bound_slack[n] >= -1e-12);
                CHECK(std::abs(analysis.uncoupled_tail[1] -
                               analysis.tv_curve[1] / 2.0) < 1e-12);
            }
    }
}

TEST_CASE("attempt_bound") {
    CHECK(attempt_bound(0.3, 0) == 0.0);
    CHECK(attempt_bound(0.3, 1) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(attempt_bound(0.5, 3) == doctest::Approx(0.875).epsilon(1e-15));
    CHECK_THROWS_AS(attempt_bound(0.0, 2), InputError);
    CHECK_THROWS_AS(attempt_bound(1.0, 2), InputError);

    SUBCASE("matches the iterated recursion") {
        SplitMix64 rng(4242);
        for (int i = 0; i < 1000; ++i) {
            double p = 0.001 + 0.998 * rng.next_unit();
            std::size_t k = rng.next_u64() % 100;
            double iterated = 0.0;
            for (std::size_t j = 0; j < k; ++j)
                iterated = p * (1.0 - iterated) + iterated;
            CHECK(std::abs(attempt_bound(p, k) - iterated) < 1e-12);
        }
    }
}

TEST_CASE("recurrence_psi") {
    SUBCASE("one-step absorption solve") {
        // 0 and 2 absorbing, 1 -> 0 w.p. 1/3 and -> 2 w.p. 2/3.
        auto chain = FiniteChain::from_dense(
            {"0", "1", "2"},
            {{1.0, 0.0, 0.0}, {1.0 / 3.0, 0.0, 2.0 / 3.0}, {0.0, 0.0, 1.0}});
        RecurrenceReport report = recurrence_psi(chain, {0});
        CHECK(report.psi[0] == 1.0);
        CHECK(std::abs(report.psi[1] - 1.0 / 3.0) < 1e-14);
        CHECK(report.psi[2] == 0.0);
        CHECK(report.harmonic_residual < 1e-12);
        REQUIRE(report.classes_hit.size() == 1);
    }
    SUBCASE("irreducible chain visits everything") {
        RecurrenceReport report = recurrence_psi(chain_a(), {1});
        CHECK(report.psi[0] == 1.0);
        CHECK(report.psi[1] == 1.0);
    }
    SUBCASE("B = whole space") {
        FiniteChain chain = random_chain(5, {.sparsity = 0.5}, 11);
        RecurrenceReport report = recurrence_psi(chain, {0, 1, 2, 3, 4});
        for (double v : report.psi)
            CHECK(v == 1.0);
    }
    SUBCASE("empty B is rejected") {
        CHECK_THROWS_AS(recurrence_psi(chain_a(), {}), InputError);
    }
    SUBCASE("harmonic residual on random chains") {
        for (std::uint64_t seed = 0; seed < 15; ++seed) {
            FiniteChain chain = random_chain(3 + seed % 6, {.sparsity = 0.45}, 8800 + seed);
            RecurrenceReport report = recurrence_psi(chain, {0});
            CHECK(report.harmonic_residual < 1e-12);
            for (double v : report.psi) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
        }
    }
}

TEST_CASE("verify_doob classifications") {
    SUBCASE("chain A: theorem 1 with witnesses at n = 1") {
        DoobVerdict v = verify_doob(chain_a(), 16, 2000);
        CHECK(v.classification == "theorem-1");
        CHECK(v.ipm_count == 1);
        CHECK(v.conclusion_allx);
        CHECK(v.conclusion_mu_ae);
        for (const PairCheck &p : v.thm1_pairs)
            CHECK(p.n == 1);
    }
    SUBCASE("identity: theorem 2 per extreme ipm, no uniqueness") {
        DoobVerdict v = verify_doob(identity2(), 16, 100);
        CHECK(v.classification == "theorem-2");
        CHECK(v.ipm_count == 2);
        CHECK_FALSE(v.thm1_assumption_holds);
        CHECK_FALSE(v.cor1_assumption_holds);
        for (const IpmVerdict &iv : v.per_ipm) {
            CHECK(iv.thm2_assumption_holds);
            CHECK(iv.conclusion_holds);
        }
        CHECK_FALSE(v.conclusion_allx);
        CHECK(v.conclusion_mu_ae);
    }
    SUBCASE("swap: everything fails, unique ipm, no convergence") {
        DoobVerdict v = verify_doob(swap_chain(), 32, 500);
        CHECK(v.classification == "no-assumptions");
        CHECK(v.ipm_count == 1);
        CHECK_FALSE(v.conclusion_allx);
        CHECK_FALSE(v.conclusion_mu_ae);
    }
    SUBCASE("theorem-1 verdict implies corollary-1 assumptions") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            FiniteChain chain = random_chain(2 + seed % 6, {.sparsity = 0.5}, 1200 + seed);
            DoobVerdict v = verify_doob(chain, 24, 100);
            if (v.thm1_assumption_holds)
                CHECK(v.cor1_assumption_holds);
        }
    }
}

TEST_CASE("convergence horizon scales with the one-step contraction") {
    // For chains whose one-step Dobrushin coefficient alpha is below 1, the
    // TV curve is bounded by 2 alpha^n, so the crossing time is at most
    // log(threshold / 2) / log(alpha), up to rounding.
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        FiniteChain chain =
            random_chain(3 + seed % 5, {.sparsity = 1.0, .force_irreducible = true,
                                        .force_aperiodic = true},
                         1500 + seed);
        double alpha = 0.0;
        for (std::size_t x = 0; x < chain.size(); ++x)
            for (std::size_t y = x + 1; y < chain.size(); ++y)
                alpha = std::max(alpha, total_variation(chain.row_dist(x),
                                                        chain.row_dist(y)) / 2.0);
        if (alpha >= 0.95)
            continue;
        double bound = std::log(1e-8 / 2.0) / std::log(alpha) + 1.0;
        Dist mu = invariant_measures(chain).front();
        for (std::size_t x = 0; x < chain.size(); ++x) {
            auto curve = convergence_curve(chain, x, mu,
                                           static_cast<std::size_t>(bound) + 2);
            std::size_t crossing = curve.size();
            for (std::size_t n = 0; n < curve.size(); ++n)
                if (curve[n] < 1e-8) {
                    crossing = n;
                    break;
                }
            CHECK(crossing <= static_cast<std::size_t>(bound) + 1);
        }
    }
}

TEST_CASE("exact-mode cap") {
    FiniteChain big = random_chain(101, {.sparsity = 0.05}, 3);
    CouplingKernel s = maximal_kernel(big);
    CHECK_THROWS_AS(evolve_coupled(s, {0, 1}, 5), InputError);
}

TEST_SUITE_END();
