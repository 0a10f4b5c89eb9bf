#include <doctest.h>

#include <cmath>

#include "coupdoob/chain.hpp"
#include "coupdoob/chain_ops.hpp"
#include "coupdoob/errors.hpp"
#include "coupdoob/gallery.hpp"
#include "coupdoob/structure.hpp"
#include "support/test_support.hpp"

using namespace coupdoob;
using test::chain_a;
using test::identity2;
using test::swap_chain;

TEST_SUITE_BEGIN("chain_core");

TEST_CASE("chain validation rejects malformed rows") {
    CHECK_THROWS_AS(FiniteChain::from_dense({"0", "1"}, {{0.5, 0.4}, {0.2, 0.8}}), InputError);
    CHECK_THROWS_AS(FiniteChain::from_dense({"0", "1"}, {{1.2, -0.2}, {0.2, 0.8}}), InputError);
    CHECK_THROWS_AS(FiniteChain(make_space(2), {{{0, 0.5}, {5, 0.5}}, {{0, 1.0}}}), InputError);
    CHECK_THROWS_AS(make_space({"a", "a"}), InputError);
    // Row sums inside the tolerance pass.
    CHECK_NOTHROW(FiniteChain::from_dense({"0", "1"}, {{0.5, 0.5 + 5e-13}, {0.2, 0.8}}));
}

TEST_CASE("dist validation") {
    auto space = make_space(2);
    CHECK_THROWS_AS(Dist(space, {0.5, 0.6}), InputError);
    CHECK_THROWS_AS(Dist(space, {-0.1, 1.1}), InputError);
    CHECK_THROWS_AS(Dist(space, {1.0}), InputError);
    CHECK(Dist::point_mass(space, 1)[1] == 1.0);
}

TEST_CASE("n_step identity and closed forms") {
    auto a = chain_a();
    SUBCASE("n = 0 is the point mass") {
        Dist d = n_step(a, 0, 0);
        CHECK(d[0] == 1.0);
        CHECK(d[1] == 0.0);
    }
    SUBCASE("two steps of chain A") {
        Dist d = n_step(a, 0, 2);
        CHECK(d[0] == doctest::Approx(0.35).epsilon(1e-14));
        CHECK(d[1] == doctest::Approx(0.65).epsilon(1e-14));
    }
    SUBCASE("swap chain is a deterministic permutation") {
        Dist d = n_step(swap_chain(), 0, 3);
        CHECK(d[0] == 0.0);
        CHECK(d[1] == 1.0);
    }
    SUBCASE("unknown state index") {
        CHECK_THROWS_AS(n_step(a, 7, 1), InputError);
    }
}

TEST_CASE("Chapman-Kolmogorov on random chains") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        std::size_t n_states = 2 + seed % 7;
        FiniteChain chain = random_chain(n_states, {.sparsity = 0.7}, 1000 + seed);
        SplitMix64 rng(seed);
        std::size_t m = 1 + rng.next_u64() % 10;
        std::size_t n = 1 + rng.next_u64() % 10;
        std::size_t x = rng.next_u64() % n_states;
        Dist direct = n_step(chain, x, m + n);
        Dist staged = n_step(chain, n_step(chain, x, m), n);
        for (std::size_t y = 0; y < n_states; ++y)
            CHECK(std::abs(direct[y] - staged[y]) < 1e-12);
        // Cross-check against the dense matrix-power oracle.
        auto oracle = test::dense_power_law(chain, x, m + n);
        for (std::size_t y = 0; y < n_states; ++y)
            CHECK(std::abs(direct[y] - oracle[y]) < 1e-12);
    }
}

TEST_CASE("total variation distance") {
    auto space = make_space(2);
    Dist d1(space, {0.5, 0.5});
    Dist d2(space, {0.2, 0.8});
    CHECK(total_variation(d1, d1) == 0.0);
    CHECK(total_variation(Dist::point_mass(space, 0), Dist::point_mass(space, 1)) == 2.0);
    CHECK(total_variation(d1, d2) == doctest::Approx(0.6).epsilon(1e-14));

    SUBCASE("mismatched state lists") {
        Dist other(make_space({"x", "y"}), {0.5, 0.5});
        CHECK_THROWS_AS(total_variation(d1, other), InputError);
    }

    SUBCASE("symmetry, triangle, range and the min formula") {
        SplitMix64 rng(99);
        auto sp = make_space(5);
        for (int i = 0; i < 200; ++i) {
            Dist a = test::random_dist(sp, rng);
            Dist b = test::random_dist(sp, rng);
            Dist c = test::random_dist(sp, rng);
            double ab = total_variation(a, b);
            CHECK(ab >= 0.0);
            CHECK(ab <= 2.0);
            CHECK(ab == total_variation(b, a));
            CHECK(ab <= total_variation(a, c) + total_variation(c, b) + 1e-12);
            double overlap = 0.0;
            for (std::size_t s = 0; s < 5; ++s)
                overlap += std::min(a[s], b[s]);
            CHECK(std::abs(ab - 2.0 * (1.0 - overlap)) < 1e-12);
        }
    }
}

TEST_CASE("invariant measures") {
    SUBCASE("chain A has (2/7, 5/7)") {
        auto ipms = invariant_measures(chain_a());
        REQUIRE(ipms.size() == 1);
        CHECK(std::abs(ipms[0][0] - 2.0 / 7.0) < 1e-15);
        CHECK(std::abs(ipms[0][1] - 5.0 / 7.0) < 1e-15);
        CHECK(invariance_residual(chain_a(), ipms[0]) < 1e-12);
    }
    SUBCASE("identity has the two point masses") {
        auto ipms = invariant_measures(identity2());
        REQUIRE(ipms.size() == 2);
        CHECK(ipms[0][0] == 1.0);
        CHECK(ipms[1][1] == 1.0);
    }
    SUBCASE("swap has the uniform measure") {
        auto ipms = invariant_measures(swap_chain());
        REQUIRE(ipms.size() == 1);
        CHECK(ipms[0][0] == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("random chains: one measure per recurrent class, residual < 1e-12") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            FiniteChain chain = random_chain(2 + seed % 7, {.sparsity = 0.5}, 7000 + seed);
            auto ipms = invariant_measures(chain);
            CHECK(ipms.size() == structure(chain).recurrent_count());
            for (const Dist &mu : ipms)
                CHECK(invariance_residual(chain, mu) < 1e-12);
        }
    }
}

TEST_CASE("structure: classes, recurrence, periods") {
    SUBCASE("identity: two recurrent singletons") {
        ChainStructure st = structure(identity2());
        REQUIRE(st.classes.size() == 2);
        CHECK(st.classes[0].recurrent);
        CHECK(st.classes[1].recurrent);
        CHECK(st.classes[0].period == 1);
    }
    SUBCASE("chain A: one aperiodic recurrent class") {
        ChainStructure st = structure(chain_a());
        REQUIRE(st.classes.size() == 1);
        CHECK(st.classes[0].recurrent);
        CHECK(st.classes[0].period == 1);
    }
    SUBCASE("swap: period 2") {
        ChainStructure st = structure(swap_chain());
        REQUIRE(st.classes.size() == 1);
        CHECK(st.classes[0].recurrent);
        CHECK(st.classes[0].period == 2);
    }
    SUBCASE("transient class is flagged") {
        // 0 -> {0,1} equally, but 1 is absorbing: {0} transient, {1} recurrent.
        auto chain = FiniteChain::from_dense({"0", "1"}, {{0.5, 0.5}, {0.0, 1.0}});
        ChainStructure st = structure(chain);
        REQUIRE(st.classes.size() == 2);
        CHECK_FALSE(st.classes[0].recurrent);
        CHECK(st.classes[1].recurrent);
    }
}

TEST_CASE("support equivalence and non-singularity") {
    SUBCASE("chain A couples supports at n = 1") {
        CHECK(check_equivalence(chain_a(), 0, 1, 10) == 1);
        CHECK(check_nonsingular(chain_a(), 0, 1, 10) == 1);
    }
    SUBCASE("swap supports alternate disjointly") {
        CHECK_FALSE(check_equivalence(swap_chain(), 0, 1, 100).has_value());
        CHECK_FALSE(check_nonsingular(swap_chain(), 0, 1, 100).has_value());
    }
    SUBCASE("x = y is immediate") {
        CHECK(check_equivalence(chain_a(), 1, 1, 10) == 1);
    }
    SUBCASE("identity point masses stay disjoint") {
        CHECK_FALSE(check_nonsingular(identity2(), 0, 1, 200).has_value());
    }
    SUBCASE("truncated counterexample meets via the origin") {
        CountableChain cc = std::get<CountableChain>(build_gallery("doob-counterexample"));
        TruncatedChain tc = truncate(cc, 10);
        // Reachability oracle: smallest n with intersecting positivity rows.
        std::optional<std::size_t> expected;
        for (std::size_t n = 1; n <= 10 && !expected; ++n) {
            auto b = test::bool_power(tc.chain, n);
            for (std::size_t s = 0; s < tc.chain.size(); ++s)
                if (b[1][s] && b[2][s]) {
                    expected = n;
                    break;
                }
        }
        REQUIRE(expected.has_value());
        CHECK(check_nonsingular(tc.chain, 1, 2, 10) == expected);
        CHECK(check_nonsingular(cc, 1, 2, 10) == expected);
    }
    SUBCASE("oracle agreement on random chains") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            FiniteChain chain = random_chain(2 + seed % 6, {.sparsity = 0.5}, 400 + seed);
            for (std::size_t x = 0; x < chain.size(); ++x)
                for (std::size_t y = x; y < chain.size(); ++y) {
                    auto eq = check_equivalence(chain, x, y, 12);
                    auto ns = check_nonsingular(chain, x, y, 12);
                    std::optional<std::size_t> eq_oracle, ns_oracle;
                    for (std::size_t n = 1; n <= 12; ++n) {
                        auto b = test::bool_power(chain, n);
                        bool equal = b[x] == b[y];
                        bool meet = false;
                        for (std::size_t s = 0; s < chain.size(); ++s)
                            if (b[x][s] && b[y][s])
                                meet = true;
                        if (equal && !eq_oracle)
                            eq_oracle = n;
                        if (meet && !ns_oracle)
                            ns_oracle = n;
                    }
                    CHECK(eq == eq_oracle);
                    CHECK(ns == ns_oracle);
                    // Equivalence at n implies non-singularity by n.
                    if (eq)
                        CHECK(*ns <= *eq);
                }
        }
    }
}

TEST_CASE("convergence curve") {
    auto a = chain_a();
    Dist mu = invariant_measures(a).front();
    SUBCASE("chain A from state 0 starts at 10/7 and decreases") {
        auto curve = convergence_curve(a, 0, mu, 30);
        CHECK(std::abs(curve[0] - 10.0 / 7.0) < 1e-14);
        for (std::size_t n = 1; n < curve.size(); ++n)
            CHECK(curve[n] <= curve[n - 1] + 1e-12);
        CHECK(curve[30] < 1e-8);
    }
    SUBCASE("swap is constant 1") {
        auto curve = convergence_curve(swap_chain(), 0,
                                       invariant_measures(swap_chain()).front(), 20);
        for (double v : curve)
            CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("stationary start is identically zero") {
        auto curve = convergence_curve(a, mu, mu, 10);
        for (double v : curve)
            CHECK(v < 1e-13);
    }
    SUBCASE("non-invariant mu is rejected") {
        Dist bad(a.space(), {0.5, 0.5});
        CHECK_THROWS_AS(convergence_curve(a, 0, bad, 10), InputError);
    }
}

TEST_CASE("power chain matches dense powers") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        FiniteChain chain = random_chain(4, {.sparsity = 0.8}, 50 + seed);
        FiniteChain p3 = power_chain(chain, 3);
        for (std::size_t x = 0; x < chain.size(); ++x) {
            auto oracle = test::dense_power_law(chain, x, 3);
            for (std::size_t y = 0; y < chain.size(); ++y)
                CHECK(std::abs(p3.probability(x, y) - oracle[y]) < 1e-13);
        }
    }
}

TEST_CASE("countable chain basics") {
    CountableChain cc = std::get<CountableChain>(build_gallery("doob-counterexample"));
    SUBCASE("rows") {
        auto r0 = cc.row(0);
        REQUIRE(r0.size() == 1);
        CHECK(r0[0].target == 0);
        auto r5 = cc.row(5);
        REQUIRE(r5.size() == 2);
        CHECK(r5[0].target == 4);
        CHECK(r5[1].target == 6);
    }
    SUBCASE("truncation accounts for leaked mass") {
        TruncatedChain tc = truncate(cc, 4);
        CHECK(tc.chain.size() == 6);
        CHECK(tc.chain.probability(4, tc.sink) == doctest::Approx(2.0 / 3.0));
        CHECK(tc.max_row_leak == doctest::Approx(2.0 / 3.0));
        CHECK(tc.chain.probability(tc.sink, tc.sink) == 1.0);
        // The origin's point mass is an extreme invariant measure of the
        // truncation.
        auto ipms = invariant_measures(tc.chain);
        REQUIRE(ipms.size() == 2);
        CHECK(ipms[0][0] == 1.0);
    }
    SUBCASE("bad parameters are rejected") {
        CHECK_THROWS_AS(CountableChain::birth_death({{0, 0.9}}, 1.0 / 3.0, 0.0, 2.0 / 3.0),
                        InputError);
        CHECK_THROWS_AS(CountableChain::birth_death({{0, 1.0}}, 0.5, 0.2, 0.5), InputError);
    }
}

TEST_SUITE_END();
