#ifndef COUPDOOB_TEST_SUPPORT_HPP
#define COUPDOOB_TEST_SUPPORT_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "coupdoob/chain.hpp"
#include "coupdoob/rng.hpp"

namespace coupdoob::test {

// Rows (0.5, 0.5), (0.2, 0.8): the 2-state workhorse with stationary vector
// (2/7, 5/7) and contraction factor 0.3.
inline FiniteChain chain_a() {
    return FiniteChain::from_dense({"0", "1"}, {{0.5, 0.5}, {0.2, 0.8}});
}

inline FiniteChain swap_chain() {
    return FiniteChain::from_dense({"0", "1"}, {{0.0, 1.0}, {1.0, 0.0}});
}

inline FiniteChain identity2() {
    return FiniteChain::from_dense({"0", "1"}, {{1.0, 0.0}, {0.0, 1.0}});
}

// ---- independent oracles ----------------------------------------------

inline std::vector<std::vector<double>> to_dense(const FiniteChain &chain) {
    std::vector<std::vector<double>> m(chain.size(), std::vector<double>(chain.size(), 0.0));
    for (std::size_t x = 0; x < chain.size(); ++x)
        for (const Transition &t : chain.row(x))
            m[x][t.target] = t.probability;
    return m;
}

inline std::vector<std::vector<double>> dense_multiply(
    const std::vector<std::vector<double>> &a, const std::vector<std::vector<double>> &b) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> c(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j)
                c[i][j] += a[i][k] * b[k][j];
    return c;
}

// Dense matrix-power route to the n-step law, independent of the sparse
// vector iteration in the library.
inline std::vector<double> dense_power_law(const FiniteChain &chain, std::size_t x,
                                           std::size_t n) {
    auto p = to_dense(chain);
    std::vector<std::vector<double>> m(chain.size(),
                                       std::vector<double>(chain.size(), 0.0));
    for (std::size_t i = 0; i < chain.size(); ++i)
        m[i][i] = 1.0;
    for (std::size_t step = 0; step < n; ++step)
        m = dense_multiply(m, p);
    return m[x];
}

// Boolean reachability matrix power: positivity pattern of P^n.
inline std::vector<std::vector<bool>> bool_power(const FiniteChain &chain, std::size_t n) {
    const std::size_t k = chain.size();
    std::vector<std::vector<bool>> b(k, std::vector<bool>(k, false));
    for (std::size_t i = 0; i < k; ++i)
        b[i][i] = true;
    std::vector<std::vector<bool>> step(k, std::vector<bool>(k, false));
    for (std::size_t x = 0; x < k; ++x)
        for (const Transition &t : chain.row(x))
            step[x][t.target] = true;
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<std::vector<bool>> next(k, std::vector<bool>(k, false));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                if (b[i][j])
                    for (std::size_t l = 0; l < k; ++l)
                        if (step[j][l])
                            next[i][l] = true;
        b = std::move(next);
    }
    return b;
}

// ---- random generators --------------------------------------------------

inline Dist random_dist(StateSpacePtr space, SplitMix64 &rng) {
    std::vector<double> w(space->size());
    double sum = 0.0;
    for (double &v : w) {
        v = -std::log(1.0 - rng.next_unit());
        sum += v;
    }
    for (double &v : w)
        v /= sum;
    return Dist(std::move(space), std::move(w));
}

// ---- chi-squared goodness of fit ---------------------------------------

// Regularized upper incomplete gamma Q(a, x); p-value of a chi-squared
// statistic is gamma_q(dof/2, stat/2).
inline double gamma_q(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0))
        throw std::invalid_argument("gamma_q domain");
    if (x == 0.0)
        return 1.0;
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 1000; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15)
                break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 1000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300)
            d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300)
            c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15)
            break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Chi-squared p-value of observed counts against expected probabilities;
// bins with tiny expectation are merged into their neighbor.
inline double chi_squared_pvalue(const std::vector<std::size_t> &observed,
                                 const std::vector<double> &expected_probability,
                                 std::size_t n_samples) {
    double stat = 0.0;
    std::size_t bins = 0;
    double merged_obs = 0.0, merged_exp = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double e = expected_probability[i] * static_cast<double>(n_samples);
        double o = static_cast<double>(observed[i]);
        if (e < 5.0) {
            merged_obs += o;
            merged_exp += e;
            continue;
        }
        stat += (o - e) * (o - e) / e;
        ++bins;
    }
    if (merged_exp > 0.0) {
        stat += (merged_obs - merged_exp) * (merged_obs - merged_exp) / merged_exp;
        ++bins;
    }
    if (bins < 2)
        return 1.0;
    return gamma_q(static_cast<double>(bins - 1) / 2.0, stat / 2.0);
}

} // namespace coupdoob::test

#endif
