#include "coupdoob/exact.hpp"

#include <algorithm>
#include <cmath>

#include "coupdoob/chain_ops.hpp"
#include "coupdoob/errors.hpp"
#include "coupdoob/structure.hpp"

namespace coupdoob {

namespace {

CouplingAnalysis evolve_impl(const CouplingKernel &kernel, std::vector<double> pair_law,
                             std::vector<double> law_1, std::vector<double> law_2,
                             std::size_t n_max) {
    const FiniteChain &chain = kernel.step_chain();
    const std::size_t n = chain.size();
    if (n * n > kExactPairCap)
        throw InputError("product space has " + std::to_string(n * n) +
                         " pairs, beyond the exact-mode cap of " +
                         std::to_string(kExactPairCap) + "; use Monte Carlo mode (simulate)");

    CouplingAnalysis out;
    out.step_multiplier = kernel.step_multiplier();
    out.uncoupled_tail.reserve(n_max + 1);
    out.tv_curve.reserve(n_max + 1);
    out.bound_slack.reserve(n_max + 1);

    std::vector<double> next_pair(n * n);
    std::vector<double> next_law(n);
    for (std::size_t step = 0; step <= n_max; ++step) {
        if (step > 0) {
            std::fill(next_pair.begin(), next_pair.end(), 0.0);
            for (std::size_t z = 0; z < pair_law.size(); ++z) {
                double w = pair_law[z];
                if (w == 0.0)
                    continue;
                const JointDist &row = kernel.row({z / n, z % n});
                for (const JointDist::Entry &e : row.entries())
                    next_pair[e.first.first * n + e.first.second] += w * e.second;
            }
            pair_law.swap(next_pair);

            for (auto *law : {&law_1, &law_2}) {
                std::fill(next_law.begin(), next_law.end(), 0.0);
                for (std::size_t x = 0; x < n; ++x) {
                    double w = (*law)[x];
                    if (w == 0.0)
                        continue;
                    for (const Transition &t : chain.row(x))
                        next_law[t.target] += w * t.probability;
                }
                law->swap(next_law);
            }
        }

        double off_diagonal = 0.0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (a != b)
                    off_diagonal += pair_law[a * n + b];
        double tv = 0.0;
        for (std::size_t x = 0; x < n; ++x)
            tv += std::abs(law_1[x] - law_2[x]);

        if (kernel.diagonal_absorbing() && !out.uncoupled_tail.empty())
            detail::internal_check(off_diagonal <= out.uncoupled_tail.back() + 1e-12,
                                   "uncoupled tail increased under a diagonal-absorbing kernel");
        double slack = 2.0 * off_diagonal - tv;
        detail::internal_check(slack >= -1e-12, "coupling inequality violated");

        out.uncoupled_tail.push_back(off_diagonal);
        out.tv_curve.push_back(tv);
        out.bound_slack.push_back(slack);
    }
    return out;
}

} // namespace

CouplingAnalysis evolve_coupled(const CouplingKernel &kernel, PairKey z0, std::size_t n_max) {
    const std::size_t n = kernel.step_chain().size();
    if (z0.first >= n || z0.second >= n)
        throw InputError("evolve_coupled: start pair out of range");
    std::vector<double> pair_law(n * n, 0.0);
    pair_law[z0.first * n + z0.second] = 1.0;
    std::vector<double> law_1(n, 0.0), law_2(n, 0.0);
    law_1[z0.first] = 1.0;
    law_2[z0.second] = 1.0;
    return evolve_impl(kernel, std::move(pair_law), std::move(law_1), std::move(law_2), n_max);
}

CouplingAnalysis evolve_coupled(const CouplingKernel &kernel, const JointDist &initial,
                                std::size_t n_max) {
    if (!same_space(kernel.step_chain().space(), initial.space()))
        throw InputError("evolve_coupled: initial law over a different state list");
    const std::size_t n = kernel.step_chain().size();
    std::vector<double> pair_law(n * n, 0.0);
    for (const JointDist::Entry &e : initial.entries())
        pair_law[e.first.first * n + e.first.second] = e.second;
    return evolve_impl(kernel, std::move(pair_law), initial.marginal_first(),
                       initial.marginal_second(), n_max);
}

double attempt_bound(double p, std::size_t k) {
    if (!(p > 0.0 && p < 1.0))
        throw InputError("attempt_bound: p must lie in (0,1)");
    return 1.0 - std::pow(1.0 - p, static_cast<double>(k));
}

namespace {

// Gaussian elimination with partial pivoting; the systems here are small and
// diagonally dominant.
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col]))
                pivot = r;
        detail::internal_check(std::abs(a[pivot][col]) > 0.0, "singular linear system");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = a[r][col] / a[col][col];
            if (f == 0.0)
                continue;
            for (std::size_t c = col; c < n; ++c)
                a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double v = b[i];
        for (std::size_t c = i + 1; c < n; ++c)
            v -= a[i][c] * x[c];
        x[i] = v / a[i][i];
    }
    return x;
}

} // namespace

RecurrenceReport recurrence_psi(const FiniteChain &chain, const std::vector<std::size_t> &b) {
    if (b.empty())
        throw InputError("recurrence_psi: target set must be nonempty");
    std::vector<bool> in_b(chain.size(), false);
    for (std::size_t s : b) {
        if (s >= chain.size())
            throw InputError("recurrence_psi: target state index out of range");
        in_b[s] = true;
    }

    ChainStructure st = structure(chain);
    std::vector<std::size_t> classes_hit;
    // States in recurrent classes get psi in {0,1}; a recurrent class visits
    // each of its states infinitely often, so only class membership matters.
    std::vector<double> psi(chain.size(), 0.0);
    std::vector<bool> is_transient(chain.size(), false);
    for (std::size_t c = 0; c < st.classes.size(); ++c) {
        const CommunicatingClass &cls = st.classes[c];
        if (!cls.recurrent) {
            for (std::size_t s : cls.members)
                is_transient[s] = true;
            continue;
        }
        bool hits = std::any_of(cls.members.begin(), cls.members.end(),
                                [&](std::size_t s) { return in_b[s]; });
        if (hits)
            classes_hit.push_back(c);
        for (std::size_t s : cls.members)
            psi[s] = hits ? 1.0 : 0.0;
    }

    std::vector<std::size_t> transient;
    for (std::size_t s = 0; s < chain.size(); ++s)
        if (is_transient[s])
            transient.push_back(s);

    if (!transient.empty()) {
        // Harmonic system psi = P psi on transient states with boundary
        // values fixed on the recurrent classes.
        std::vector<std::size_t> pos(chain.size(), 0);
        for (std::size_t i = 0; i < transient.size(); ++i)
            pos[transient[i]] = i;
        const std::size_t m = transient.size();
        std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
        std::vector<double> rhs(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            a[i][i] = 1.0;
            for (const Transition &t : chain.row(transient[i])) {
                if (is_transient[t.target])
                    a[i][pos[t.target]] -= t.probability;
                else
                    rhs[i] += t.probability * psi[t.target];
            }
        }
        std::vector<double> x = solve_dense(std::move(a), std::move(rhs));
        for (std::size_t i = 0; i < m; ++i)
            psi[transient[i]] = std::min(1.0, std::max(0.0, x[i]));
    }

    double residual = 0.0;
    for (std::size_t s : transient) {
        double v = 0.0;
        for (const Transition &t : chain.row(s))
            v += t.probability * psi[t.target];
        residual = std::max(residual, std::abs(psi[s] - v));
    }

    std::vector<std::size_t> sorted_b(b);
    std::sort(sorted_b.begin(), sorted_b.end());
    sorted_b.erase(std::unique(sorted_b.begin(), sorted_b.end()), sorted_b.end());
    return RecurrenceReport{std::move(psi), std::move(sorted_b), std::move(classes_hit),
                            residual};
}

namespace {

// Monotone curves make the first threshold crossing permanent, so the scan
// can stop there.
bool converges_within(const FiniteChain &chain, std::size_t x, const Dist &mu,
                      std::size_t horizon, double threshold) {
    std::vector<double> w(chain.size(), 0.0);
    w[x] = 1.0;
    std::vector<double> next(w.size());
    for (std::size_t step = 0; step <= horizon; ++step) {
        if (step > 0) {
            std::fill(next.begin(), next.end(), 0.0);
            for (std::size_t s = 0; s < w.size(); ++s) {
                if (w[s] == 0.0)
                    continue;
                for (const Transition &t : chain.row(s))
                    next[t.target] += w[s] * t.probability;
            }
            w.swap(next);
        }
        double tv = 0.0;
        for (std::size_t s = 0; s < w.size(); ++s)
            tv += std::abs(w[s] - mu[s]);
        if (tv < threshold)
            return true;
    }
    return false;
}

} // namespace

DoobVerdict verify_doob(const FiniteChain &chain, std::size_t n_max, std::size_t horizon,
                        double threshold) {
    if (n_max < 1)
        throw InputError("verify_doob: n_max must be >= 1");
    DoobVerdict verdict;
    verdict.n_max = n_max;
    verdict.horizon = horizon;
    verdict.threshold = threshold;

    const std::size_t n = chain.size();
    verdict.thm1_assumption_holds = true;
    verdict.cor1_assumption_holds = true;
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x; y < n; ++y) {
            auto eq = check_equivalence(chain, x, y, n_max);
            auto ns = check_nonsingular(chain, x, y, n_max);
            verdict.thm1_pairs.push_back({x, y, eq});
            verdict.cor1_pairs.push_back({x, y, ns});
            verdict.thm1_assumption_holds &= eq.has_value();
            verdict.cor1_assumption_holds &= ns.has_value();
        }

    std::vector<Dist> ipms = invariant_measures(chain);
    verdict.ipm_count = ipms.size();

    verdict.conclusion_mu_ae = true;
    bool all_thm2 = true, any_thm2 = false;
    for (Dist &mu : ipms) {
        IpmVerdict iv{std::move(mu), {}, true, true};
        std::vector<std::size_t> support = iv.ipm.support();
        for (std::size_t i = 0; i < support.size(); ++i)
            for (std::size_t j = i; j < support.size(); ++j) {
                auto ns = check_nonsingular(chain, support[i], support[j], n_max);
                iv.thm2_pairs.push_back({support[i], support[j], ns});
                iv.thm2_assumption_holds &= ns.has_value();
            }
        for (std::size_t x : support)
            iv.conclusion_holds &= converges_within(chain, x, iv.ipm, horizon, threshold);
        all_thm2 &= iv.thm2_assumption_holds;
        any_thm2 |= iv.thm2_assumption_holds;
        verdict.conclusion_mu_ae &= iv.conclusion_holds;
        verdict.per_ipm.push_back(std::move(iv));
    }

    verdict.conclusion_allx = false;
    if (verdict.ipm_count == 1) {
        verdict.conclusion_allx = true;
        for (std::size_t x = 0; x < n && verdict.conclusion_allx; ++x)
            verdict.conclusion_allx =
                converges_within(chain, x, verdict.per_ipm.front().ipm, horizon, threshold);
    }

    if (verdict.thm1_assumption_holds)
        verdict.classification = "theorem-1";
    else if (verdict.cor1_assumption_holds)
        verdict.classification = "corollary-1";
    else if (!verdict.per_ipm.empty() && all_thm2)
        verdict.classification = "theorem-2";
    else if (any_thm2)
        verdict.classification = "theorem-2-partial";
    else
        verdict.classification = "no-assumptions";
    return verdict;
}

} // namespace coupdoob
