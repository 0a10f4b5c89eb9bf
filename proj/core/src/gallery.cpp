#include "coupdoob/gallery.hpp"

#include <algorithm>
#include <cmath>

#include "coupdoob/errors.hpp"
#include "coupdoob/rng.hpp"
#include "coupdoob/structure.hpp"

namespace coupdoob {

namespace {

FiniteChain two_state(double a, double b) {
    if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0))
        throw InputError("two-state: parameters must lie in [0,1]");
    return FiniteChain::from_dense({"0", "1"}, {{a, 1.0 - a}, {b, 1.0 - b}});
}

FiniteChain swap_chain() {
    return FiniteChain::from_dense({"0", "1"}, {{0.0, 1.0}, {1.0, 0.0}});
}

FiniteChain identity_chain(std::size_t k) {
    if (k < 1)
        throw InputError("identity: k must be >= 1");
    std::vector<SparseRow> rows(k);
    for (std::size_t i = 0; i < k; ++i)
        rows[i].push_back({i, 1.0});
    return FiniteChain(make_space(k), std::move(rows));
}

// Two disjoint aperiodic 2-state blocks with distinct stationary vectors:
// the per-block invariant measure satisfies the non-singularity assumption
// restricted to its own support, yet the chain has two extreme invariant
// measures.
FiniteChain disconnected_two_classes() {
    return FiniteChain::from_dense({"a0", "a1", "b0", "b1"},
                                   {{0.5, 0.5, 0.0, 0.0},
                                    {0.2, 0.8, 0.0, 0.0},
                                    {0.0, 0.0, 0.3, 0.7},
                                    {0.0, 0.0, 0.6, 0.4}});
}

// Absorbing origin with upward drift: p(0,0) = 1, p(i,i-1) = 1/3,
// p(i,i+1) = 2/3. The point mass at 0 is the unique invariant measure but
// paths started at i != 0 escape upward with probability 1 - 2^-i.
CountableChain doob_counterexample() {
    return CountableChain::birth_death({{0, 1.0}}, 1.0 / 3.0, 0.0, 2.0 / 3.0);
}

// Downward drift with a lazy boundary: p(0,0) = p(0,1) = 1/2,
// p(i,i-1) = 2/3, p(i,i+1) = 1/3. Converges to its invariant measure even
// though n-step laws from distinct states never share a full support.
CountableChain remark3_drift_down() {
    return CountableChain::birth_death({{0, 0.5}, {1, 0.5}}, 2.0 / 3.0, 0.0, 1.0 / 3.0);
}

std::vector<GalleryEntry> make_entries() {
    std::vector<GalleryEntry> entries;
    entries.push_back({"two-state", "two-state(a,b)", false,
                       "generic 2-state chain with rows (a,1-a),(b,1-b)",
                       {"theorem-1", 1, true, true,
                        "for interior parameters all assumptions hold and every start "
                        "converges to the unique invariant measure"}});
    entries.push_back({"swap", "swap", false, "deterministic 2-cycle",
                       {"no-assumptions", 1, false, false,
                        "unique invariant measure (1/2,1/2) but TV stays at 1: every "
                        "assumption fails and there is no convergence"}});
    entries.push_back({"identity", "identity(k)", false, "k absorbing states",
                       {"theorem-2", std::nullopt, false, true,
                        "each point mass is invariant; the non-singularity assumption holds "
                        "per extreme invariant measure yet uniqueness fails"}});
    entries.push_back({"disconnected-two-classes", "disconnected-two-classes", false,
                       "two disjoint aperiodic 2-state blocks",
                       {"theorem-2", 2, false, true,
                        "the non-singularity assumption restricted to each extreme invariant "
                        "measure's support holds, but there are two invariant measures"}});
    entries.push_back({"doob-counterexample", "doob-counterexample", true,
                       "absorbing origin, upward drift (down 1/3, up 2/3)",
                       {std::nullopt, 1, false, true,
                        "the point mass at 0 is the unique invariant measure; the "
                        "non-singularity assumption holds pairwise but P_n(i,.) does not "
                        "converge for i != 0 (escape probability 1 - 2^-i)"}});
    entries.push_back({"remark3-drift-down", "remark3-drift-down", true,
                       "lazy boundary, downward drift (down 2/3, up 1/3)",
                       {std::nullopt, 1, true, true,
                        "positive recurrent chain that converges to its invariant measure "
                        "although n-step laws from distinct states are never equivalent"}});
    return entries;
}

} // namespace

const std::vector<GalleryEntry> &gallery_entries() {
    static const std::vector<GalleryEntry> entries = make_entries();
    return entries;
}

const GalleryEntry *find_gallery_entry(const std::string &name) {
    for (const GalleryEntry &e : gallery_entries())
        if (e.name == name)
            return &e;
    return nullptr;
}

ChainVariant build_gallery(const std::string &name, const std::vector<double> &params) {
    auto need = [&](std::size_t count) {
        if (params.size() != count)
            throw InputError("gallery entry '" + name + "' expects " + std::to_string(count) +
                             " parameter(s), got " + std::to_string(params.size()));
    };
    if (name == "two-state") {
        need(2);
        return two_state(params[0], params[1]);
    }
    if (name == "swap") {
        need(0);
        return swap_chain();
    }
    if (name == "identity") {
        if (params.size() > 1)
            throw InputError("gallery entry 'identity' expects at most one parameter");
        std::size_t k = params.empty() ? 2 : static_cast<std::size_t>(params[0]);
        if (!params.empty() && (params[0] < 1.0 || params[0] != std::floor(params[0])))
            throw InputError("identity: k must be a positive integer");
        return identity_chain(k);
    }
    if (name == "disconnected-two-classes") {
        need(0);
        return disconnected_two_classes();
    }
    if (name == "doob-counterexample") {
        need(0);
        return doob_counterexample();
    }
    if (name == "remark3-drift-down") {
        need(0);
        return remark3_drift_down();
    }
    throw InputError("unknown gallery entry '" + name + "'");
}

namespace {

FiniteChain random_chain_once(std::size_t n_states, const RandomChainOptions &options,
                              SplitMix64 &rng) {
    std::vector<SparseRow> rows(n_states);
    for (std::size_t x = 0; x < n_states; ++x) {
        for (std::size_t tries = 0;; ++tries) {
            if (tries >= 10000)
                throw InputError("random_chain: cannot satisfy min_entry at this size");
            std::vector<std::size_t> support;
            for (std::size_t y = 0; y < n_states; ++y)
                if (rng.next_unit() < options.sparsity)
                    support.push_back(y);
            if (support.empty())
                support.push_back(static_cast<std::size_t>(rng.next_u64() % n_states));
            // Symmetric Dirichlet via normalized exponentials.
            std::vector<double> weights(support.size());
            double sum = 0.0;
            for (double &w : weights) {
                w = -std::log(1.0 - rng.next_unit());
                sum += w;
            }
            SparseRow row;
            bool ok = sum > 0.0;
            for (std::size_t i = 0; ok && i < support.size(); ++i) {
                double p = weights[i] / sum;
                if (p < options.min_entry)
                    ok = false;
                else
                    row.push_back({support[i], p});
            }
            if (ok) {
                rows[x] = std::move(row);
                break;
            }
        }
    }
    return FiniteChain(make_space(n_states), std::move(rows));
}

} // namespace

FiniteChain random_chain(std::size_t n_states, const RandomChainOptions &options,
                         std::uint64_t seed) {
    if (n_states < 2)
        throw InputError("random_chain: need at least 2 states");
    if (!(options.sparsity > 0.0 && options.sparsity <= 1.0))
        throw InputError("random_chain: sparsity must lie in (0,1]");
    SplitMix64 rng(seed);
    for (std::size_t attempt = 0; attempt < 1000; ++attempt) {
        FiniteChain chain = random_chain_once(n_states, options, rng);
        if (options.force_irreducible || options.force_aperiodic) {
            ChainStructure st = structure(chain);
            if (options.force_irreducible &&
                !(st.classes.size() == 1 && st.classes.front().recurrent))
                continue;
            bool aperiodic = true;
            for (const CommunicatingClass &c : st.classes)
                if (c.recurrent && c.period != 1)
                    aperiodic = false;
            if (options.force_aperiodic && !aperiodic)
                continue;
        }
        return chain;
    }
    throw InputError("random_chain: rejection sampling failed after 1000 attempts; "
                     "constraints are too tight for the requested sparsity");
}

} // namespace coupdoob
