#include "coupdoob/chain_ops.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "coupdoob/errors.hpp"
#include "coupdoob/structure.hpp"

namespace coupdoob {

namespace {

// One forward step of a raw weight vector; summation order is fixed by
// state index so results are independent of evaluation order.
void advance(const std::vector<SparseRow> &rows, const std::vector<double> &in,
             std::vector<double> &out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t x = 0; x < in.size(); ++x) {
        double w = in[x];
        if (w == 0.0)
            continue;
        for (const Transition &t : rows[x])
            out[t.target] += w * t.probability;
    }
}

// Long products drift from unit mass by accumulated rounding; bring the
// computed law back to an exact probability vector. Anything beyond 1e-9 is
// a bug, not roundoff.
std::vector<double> normalized(std::vector<double> w) {
    double sum = 0.0;
    for (double v : w)
        sum += v;
    detail::internal_check(std::abs(sum - 1.0) < 1e-9, "evolved law lost probability mass");
    for (double &v : w)
        v /= sum;
    return w;
}

std::vector<double> evolve_raw(const FiniteChain &chain, std::vector<double> w, std::size_t n) {
    std::vector<double> next(w.size());
    for (std::size_t step = 0; step < n; ++step) {
        advance(chain.rows(), w, next);
        w.swap(next);
    }
    return w;
}

} // namespace

Dist n_step(const FiniteChain &chain, std::size_t x, std::size_t n) {
    if (x >= chain.size())
        throw InputError("n_step: state index out of range");
    std::vector<double> w(chain.size(), 0.0);
    w[x] = 1.0;
    if (n == 0)
        return Dist(chain.space(), std::move(w));
    return Dist(chain.space(), normalized(evolve_raw(chain, std::move(w), n)));
}

Dist n_step(const FiniteChain &chain, const Dist &start, std::size_t n) {
    if (!same_space(chain.space(), start.space()))
        throw InputError("n_step: start distribution is over a different state list");
    if (n == 0)
        return start;
    return Dist(chain.space(), normalized(evolve_raw(chain, start.weights(), n)));
}

double total_variation(const Dist &d1, const Dist &d2) {
    if (!d1.same_space_as(d2))
        throw InputError("total_variation: distributions are over different state lists");
    double tv = 0.0;
    for (std::size_t i = 0; i < d1.size(); ++i)
        tv += std::abs(d1[i] - d2[i]);
    return tv;
}

double invariance_residual(const FiniteChain &chain, const Dist &mu) {
    if (!same_space(chain.space(), mu.space()))
        throw InputError("invariance_residual: distribution over a different state list");
    std::vector<double> image(chain.size());
    advance(chain.rows(), mu.weights(), image);
    double residual = 0.0;
    for (std::size_t y = 0; y < image.size(); ++y)
        residual = std::max(residual, std::abs(image[y] - mu[y]));
    return residual;
}

bool is_invariant(const FiniteChain &chain, const Dist &mu, double tolerance) {
    return invariance_residual(chain, mu) <= tolerance;
}

namespace {

// Grassmann-Taksar-Heyman reduction for the stationary vector of an
// irreducible stochastic matrix. Subtraction-free, so the result is accurate
// componentwise and the fixed-point residual lands at roundoff level.
std::vector<double> stationary_gth(std::vector<std::vector<double>> p) {
    const std::size_t n = p.size();
    for (std::size_t k = n - 1; k > 0; --k) {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j)
            s += p[k][j];
        detail::internal_check(s > 0.0, "GTH reduction hit a non-irreducible block");
        for (std::size_t i = 0; i < k; ++i)
            p[i][k] /= s;
        for (std::size_t i = 0; i < k; ++i) {
            if (p[i][k] == 0.0)
                continue;
            for (std::size_t j = 0; j < k; ++j)
                p[i][j] += p[i][k] * p[k][j];
        }
    }
    std::vector<double> x(n, 0.0);
    x[0] = 1.0;
    double total = 1.0;
    for (std::size_t k = 1; k < n; ++k) {
        double v = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            v += x[i] * p[i][k];
        x[k] = v;
        total += v;
    }
    for (double &v : x)
        v /= total;
    return x;
}

} // namespace

std::vector<Dist> invariant_measures(const FiniteChain &chain) {
    ChainStructure st = structure(chain);
    std::vector<Dist> out;
    for (const CommunicatingClass &cls : st.classes) {
        if (!cls.recurrent)
            continue;
        const std::size_t m = cls.members.size();
        std::vector<std::vector<double>> restricted(m, std::vector<double>(m, 0.0));
        for (std::size_t i = 0; i < m; ++i)
            for (const Transition &t : chain.row(cls.members[i])) {
                auto it = std::lower_bound(cls.members.begin(), cls.members.end(), t.target);
                detail::internal_check(it != cls.members.end() && *it == t.target,
                                       "recurrent class has an outgoing edge");
                restricted[i][static_cast<std::size_t>(it - cls.members.begin())] =
                    t.probability;
            }
        std::vector<double> pi = stationary_gth(std::move(restricted));
        std::vector<double> w(chain.size(), 0.0);
        for (std::size_t i = 0; i < m; ++i)
            w[cls.members[i]] = pi[i];
        out.emplace_back(chain.space(), std::move(w));
    }
    return out;
}

namespace {

// Supports as bitmasks of 64-bit words.
using Mask = std::vector<std::uint64_t>;

Mask point_mask(std::size_t n, std::size_t x) {
    Mask m((n + 63) / 64, 0);
    m[x / 64] |= std::uint64_t(1) << (x % 64);
    return m;
}

std::vector<Mask> row_masks(const FiniteChain &chain) {
    std::vector<Mask> masks;
    masks.reserve(chain.size());
    for (std::size_t x = 0; x < chain.size(); ++x) {
        Mask m((chain.size() + 63) / 64, 0);
        for (const Transition &t : chain.row(x))
            m[t.target / 64] |= std::uint64_t(1) << (t.target % 64);
        masks.push_back(std::move(m));
    }
    return masks;
}

Mask advance_mask(const std::vector<Mask> &rows, const Mask &s) {
    Mask out(s.size(), 0);
    for (std::size_t w = 0; w < s.size(); ++w) {
        std::uint64_t bits = s[w];
        while (bits) {
            std::size_t bit = static_cast<std::size_t>(__builtin_ctzll(bits));
            bits &= bits - 1;
            const Mask &r = rows[w * 64 + bit];
            for (std::size_t k = 0; k < out.size(); ++k)
                out[k] |= r[k];
        }
    }
    return out;
}

bool intersects(const Mask &a, const Mask &b) {
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k] & b[k])
            return true;
    return false;
}

std::optional<std::size_t> support_search(const FiniteChain &chain, std::size_t x, std::size_t y,
                                          std::size_t n_max, bool require_equal) {
    if (x >= chain.size() || y >= chain.size())
        throw InputError("support check: state index out of range");
    auto rows = row_masks(chain);
    Mask sx = point_mask(chain.size(), x);
    Mask sy = point_mask(chain.size(), y);
    for (std::size_t n = 1; n <= n_max; ++n) {
        sx = advance_mask(rows, sx);
        sy = advance_mask(rows, sy);
        if (require_equal ? (sx == sy) : intersects(sx, sy))
            return n;
    }
    return std::nullopt;
}

using CountableSupport = std::set<std::uint64_t>;

CountableSupport advance_support(const CountableChain &chain, const CountableSupport &s) {
    CountableSupport out;
    for (std::uint64_t state : s)
        for (const CountableChain::Entry &e : chain.row(state))
            if (e.probability > 0.0)
                out.insert(e.target);
    return out;
}

std::optional<std::size_t> support_search(const CountableChain &chain, std::uint64_t x,
                                          std::uint64_t y, std::size_t n_max,
                                          bool require_equal) {
    CountableSupport sx{x}, sy{y};
    for (std::size_t n = 1; n <= n_max; ++n) {
        sx = advance_support(chain, sx);
        sy = advance_support(chain, sy);
        bool hit;
        if (require_equal) {
            hit = sx == sy;
        } else {
            hit = false;
            for (std::uint64_t v : sx)
                if (sy.count(v)) {
                    hit = true;
                    break;
                }
        }
        if (hit)
            return n;
    }
    return std::nullopt;
}

} // namespace

std::optional<std::size_t> check_equivalence(const FiniteChain &chain, std::size_t x,
                                             std::size_t y, std::size_t n_max) {
    return support_search(chain, x, y, n_max, /*require_equal=*/true);
}

std::optional<std::size_t> check_nonsingular(const FiniteChain &chain, std::size_t x,
                                             std::size_t y, std::size_t n_max) {
    return support_search(chain, x, y, n_max, /*require_equal=*/false);
}

std::optional<std::size_t> check_equivalence(const CountableChain &chain, std::uint64_t x,
                                             std::uint64_t y, std::size_t n_max) {
    return support_search(chain, x, y, n_max, /*require_equal=*/true);
}

std::optional<std::size_t> check_nonsingular(const CountableChain &chain, std::uint64_t x,
                                             std::uint64_t y, std::size_t n_max) {
    return support_search(chain, x, y, n_max, /*require_equal=*/false);
}

std::vector<double> convergence_curve(const FiniteChain &chain, const Dist &start,
                                      const Dist &mu, std::size_t n_max) {
    if (!same_space(chain.space(), start.space()) || !same_space(chain.space(), mu.space()))
        throw InputError("convergence_curve: distribution over a different state list");
    if (!is_invariant(chain, mu))
        throw InputError("convergence_curve: mu is not invariant within 1e-10");

    std::vector<double> curve;
    curve.reserve(n_max + 1);
    std::vector<double> w = start.weights();
    std::vector<double> next(w.size());
    for (std::size_t n = 0; n <= n_max; ++n) {
        if (n > 0) {
            advance(chain.rows(), w, next);
            w.swap(next);
        }
        double tv = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i)
            tv += std::abs(w[i] - mu[i]);
        if (!curve.empty())
            detail::internal_check(tv <= curve.back() + 1e-12,
                                   "convergence curve increased against an invariant measure");
        curve.push_back(tv);
    }
    return curve;
}

std::vector<double> convergence_curve(const FiniteChain &chain, std::size_t x, const Dist &mu,
                                      std::size_t n_max) {
    if (x >= chain.size())
        throw InputError("convergence_curve: state index out of range");
    return convergence_curve(chain, Dist::point_mass(chain.space(), x), mu, n_max);
}

FiniteChain power_chain(const FiniteChain &chain, std::size_t n) {
    if (n == 0)
        throw InputError("power_chain: n must be >= 1");
    if (n == 1)
        return chain;
    std::vector<SparseRow> rows(chain.size());
    for (std::size_t x = 0; x < chain.size(); ++x) {
        std::vector<double> w(chain.size(), 0.0);
        w[x] = 1.0;
        w = evolve_raw(chain, std::move(w), n);
        for (std::size_t y = 0; y < w.size(); ++y)
            if (w[y] != 0.0)
                rows[x].push_back({y, w[y]});
    }
    return FiniteChain(chain.space(), std::move(rows));
}

TruncatedChain truncate(const CountableChain &chain, std::uint64_t cap) {
    std::vector<std::string> labels;
    labels.reserve(cap + 2);
    for (std::uint64_t s = 0; s <= cap; ++s)
        labels.push_back(std::to_string(s));
    labels.push_back("+inf");
    const std::size_t sink = cap + 1;

    std::vector<SparseRow> rows(cap + 2);
    double max_leak = 0.0;
    for (std::uint64_t s = 0; s <= cap; ++s) {
        double leak = 0.0;
        for (const CountableChain::Entry &e : chain.row(s)) {
            if (e.target <= cap)
                rows[s].push_back({static_cast<std::size_t>(e.target), e.probability});
            else
                leak += e.probability;
        }
        if (leak > 0.0)
            rows[s].push_back({sink, leak});
        max_leak = std::max(max_leak, leak);
    }
    rows[sink].push_back({sink, 1.0});
    return TruncatedChain{FiniteChain(make_space(std::move(labels)), std::move(rows)), sink,
                          max_leak};
}

} // namespace coupdoob
