#include "coupdoob/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "coupdoob/chain_ops.hpp"
#include "coupdoob/errors.hpp"
#include "detail_row_min.hpp"

namespace coupdoob {

namespace {

// Membership comparisons get a small absolute slack so that a pair sitting
// exactly on the 2(1-p) boundary (e.g. when p was derived from that pair's
// own computed TV) is not lost to double rounding.
constexpr double kBoundaryTolerance = 1e-12;

} // namespace

JointDist::JointDist(StateSpacePtr space, std::vector<Entry> entries)
    : space_(std::move(space)), entries_(std::move(entries)) {
    if (!space_)
        throw InputError("joint distribution requires a state space");
    const std::size_t n = space_->size();
    std::sort(entries_.begin(), entries_.end(), [](const Entry &a, const Entry &b) {
        return a.first.first != b.first.first ? a.first.first < b.first.first
                                              : a.first.second < b.first.second;
    });
    double sum = 0.0;
    const PairKey *last = nullptr;
    std::vector<Entry> cleaned;
    cleaned.reserve(entries_.size());
    for (const Entry &e : entries_) {
        if (e.first.first >= n || e.first.second >= n)
            throw InputError("joint distribution pair index out of range");
        if (last && *last == e.first)
            throw InputError("joint distribution has a duplicate pair entry");
        last = &e.first;
        if (!(e.second >= 0.0))
            throw InputError("joint distribution has a negative weight");
        sum += e.second;
        if (e.second > 0.0)
            cleaned.push_back(e);
    }
    if (std::abs(sum - 1.0) > kMassTolerance)
        throw InputError("joint distribution mass is " + std::to_string(sum) +
                         ", expected 1 within 1e-12");
    entries_ = std::move(cleaned);
}

JointDist JointDist::product(const Dist &d1, const Dist &d2) {
    if (!d1.same_space_as(d2))
        throw InputError("product: distributions over different state lists");
    std::vector<Entry> entries;
    for (std::size_t a = 0; a < d1.size(); ++a) {
        if (d1[a] == 0.0)
            continue;
        for (std::size_t b = 0; b < d2.size(); ++b)
            if (d2[b] > 0.0)
                entries.push_back({{a, b}, d1[a] * d2[b]});
    }
    return JointDist(d1.space(), std::move(entries));
}

JointDist JointDist::diagonal_image(const Dist &d) {
    std::vector<Entry> entries;
    for (std::size_t y = 0; y < d.size(); ++y)
        if (d[y] > 0.0)
            entries.push_back({{y, y}, d[y]});
    return JointDist(d.space(), std::move(entries));
}

double JointDist::mass(PairKey z) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), z,
                               [](const Entry &e, const PairKey &k) {
                                   return e.first.first != k.first ? e.first.first < k.first
                                                                   : e.first.second < k.second;
                               });
    if (it != entries_.end() && it->first == z)
        return it->second;
    return 0.0;
}

double JointDist::diagonal_mass() const {
    double m = 0.0;
    for (const Entry &e : entries_)
        if (e.first.diagonal())
            m += e.second;
    return m;
}

std::vector<double> JointDist::marginal_first() const {
    std::vector<double> w(space_->size(), 0.0);
    for (const Entry &e : entries_)
        w[e.first.first] += e.second;
    return w;
}

std::vector<double> JointDist::marginal_second() const {
    std::vector<double> w(space_->size(), 0.0);
    for (const Entry &e : entries_)
        w[e.first.second] += e.second;
    return w;
}

JointDist maximal_coupling_row(const FiniteChain &chain, std::size_t x1, std::size_t x2) {
    if (x1 >= chain.size() || x2 >= chain.size())
        throw InputError("maximal_coupling_row: state index out of range");
    detail::RowMin rm = detail::row_min(chain, x1, x2);
    std::vector<JointDist::Entry> entries;
    for (std::size_t y = 0; y < rm.min_vals.size(); ++y)
        if (rm.min_vals[y] > 0.0)
            entries.push_back({{y, y}, rm.min_vals[y]});
    // Residual product; zero on the diagonal since the residual supports are
    // disjoint. Weighting by 1/res_mass_2 keeps both marginals at roundoff.
    if (rm.res_mass_2 > 0.0) {
        for (std::size_t a = 0; a < rm.residual_1.size(); ++a) {
            if (rm.residual_1[a] == 0.0)
                continue;
            for (std::size_t b = 0; b < rm.residual_2.size(); ++b)
                if (rm.residual_2[b] > 0.0)
                    entries.push_back(
                        {{a, b}, rm.residual_1[a] * (rm.residual_2[b] / rm.res_mass_2)});
        }
    }
    return JointDist(chain.space(), std::move(entries));
}

JointDist independent_row(const FiniteChain &chain, std::size_t x1, std::size_t x2) {
    if (x1 >= chain.size() || x2 >= chain.size())
        throw InputError("independent_row: state index out of range");
    std::vector<JointDist::Entry> entries;
    for (const Transition &t1 : chain.row(x1))
        for (const Transition &t2 : chain.row(x2))
            entries.push_back({{t1.target, t2.target}, t1.probability * t2.probability});
    return JointDist(chain.space(), std::move(entries));
}

DoeblinSet::DoeblinSet(StateSpacePtr space, std::size_t n_steps, double p,
                       std::vector<bool> members)
    : space_(std::move(space)), n_steps_(n_steps), p_(p), members_(std::move(members)) {
    if (n_steps_ < 1)
        throw InputError("Doeblin set requires N >= 1");
    if (!(p_ > 0.0 && p_ < 1.0))
        throw InputError("Doeblin set requires p in (0,1)");
    detail::internal_check(members_.size() == space_->size() * space_->size(),
                           "Doeblin membership table has wrong size");
    for (std::size_t x = 0; x < space_->size(); ++x)
        detail::internal_check(members_[x * space_->size() + x],
                               "Doeblin set must contain the diagonal");
}

std::size_t DoeblinSet::member_count() const {
    return static_cast<std::size_t>(std::count(members_.begin(), members_.end(), true));
}

double DoeblinSet::mass_under(const Dist &mu) const {
    if (!same_space(space_, mu.space()))
        throw InputError("mass_under: distribution over a different state list");
    const std::size_t n = space_->size();
    double mass = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        if (mu[x] == 0.0)
            continue;
        for (std::size_t y = 0; y < n; ++y)
            if (members_[x * n + y] && mu[y] > 0.0)
                mass += mu[x] * mu[y];
    }
    return mass;
}

DoeblinSet doeblin_set(const FiniteChain &chain, std::size_t n_steps, double p) {
    if (n_steps < 1)
        throw InputError("doeblin_set: N must be >= 1");
    if (!(p > 0.0 && p < 1.0))
        throw InputError("doeblin_set: p must lie in (0,1)");
    const std::size_t n = chain.size();
    std::vector<Dist> laws;
    laws.reserve(n);
    for (std::size_t x = 0; x < n; ++x)
        laws.push_back(n_step(chain, x, n_steps));
    const double threshold = 2.0 * (1.0 - p) + kBoundaryTolerance;
    std::vector<bool> members(n * n, false);
    for (std::size_t x = 0; x < n; ++x) {
        members[x * n + x] = true;
        for (std::size_t y = x + 1; y < n; ++y) {
            if (total_variation(laws[x], laws[y]) <= threshold) {
                members[x * n + y] = true;
                members[y * n + x] = true;
            }
        }
    }
    return DoeblinSet(chain.space(), n_steps, p, std::move(members));
}

std::optional<DoeblinSet> select_doeblin(const FiniteChain &chain, const Dist &mu,
                                         std::size_t n_max) {
    if (!same_space(chain.space(), mu.space()))
        throw InputError("select_doeblin: mu is over a different state list");
    if (!is_invariant(chain, mu))
        throw InputError("select_doeblin: mu is not invariant within 1e-10");
    if (n_max < 1)
        throw InputError("select_doeblin: N_max must be >= 1");

    const std::size_t n = chain.size();
    double diag_mass = 0.0;
    for (std::size_t x = 0; x < n; ++x)
        diag_mass += mu[x] * mu[x];

    struct Candidate {
        double score;
        std::size_t n_steps;
        double p;
    };
    std::optional<Candidate> best;
    constexpr double kTie = 1e-9;
    auto better = [&](const Candidate &c) {
        if (!best)
            return true;
        if (c.score < best->score - kTie)
            return true;
        if (c.score > best->score + kTie)
            return false;
        if (c.n_steps != best->n_steps)
            return c.n_steps < best->n_steps;
        return c.p > best->p;
    };

    // laws[x] tracks P_N(x,.) incrementally over N.
    std::vector<Dist> laws;
    laws.reserve(n);
    for (std::size_t x = 0; x < n; ++x)
        laws.push_back(chain.row_dist(x));

    for (std::size_t steps = 1; steps <= n_max; ++steps) {
        if (steps > 1)
            for (std::size_t x = 0; x < n; ++x)
                laws[x] = n_step(chain, laws[x], 1);

        struct PairTv {
            double tv;
            double pair_mass; // mu(x)mu(y) + mu(y)mu(x)
        };
        std::vector<PairTv> overlapping;
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = x + 1; y < n; ++y) {
                bool meets = false;
                for (std::size_t s = 0; s < n; ++s)
                    if (laws[x][s] > 0.0 && laws[y][s] > 0.0) {
                        meets = true;
                        break;
                    }
                if (meets)
                    overlapping.push_back(
                        {total_variation(laws[x], laws[y]), 2.0 * mu[x] * mu[y]});
            }
        if (overlapping.empty())
            continue;
        std::sort(overlapping.begin(), overlapping.end(),
                  [](const PairTv &a, const PairTv &b) { return a.tv < b.tv; });

        // Each distinct TV level is one achievable p; C at that level is the
        // prefix of pairs at or below it, plus the diagonal.
        double mass = diag_mass;
        std::size_t i = 0;
        while (i < overlapping.size()) {
            double tv = overlapping[i].tv;
            while (i < overlapping.size() &&
                   overlapping[i].tv <= tv + kBoundaryTolerance) {
                mass += overlapping[i].pair_mass;
                ++i;
            }
            // Clamp duplicate-row pairs (tv = 0) into (0,1).
            double p = 1.0 - std::max(tv, 2.0 * kBoundaryTolerance) / 2.0;
            double score =
                std::pow(std::max(0.0, 1.0 - p * mass), 1.0 / static_cast<double>(steps));
            Candidate cand{score, steps, p};
            if (better(cand))
                best = cand;
        }
    }

    if (!best)
        return std::nullopt;
    return doeblin_set(chain, best->n_steps, best->p);
}

CouplingKernel::CouplingKernel(FiniteChain step_chain, KernelKind kind, std::size_t multiplier,
                               std::optional<DoeblinSet> doeblin)
    : step_chain_(std::move(step_chain)), kind_(kind), step_multiplier_(multiplier),
      doeblin_(std::move(doeblin)), cache_(std::make_unique<RowCache>()) {}

JointDist CouplingKernel::build_row(PairKey z) const {
    switch (kind_) {
    case KernelKind::maximal:
        return maximal_coupling_row(step_chain_, z.first, z.second);
    case KernelKind::independent:
        return independent_row(step_chain_, z.first, z.second);
    case KernelKind::hybrid:
        return doeblin_->contains(z) ? maximal_coupling_row(step_chain_, z.first, z.second)
                                     : independent_row(step_chain_, z.first, z.second);
    }
    throw std::logic_error("unreachable kernel kind");
}

const JointDist &CouplingKernel::row(PairKey z) const {
    if (z.first >= step_chain_.size() || z.second >= step_chain_.size())
        throw InputError("coupling kernel row: state index out of range");
    const std::size_t key = z.first * step_chain_.size() + z.second;
    {
        std::shared_lock lock(cache_->mutex);
        auto it = cache_->rows.find(key);
        if (it != cache_->rows.end())
            return *it->second;
    }
    // Built outside the lock; concurrent duplicate construction is fine, the
    // first insert wins and rows are never erased.
    auto built = std::make_shared<const JointDist>(build_row(z));
    std::unique_lock lock(cache_->mutex);
    auto [it, inserted] = cache_->rows.try_emplace(key, std::move(built));
    (void)inserted;
    return *it->second;
}

CouplingKernel maximal_kernel(FiniteChain chain) {
    return CouplingKernel(std::move(chain), KernelKind::maximal, 1, std::nullopt);
}

CouplingKernel independent_kernel(FiniteChain chain) {
    return CouplingKernel(std::move(chain), KernelKind::independent, 1, std::nullopt);
}

CouplingKernel hybrid_kernel(const FiniteChain &chain, DoeblinSet c) {
    if (!same_space(chain.space(), c.space()))
        throw InputError("hybrid_kernel: Doeblin set over a different state list");
    // The construction assumes one kernel step couples with probability >= p
    // on C; for N > 1 that holds over the N-step chain, and coupled-time
    // indices convert back to base steps via step_multiplier().
    FiniteChain step = power_chain(chain, c.n_steps());
    std::size_t multiplier = c.n_steps();
    return CouplingKernel(std::move(step), KernelKind::hybrid, multiplier, std::move(c));
}

} // namespace coupdoob
