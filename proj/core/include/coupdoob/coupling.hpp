#ifndef COUPDOOB_COUPLING_HPP
#define COUPDOOB_COUPLING_HPP

#include <memory>
#include <optional>
#include <shared_mutex>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coupdoob/chain.hpp"

namespace coupdoob {

// Exact product-space analysis is limited to this many ordered pairs; larger
// chains go through the Monte Carlo path.
inline constexpr std::size_t kExactPairCap = 10000;

struct PairKey {
    std::size_t first;
    std::size_t second;

    bool operator==(const PairKey &) const = default;
    bool diagonal() const { return first == second; }
};

// A probability measure on ordered state pairs, stored sparsely with entries
// sorted by (first, second).
class JointDist {
public:
    using Entry = std::pair<PairKey, double>;

    JointDist(StateSpacePtr space, std::vector<Entry> entries);

    static JointDist product(const Dist &d1, const Dist &d2);
    // Image of d under y -> (y, y).
    static JointDist diagonal_image(const Dist &d);

    const StateSpacePtr &space() const { return space_; }
    const std::vector<Entry> &entries() const { return entries_; }
    double mass(PairKey z) const;
    double diagonal_mass() const;
    std::vector<double> marginal_first() const;
    std::vector<double> marginal_second() const;

private:
    StateSpacePtr space_;
    std::vector<Entry> entries_;
};

// The Doeblin pair set C_{N,p}: ordered pairs whose N-step laws differ by at
// most 2(1-p) in total variation, i.e. overlap by at least p. Contains every
// diagonal pair.
class DoeblinSet {
public:
    DoeblinSet(StateSpacePtr space, std::size_t n_steps, double p,
               std::vector<bool> members);

    const StateSpacePtr &space() const { return space_; }
    std::size_t n_steps() const { return n_steps_; }
    double p() const { return p_; }
    bool contains(PairKey z) const { return members_[z.first * space_->size() + z.second]; }
    std::size_t member_count() const;
    // (mu x mu)-mass of the member set.
    double mass_under(const Dist &mu) const;

private:
    StateSpacePtr space_;
    std::size_t n_steps_;
    double p_;
    std::vector<bool> members_; // row-major over ordered pairs
};

enum class KernelKind { maximal, independent, hybrid };

// A Markov transition kernel on the product space E x E. Rows are built on
// demand and cached; the cache is write-once and safe under concurrent
// readers, and duplicate construction of a row is idempotent.
class CouplingKernel {
public:
    const JointDist &row(PairKey z) const;
    const JointDist &row(std::size_t x1, std::size_t x2) const { return row({x1, x2}); }

    KernelKind kind() const { return kind_; }
    // The chain one kernel step advances: the base chain for maximal and
    // independent kernels, the N-step chain for a hybrid built from C_{N,p}.
    const FiniteChain &step_chain() const { return step_chain_; }
    // Base steps per kernel step (the N of the Doeblin set, else 1).
    std::size_t step_multiplier() const { return step_multiplier_; }
    const std::optional<DoeblinSet> &doeblin() const { return doeblin_; }
    // True when the diagonal is absorbing, i.e. every row at (x,x) keeps the
    // pair together. Holds for maximal and hybrid kernels, not independent.
    bool diagonal_absorbing() const { return kind_ != KernelKind::independent; }

    friend CouplingKernel maximal_kernel(FiniteChain chain);
    friend CouplingKernel independent_kernel(FiniteChain chain);
    friend CouplingKernel hybrid_kernel(const FiniteChain &chain, DoeblinSet c);

private:
    CouplingKernel(FiniteChain step_chain, KernelKind kind, std::size_t multiplier,
                   std::optional<DoeblinSet> doeblin);

    JointDist build_row(PairKey z) const;

    FiniteChain step_chain_;
    KernelKind kind_;
    std::size_t step_multiplier_;
    std::optional<DoeblinSet> doeblin_;

    struct RowCache {
        mutable std::shared_mutex mutex;
        mutable std::unordered_map<std::size_t, std::shared_ptr<const JointDist>> rows;
    };
    std::unique_ptr<RowCache> cache_;
};

// The maximal-coupling row Q((x1,x2), .): the overlap mass goes to the
// diagonal through the common part, the rest is the product of the two
// residuals. Marginals are P(x1,.) and P(x2,.); diagonal mass is 1 - TV/2.
JointDist maximal_coupling_row(const FiniteChain &chain, std::size_t x1, std::size_t x2);
// The independent-coupling row R((x1,x2), .) = P(x1,.) x P(x2,.).
JointDist independent_row(const FiniteChain &chain, std::size_t x1, std::size_t x2);

// Kernels over the whole product space (subject to kExactPairCap).
CouplingKernel maximal_kernel(FiniteChain chain);
CouplingKernel independent_kernel(FiniteChain chain);
// Hybrid kernel S: maximal rows on C, independent rows off C, built over the
// N-step chain when C was computed from N-step laws.
CouplingKernel hybrid_kernel(const FiniteChain &chain, DoeblinSet c);

// C_{N,p} from exact N-step laws.
DoeblinSet doeblin_set(const FiniteChain &chain, std::size_t n_steps, double p);

// Grid search over N = 1..n_max and the achievable overlap levels
// p = 1 - TV_N(x,y)/2. Candidates are scored by the per-base-step uncoupled
// rate (1 - p * (mu x mu)(C_{N,p}))^(1/N); ties go to smaller N, then larger
// p. Returns nullopt when no off-diagonal pair of N-step laws overlaps for
// any N <= n_max (the assumptions fail).
std::optional<DoeblinSet> select_doeblin(const FiniteChain &chain, const Dist &mu,
                                         std::size_t n_max);

} // namespace coupdoob

#endif
