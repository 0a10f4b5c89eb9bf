#ifndef COUPDOOB_CHAIN_OPS_HPP
#define COUPDOOB_CHAIN_OPS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "coupdoob/chain.hpp"

namespace coupdoob {

// Invariance tolerance used by operations that take a stationary
// distribution as a precondition.
inline constexpr double kInvarianceTolerance = 1e-10;

// Law of X_n started from x (or from a distribution), by repeated sparse
// vector-matrix products. n = 0 returns the start itself.
Dist n_step(const FiniteChain &chain, std::size_t x, std::size_t n);
Dist n_step(const FiniteChain &chain, const Dist &start, std::size_t n);

// Total variation of the signed measure d1 - d2: sum of |d1(i) - d2(i)|,
// range [0, 2]; equals 2 exactly when the supports are disjoint.
double total_variation(const Dist &d1, const Dist &d2);

// max_y |sum_x mu(x) P(x,y) - mu(y)|, the fixed-point residual of mu.
double invariance_residual(const FiniteChain &chain, const Dist &mu);
bool is_invariant(const FiniteChain &chain, const Dist &mu,
                  double tolerance = kInvarianceTolerance);

// The extreme (ergodic) invariant measures: one per recurrent class, the
// stationary vector of the restricted matrix embedded with zeros elsewhere,
// ordered by the class's smallest member. Every general invariant measure is
// a convex combination of these.
std::vector<Dist> invariant_measures(const FiniteChain &chain);

// Smallest n in [1, n_max] at which the n-step laws from x and y have equal
// supports (equivalence of measures, on a finite space). Supports are
// iterated as boolean reachability sets; no floating-point thresholds.
std::optional<std::size_t> check_equivalence(const FiniteChain &chain, std::size_t x,
                                             std::size_t y, std::size_t n_max);
// Same, with supports required to intersect (non-singularity) instead of
// coincide.
std::optional<std::size_t> check_nonsingular(const FiniteChain &chain, std::size_t x,
                                             std::size_t y, std::size_t n_max);

// Support iteration for countable chains; supports stay finite because each
// row has finitely many targets.
std::optional<std::size_t> check_equivalence(const CountableChain &chain, std::uint64_t x,
                                             std::uint64_t y, std::size_t n_max);
std::optional<std::size_t> check_nonsingular(const CountableChain &chain, std::uint64_t x,
                                             std::uint64_t y, std::size_t n_max);

// ||P_n(x,.) - mu|| for n = 0..n_max. Requires mu invariant within
// kInvarianceTolerance; the returned sequence is checked to be
// non-increasing within 1e-12.
std::vector<double> convergence_curve(const FiniteChain &chain, std::size_t x, const Dist &mu,
                                      std::size_t n_max);
std::vector<double> convergence_curve(const FiniteChain &chain, const Dist &start,
                                      const Dist &mu, std::size_t n_max);

// The n-step chain: a FiniteChain whose rows are the rows of P^n (n >= 1).
FiniteChain power_chain(const FiniteChain &chain, std::size_t n);

// Truncation of a countable chain to states {0..cap}: probability mass
// leaving the window is routed to an explicit absorbing sink state labeled
// "+inf", so the leaked mass stays accounted for.
struct TruncatedChain {
    FiniteChain chain;       // states "0".."cap" plus trailing "+inf" sink
    std::size_t sink;        // index of the sink state
    double max_row_leak;     // largest per-row mass routed to the sink
};
TruncatedChain truncate(const CountableChain &chain, std::uint64_t cap);

} // namespace coupdoob

#endif
