#ifndef COUPDOOB_EXACT_HPP
#define COUPDOOB_EXACT_HPP

#include <optional>
#include <string>
#include <vector>

#include "coupdoob/chain.hpp"
#include "coupdoob/coupling.hpp"

namespace coupdoob {

// Exact evolution of the coupled chain Z on the product space. All sequences
// are indexed by kernel steps; one kernel step is step_multiplier base steps
// of the original chain.
struct CouplingAnalysis {
    std::size_t step_multiplier = 1;
    // P(Z^1_n != Z^2_n); equals P(T > n) for diagonal-absorbing kernels.
    std::vector<double> uncoupled_tail;
    // ||Law(Z^1_n) - Law(Z^2_n)||; for a pair start this is the TV between
    // the two n-step laws.
    std::vector<double> tv_curve;
    // 2 * uncoupled_tail - tv_curve; the coupling inequality keeps every
    // entry >= -1e-12.
    std::vector<double> bound_slack;
};

CouplingAnalysis evolve_coupled(const CouplingKernel &kernel, PairKey z0, std::size_t n_max);
// Arbitrary initial law on the product space, e.g. the mu x mu start used by
// the almost-everywhere verdicts.
CouplingAnalysis evolve_coupled(const CouplingKernel &kernel, const JointDist &initial,
                                std::size_t n_max);

// Closed-form solution 1 - (1-p)^k of the coupling-attempt recursion
// p_{k+1} = p(1 - p_k) + p_k from p_0 = 0; a lower bound for P(T <= tau_k).
double attempt_bound(double p, std::size_t k);

// psi(x) = P_x(X_n in B infinitely often), computed structurally: absorption
// probability into the union of recurrent classes intersecting B.
struct RecurrenceReport {
    std::vector<double> psi;               // per state
    std::vector<std::size_t> target_set;   // B, sorted
    std::vector<std::size_t> classes_hit;  // indices of recurrent classes meeting B
    double harmonic_residual;              // max |psi - P psi| over transient states
};

RecurrenceReport recurrence_psi(const FiniteChain &chain, const std::vector<std::size_t> &b);

struct PairCheck {
    std::size_t x, y;
    std::optional<std::size_t> n; // smallest witness step, absent if none <= n_max
};

// Verdict for one extreme invariant measure.
struct IpmVerdict {
    Dist ipm;
    // Non-singularity over supp(mu) x supp(mu).
    std::vector<PairCheck> thm2_pairs;
    bool thm2_assumption_holds;
    // Every x in supp(mu) has ||P_n(x,.) - mu|| below the threshold within
    // the horizon.
    bool conclusion_holds;
};

struct DoobVerdict {
    std::size_t ipm_count = 0;
    std::vector<PairCheck> thm1_pairs; // equivalence, all unordered pairs
    std::vector<PairCheck> cor1_pairs; // non-singularity, all unordered pairs
    bool thm1_assumption_holds = false;
    bool cor1_assumption_holds = false;
    std::vector<IpmVerdict> per_ipm;
    bool conclusion_allx = false;  // unique ipm attracts every start state
    bool conclusion_mu_ae = false; // each extreme ipm attracts its own support
    // One of: theorem-1, corollary-1, theorem-2, theorem-2-partial,
    // no-assumptions.
    std::string classification;
    std::size_t n_max = 0;
    std::size_t horizon = 0;
    double threshold = 0.0;
};

// Default TV threshold under which a convergence curve counts as converged.
inline constexpr double kConvergenceThreshold = 1e-8;

DoobVerdict verify_doob(const FiniteChain &chain, std::size_t n_max, std::size_t horizon,
                        double threshold = kConvergenceThreshold);

} // namespace coupdoob

#endif
