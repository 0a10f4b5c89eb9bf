#ifndef COUPDOOB_DETAIL_ROW_MIN_HPP
#define COUPDOOB_DETAIL_ROW_MIN_HPP

#include <vector>

#include "coupdoob/chain.hpp"

namespace coupdoob::detail {

// Dense pointwise minimum and residual numerators of two transition rows.
// At every state at least one residual numerator is exactly zero, so the
// residual supports are disjoint by construction.
struct RowMin {
    std::vector<double> min_vals;
    std::vector<double> residual_1; // P(x1,y) - min, unnormalized
    std::vector<double> residual_2;
    double overlap;    // sum of min_vals = 1 - TV/2
    double res_mass_1; // sum of residual_1
    double res_mass_2;
};

inline RowMin row_min(const FiniteChain &chain, std::size_t x1, std::size_t x2) {
    const std::size_t n = chain.size();
    RowMin out;
    out.min_vals.assign(n, 0.0);
    out.residual_1.assign(n, 0.0);
    out.residual_2.assign(n, 0.0);
    std::vector<double> r1(n, 0.0), r2(n, 0.0);
    for (const Transition &t : chain.row(x1))
        r1[t.target] = t.probability;
    for (const Transition &t : chain.row(x2))
        r2[t.target] = t.probability;
    out.overlap = 0.0;
    out.res_mass_1 = 0.0;
    out.res_mass_2 = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
        double m = r1[y] < r2[y] ? r1[y] : r2[y];
        out.min_vals[y] = m;
        out.overlap += m;
        out.residual_1[y] = r1[y] - m;
        out.residual_2[y] = r2[y] - m;
        out.res_mass_1 += out.residual_1[y];
        out.res_mass_2 += out.residual_2[y];
    }
    return out;
}

} // namespace coupdoob::detail

#endif
