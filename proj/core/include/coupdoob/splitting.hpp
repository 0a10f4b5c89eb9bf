#ifndef COUPDOOB_SPLITTING_HPP
#define COUPDOOB_SPLITTING_HPP

#include "coupdoob/chain.hpp"

namespace coupdoob {

// Splitting representation of two transition rows:
//
//   P(x_i, .) = overlap_mass * common_part + (1 - overlap_mass) * residual_i
//
// where common_part is the normalized pointwise minimum of the rows and the
// residuals carry the leftover mass on disjoint supports. When a part gets
// weight zero (identical rows, or singular rows) it is replaced by an inert
// point mass at the first state; the inert part is never consumed.
struct SplittingParts {
    double overlap_mass; // 1 - TV(P(x1,.), P(x2,.)) / 2
    Dist common_part;
    Dist residual_1;
    Dist residual_2;
};

SplittingParts split(const FiniteChain &chain, std::size_t x1, std::size_t x2);

} // namespace coupdoob

#endif
