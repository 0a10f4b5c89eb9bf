#include "coupdoob/splitting.hpp"

#include <vector>

#include "coupdoob/errors.hpp"
#include "detail_row_min.hpp"

namespace coupdoob {

SplittingParts split(const FiniteChain &chain, std::size_t x1, std::size_t x2) {
    if (x1 >= chain.size() || x2 >= chain.size())
        throw InputError("split: state index out of range");
    detail::RowMin rm = detail::row_min(chain, x1, x2);
    const StateSpacePtr &space = chain.space();

    auto inert = [&] { return Dist::point_mass(space, 0); };

    Dist common = [&] {
        if (rm.overlap == 0.0)
            return inert();
        std::vector<double> w(rm.min_vals);
        for (double &v : w)
            v /= rm.overlap;
        return Dist(space, std::move(w));
    }();

    auto residual = [&](const std::vector<double> &numer, double mass) {
        if (mass == 0.0)
            return inert();
        std::vector<double> w(numer);
        for (double &v : w)
            v /= mass;
        return Dist(space, std::move(w));
    };

    return SplittingParts{rm.overlap, std::move(common), residual(rm.residual_1, rm.res_mass_1),
                          residual(rm.residual_2, rm.res_mass_2)};
}

} // namespace coupdoob
