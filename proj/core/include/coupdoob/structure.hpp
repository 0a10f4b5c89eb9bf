#ifndef COUPDOOB_STRUCTURE_HPP
#define COUPDOOB_STRUCTURE_HPP

#include <cstddef>
#include <vector>

#include "coupdoob/chain.hpp"

namespace coupdoob {

struct CommunicatingClass {
    std::vector<std::size_t> members; // ascending state indices
    bool recurrent;                   // closed: no positive edge leaves the class
    std::size_t period;               // gcd of internal cycle lengths; 0 if the class has no cycle
};

// Partition of the state set into communicating classes of the digraph of
// strictly positive transitions.
struct ChainStructure {
    std::vector<CommunicatingClass> classes; // ordered by smallest member
    std::vector<std::size_t> class_of;       // state index -> class index

    std::size_t recurrent_count() const {
        std::size_t k = 0;
        for (const auto &c : classes)
            k += c.recurrent ? 1 : 0;
        return k;
    }
};

ChainStructure structure(const FiniteChain &chain);

} // namespace coupdoob

#endif
