#ifndef COUPDOOB_REPORT_HPP
#define COUPDOOB_REPORT_HPP

#include <string>

#include "coupdoob/exact.hpp"

namespace coupdoob {

// Shortest decimal representation that round-trips to the same double;
// locale-independent, '.' decimal separator. Keeps emitted files byte-stable
// across runs and platforms.
std::string format_double(double value);

// Structured report of a Doob verdict, as a JSON document.
std::string verdict_to_json(const DoobVerdict &verdict, const StateSpace &space);

} // namespace coupdoob

#endif
