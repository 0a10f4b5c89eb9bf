#ifndef COUPDOOB_ERRORS_HPP
#define COUPDOOB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace coupdoob {

// Raised for malformed user input: bad chain files, unknown state labels,
// out-of-range parameters. The CLI maps this to exit status 1.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

// Internal consistency check. Failure means a bug, not bad input.
inline void internal_check(bool condition, const char *what) {
    if (!condition)
        throw std::logic_error(std::string("internal invariant violated: ") + what);
}

} // namespace detail
} // namespace coupdoob

#endif
