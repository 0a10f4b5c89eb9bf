#ifndef COUPDOOB_CLI_HPP
#define COUPDOOB_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace coupdoob::cli {

// Runs one CLI invocation. `args` excludes the program name. Reports go to
// `out` (or the --out file), diagnostics to `err`. Returns the process exit
// status: 0 success, 1 input error, 2 --expect mismatch.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace coupdoob::cli

#endif
