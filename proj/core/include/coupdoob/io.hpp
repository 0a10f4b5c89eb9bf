#ifndef COUPDOOB_IO_HPP
#define COUPDOOB_IO_HPP

#include <filesystem>
#include <string>
#include <string_view>

#include "coupdoob/gallery.hpp"

namespace coupdoob {

// Chain file format: a JSON text document with a "states" label array and a
// sparse "rows" map per state, probabilities written as decimal strings:
//
//   {
//     "states": ["0", "1"],
//     "rows": {
//       "0": { "0": "0.5", "1": "0.5" },
//       "1": { "0": "0.2", "1": "0.8" }
//     }
//   }
//
// Alternatively a gallery reference by name and numeric parameters:
//
//   { "gallery": "two-state", "params": [0.5, 0.2] }
//
// Parse and validation failures raise InputError with the offending line or
// state named.
ChainVariant parse_chain_text(std::string_view text, std::string_view source_name = "<input>");
ChainVariant load_chain_file(const std::filesystem::path &path);

std::string chain_file_text(const FiniteChain &chain);
void save_chain_file(const FiniteChain &chain, const std::filesystem::path &path);

} // namespace coupdoob

#endif
