#ifndef COUPDOOB_GALLERY_HPP
#define COUPDOOB_GALLERY_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "coupdoob/chain.hpp"

namespace coupdoob {

using ChainVariant = std::variant<FiniteChain, CountableChain>;

// Machine-checkable expectations for a gallery entry; finite entries are
// checked against verify_doob, countable ones against simulation.
struct ExpectedVerdict {
    std::optional<std::string> classification;
    std::optional<std::size_t> ipm_count;
    std::optional<bool> conclusion_allx;
    std::optional<bool> conclusion_mu_ae;
    std::string claim; // human-readable summary of what the entry exhibits
};

struct GalleryEntry {
    std::string name;
    std::string signature; // e.g. "two-state(a,b)"
    bool countable;
    std::string summary;
    ExpectedVerdict expected;
};

const std::vector<GalleryEntry> &gallery_entries();
const GalleryEntry *find_gallery_entry(const std::string &name);

// Constructs a named chain. Unknown names or wrong parameter counts raise
// InputError. Entries: two-state(a,b), swap, identity(k),
// disconnected-two-classes, doob-counterexample, remark3-drift-down.
ChainVariant build_gallery(const std::string &name, const std::vector<double> &params = {});

struct RandomChainOptions {
    double sparsity = 1.0;         // per-entry support probability
    bool force_irreducible = false;
    bool force_aperiodic = false;
    // Resample each row until every kept entry is at least this large; keeps
    // randomly generated chains away from hard-to-simulate near-zero edges.
    double min_entry = 0.0;
};

// Seeded random row-stochastic chain: supports drawn per entry, weights from
// a symmetric Dirichlet. Structural flags are enforced by rejection.
FiniteChain random_chain(std::size_t n_states, const RandomChainOptions &options,
                         std::uint64_t seed);

} // namespace coupdoob

#endif
