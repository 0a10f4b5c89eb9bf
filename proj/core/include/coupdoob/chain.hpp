#ifndef COUPDOOB_CHAIN_HPP
#define COUPDOOB_CHAIN_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace coupdoob {

// Tolerance for "this vector of probabilities sums to one". Rows or
// distributions violating it are rejected, never renormalized, so that
// malformed inputs surface as errors.
inline constexpr double kMassTolerance = 1e-12;

// An ordered, immutable list of state labels shared by a chain and every
// distribution over it.
class StateSpace {
public:
    explicit StateSpace(std::vector<std::string> labels);

    std::size_t size() const { return labels_.size(); }
    const std::string &label(std::size_t i) const { return labels_[i]; }
    const std::vector<std::string> &labels() const { return labels_; }
    std::optional<std::size_t> find(std::string_view label) const;
    // Throws InputError when the label is unknown.
    std::size_t index_of(std::string_view label) const;

    bool operator==(const StateSpace &other) const { return labels_ == other.labels_; }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::size_t> index_;
};

using StateSpacePtr = std::shared_ptr<const StateSpace>;

StateSpacePtr make_space(std::vector<std::string> labels);
// Labels "0", "1", ..., "n-1".
StateSpacePtr make_space(std::size_t n_states);

inline bool same_space(const StateSpacePtr &a, const StateSpacePtr &b) {
    return a == b || *a == *b;
}

struct Transition {
    std::size_t target;
    double probability;
};

// Sparse transition row, sorted by ascending target index, zero entries
// dropped at construction.
using SparseRow = std::vector<Transition>;

// A probability vector over a state space. Entries are validated to be
// nonnegative and to sum to one within kMassTolerance.
class Dist {
public:
    Dist(StateSpacePtr space, std::vector<double> weights);

    static Dist point_mass(StateSpacePtr space, std::size_t state);
    // Uniform over a nonempty subset of states.
    static Dist uniform(StateSpacePtr space);

    const StateSpacePtr &space() const { return space_; }
    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    const std::vector<double> &weights() const { return weights_; }

    bool same_space_as(const Dist &other) const { return same_space(space_, other.space_); }
    // Indices with strictly positive weight.
    std::vector<std::size_t> support() const;

private:
    StateSpacePtr space_;
    std::vector<double> weights_;
};

// A finite Markov chain: a row-stochastic transition matrix stored sparsely.
class FiniteChain {
public:
    FiniteChain(StateSpacePtr space, std::vector<SparseRow> rows);

    static FiniteChain from_dense(std::vector<std::string> labels,
                                  const std::vector<std::vector<double>> &matrix);

    const StateSpacePtr &space() const { return space_; }
    std::size_t size() const { return space_->size(); }
    const SparseRow &row(std::size_t state) const { return rows_[state]; }
    const std::vector<SparseRow> &rows() const { return rows_; }
    double probability(std::size_t from, std::size_t to) const;
    std::size_t index_of(std::string_view label) const { return space_->index_of(label); }

    Dist row_dist(std::size_t state) const;

private:
    StateSpacePtr space_;
    std::vector<SparseRow> rows_;
};

// A countable-state chain on the nonnegative integers, given either by the
// parametric birth-death family (boundary row at 0, fixed down/hold/up
// probabilities for interior states) or by an arbitrary row callback. The
// callback form is not serializable. No global matrix is ever materialized;
// each state has finitely many targets.
class CountableChain {
public:
    struct Entry {
        std::uint64_t target;
        double probability;
    };
    using Row = std::vector<Entry>; // ascending target

    static CountableChain birth_death(Row boundary_row, double down, double hold, double up);
    static CountableChain from_callback(std::function<Row(std::uint64_t)> rows,
                                        std::string description = "callback chain");

    Row row(std::uint64_t state) const;
    // Inverse-CDF step: maps a uniform draw in [0,1) to the next state,
    // walking the row in ascending target order.
    std::uint64_t step(std::uint64_t state, double u) const;

    bool is_birth_death() const { return !callback_; }
    // Birth-death parameters (only meaningful for the parametric form).
    double down() const { return down_; }
    double hold() const { return hold_; }
    double up() const { return up_; }
    const Row &boundary_row() const { return boundary_; }
    const std::string &description() const { return description_; }

private:
    CountableChain() = default;

    Row boundary_;
    double down_ = 0.0, hold_ = 0.0, up_ = 0.0;
    std::function<Row(std::uint64_t)> callback_;
    std::string description_;
};

} // namespace coupdoob

#endif
