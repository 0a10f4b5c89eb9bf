#include "coupdoob/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coupdoob/errors.hpp"

namespace coupdoob {

StateSpace::StateSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty())
        throw InputError("state space must contain at least one state");
    index_.reserve(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        auto [it, inserted] = index_.emplace(labels_[i], i);
        (void)it;
        if (!inserted)
            throw InputError("duplicate state label '" + labels_[i] + "'");
    }
}

std::optional<std::size_t> StateSpace::find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

std::size_t StateSpace::index_of(std::string_view label) const {
    auto idx = find(label);
    if (!idx)
        throw InputError("unknown state label '" + std::string(label) + "'");
    return *idx;
}

StateSpacePtr make_space(std::vector<std::string> labels) {
    return std::make_shared<const StateSpace>(std::move(labels));
}

StateSpacePtr make_space(std::size_t n_states) {
    std::vector<std::string> labels;
    labels.reserve(n_states);
    for (std::size_t i = 0; i < n_states; ++i)
        labels.push_back(std::to_string(i));
    return make_space(std::move(labels));
}

namespace {

void check_mass(double sum, const std::string &what) {
    if (std::abs(sum - 1.0) > kMassTolerance)
        throw InputError(what + " sums to " + std::to_string(sum) +
                         ", expected 1 within 1e-12");
}

} // namespace

Dist::Dist(StateSpacePtr space, std::vector<double> weights)
    : space_(std::move(space)), weights_(std::move(weights)) {
    if (!space_)
        throw InputError("distribution requires a state space");
    if (weights_.size() != space_->size())
        throw InputError("distribution has " + std::to_string(weights_.size()) +
                         " weights for " + std::to_string(space_->size()) + " states");
    double sum = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (!(weights_[i] >= 0.0))
            throw InputError("negative weight at state '" + space_->label(i) + "'");
        sum += weights_[i];
    }
    check_mass(sum, "distribution");
}

Dist Dist::point_mass(StateSpacePtr space, std::size_t state) {
    if (state >= space->size())
        throw InputError("point mass state index out of range");
    std::vector<double> w(space->size(), 0.0);
    w[state] = 1.0;
    return Dist(std::move(space), std::move(w));
}

Dist Dist::uniform(StateSpacePtr space) {
    std::size_t n = space->size();
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    return Dist(std::move(space), std::move(w));
}

std::vector<std::size_t> Dist::support() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < weights_.size(); ++i)
        if (weights_[i] > 0.0)
            out.push_back(i);
    return out;
}

FiniteChain::FiniteChain(StateSpacePtr space, std::vector<SparseRow> rows)
    : space_(std::move(space)), rows_(std::move(rows)) {
    if (!space_)
        throw InputError("chain requires a state space");
    const std::size_t n = space_->size();
    if (rows_.size() != n)
        throw InputError("chain has " + std::to_string(rows_.size()) + " rows for " +
                         std::to_string(n) + " states");
    for (std::size_t x = 0; x < n; ++x) {
        SparseRow &row = rows_[x];
        std::sort(row.begin(), row.end(),
                  [](const Transition &a, const Transition &b) { return a.target < b.target; });
        double sum = 0.0;
        std::size_t last = n; // sentinel
        SparseRow cleaned;
        cleaned.reserve(row.size());
        for (const Transition &t : row) {
            if (t.target >= n)
                throw InputError("row '" + space_->label(x) + "' references state index " +
                                 std::to_string(t.target) + " outside the state list");
            if (last != n && t.target == last)
                throw InputError("row '" + space_->label(x) + "' has duplicate target '" +
                                 space_->label(t.target) + "'");
            last = t.target;
            if (!(t.probability >= 0.0))
                throw InputError("row '" + space_->label(x) + "' has negative probability for '" +
                                 space_->label(t.target) + "'");
            sum += t.probability;
            if (t.probability > 0.0)
                cleaned.push_back(t);
        }
        check_mass(sum, "row '" + space_->label(x) + "'");
        row = std::move(cleaned);
    }
}

FiniteChain FiniteChain::from_dense(std::vector<std::string> labels,
                                    const std::vector<std::vector<double>> &matrix) {
    auto space = make_space(std::move(labels));
    std::vector<SparseRow> rows(matrix.size());
    for (std::size_t x = 0; x < matrix.size(); ++x) {
        if (matrix[x].size() != space->size())
            throw InputError("dense row " + std::to_string(x) + " has wrong width");
        for (std::size_t y = 0; y < matrix[x].size(); ++y)
            if (matrix[x][y] != 0.0)
                rows[x].push_back({y, matrix[x][y]});
    }
    return FiniteChain(std::move(space), std::move(rows));
}

double FiniteChain::probability(std::size_t from, std::size_t to) const {
    const SparseRow &r = rows_[from];
    auto it = std::lower_bound(r.begin(), r.end(), to, [](const Transition &t, std::size_t y) {
        return t.target < y;
    });
    if (it != r.end() && it->target == to)
        return it->probability;
    return 0.0;
}

Dist FiniteChain::row_dist(std::size_t state) const {
    std::vector<double> w(size(), 0.0);
    for (const Transition &t : rows_[state])
        w[t.target] = t.probability;
    return Dist(space_, std::move(w));
}

CountableChain CountableChain::birth_death(Row boundary_row, double down, double hold, double up) {
    CountableChain chain;
    double boundary_sum = 0.0;
    std::uint64_t last = 0;
    bool first = true;
    for (const Entry &e : boundary_row) {
        if (!first && e.target <= last)
            throw InputError("boundary row targets must be strictly ascending");
        first = false;
        last = e.target;
        if (!(e.probability >= 0.0))
            throw InputError("boundary row has negative probability");
        boundary_sum += e.probability;
    }
    check_mass(boundary_sum, "boundary row");
    if (!(down >= 0.0 && hold >= 0.0 && up >= 0.0))
        throw InputError("birth-death probabilities must be nonnegative");
    check_mass(down + hold + up, "interior row");
    chain.boundary_ = std::move(boundary_row);
    chain.down_ = down;
    chain.hold_ = hold;
    chain.up_ = up;
    chain.description_ = "birth-death(down=" + std::to_string(down) +
                         ", hold=" + std::to_string(hold) + ", up=" + std::to_string(up) + ")";
    return chain;
}

CountableChain CountableChain::from_callback(std::function<Row(std::uint64_t)> rows,
                                             std::string description) {
    if (!rows)
        throw InputError("callback chain requires a row function");
    CountableChain chain;
    chain.callback_ = std::move(rows);
    chain.description_ = std::move(description);
    return chain;
}

CountableChain::Row CountableChain::row(std::uint64_t state) const {
    if (callback_)
        return callback_(state);
    if (state == 0)
        return boundary_;
    Row r;
    if (down_ > 0.0)
        r.push_back({state - 1, down_});
    if (hold_ > 0.0)
        r.push_back({state, hold_});
    if (up_ > 0.0)
        r.push_back({state + 1, up_});
    return r;
}

std::uint64_t CountableChain::step(std::uint64_t state, double u) const {
    if (!callback_ && state > 0) {
        // Fast path: no row materialization for interior birth-death states.
        if (u < down_)
            return state - 1;
        if (u < down_ + hold_)
            return state;
        return state + 1;
    }
    Row r = row(state);
    double cum = 0.0;
    for (const Entry &e : r) {
        cum += e.probability;
        if (u < cum)
            return e.target;
    }
    return r.back().target;
}

} // namespace coupdoob
