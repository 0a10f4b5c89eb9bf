#include "coupdoob/structure.hpp"

#include <algorithm>
#include <numeric>

namespace coupdoob {

namespace {

// Iterative Tarjan; recursion depth would scale with the state count on
// truncated birth-death chains.
std::vector<std::vector<std::size_t>> strongly_connected_components(
    const std::vector<SparseRow> &rows) {
    const std::size_t n = rows.size();
    constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, kUnset), lowlink(n, kUnset);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t next_index = 0;
    std::vector<std::vector<std::size_t>> components;

    struct Frame {
        std::size_t vertex;
        std::size_t edge; // next outgoing edge to visit
    };
    std::vector<Frame> call_stack;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != kUnset)
            continue;
        call_stack.push_back({root, 0});
        index[root] = lowlink[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;

        while (!call_stack.empty()) {
            Frame &frame = call_stack.back();
            const SparseRow &row = rows[frame.vertex];
            if (frame.edge < row.size()) {
                std::size_t w = row[frame.edge].target;
                ++frame.edge;
                if (index[w] == kUnset) {
                    index[w] = lowlink[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call_stack.push_back({w, 0});
                } else if (on_stack[w]) {
                    lowlink[frame.vertex] = std::min(lowlink[frame.vertex], index[w]);
                }
            } else {
                std::size_t v = frame.vertex;
                call_stack.pop_back();
                if (!call_stack.empty())
                    lowlink[call_stack.back().vertex] =
                        std::min(lowlink[call_stack.back().vertex], lowlink[v]);
                if (lowlink[v] == index[v]) {
                    std::vector<std::size_t> component;
                    for (;;) {
                        std::size_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        component.push_back(w);
                        if (w == v)
                            break;
                    }
                    std::sort(component.begin(), component.end());
                    components.push_back(std::move(component));
                }
            }
        }
    }
    return components;
}

// gcd of internal cycle lengths via BFS levels: for every internal edge
// u -> v, the quantity level(u) + 1 - level(v) divides every cycle length.
std::size_t class_period(const std::vector<SparseRow> &rows,
                         const std::vector<std::size_t> &members,
                         const std::vector<std::size_t> &class_of, std::size_t class_index) {
    constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> level(rows.size(), kUnset);
    std::vector<std::size_t> queue;
    queue.push_back(members.front());
    level[members.front()] = 0;
    long long g = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        std::size_t u = queue[head];
        for (const Transition &t : rows[u]) {
            if (class_of[t.target] != class_index)
                continue;
            if (level[t.target] == kUnset) {
                level[t.target] = level[u] + 1;
                queue.push_back(t.target);
            } else {
                long long d = static_cast<long long>(level[u]) + 1 -
                              static_cast<long long>(level[t.target]);
                g = std::gcd(g, d < 0 ? -d : d);
            }
        }
    }
    return static_cast<std::size_t>(g);
}

} // namespace

ChainStructure structure(const FiniteChain &chain) {
    const auto &rows = chain.rows();
    auto components = strongly_connected_components(rows);
    std::sort(components.begin(), components.end(),
              [](const auto &a, const auto &b) { return a.front() < b.front(); });

    ChainStructure result;
    result.class_of.assign(chain.size(), 0);
    for (std::size_t c = 0; c < components.size(); ++c)
        for (std::size_t state : components[c])
            result.class_of[state] = c;

    for (std::size_t c = 0; c < components.size(); ++c) {
        CommunicatingClass cls;
        cls.members = std::move(components[c]);
        cls.recurrent = true;
        for (std::size_t state : cls.members)
            for (const Transition &t : rows[state])
                if (result.class_of[t.target] != c)
                    cls.recurrent = false;
        cls.period = class_period(rows, cls.members, result.class_of, c);
        result.classes.push_back(std::move(cls));
    }
    return result;
}

} // namespace coupdoob
