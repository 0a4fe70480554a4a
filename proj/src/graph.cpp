#include "heave/graph.hpp"

#include <algorithm>

#include "heave/error.hpp"

namespace heave::graph {

ConstraintMatrix constraint_from_hierarchy(const Hierarchy& h) {
    const int n = h.size();
    if (n < 1) throw ValidationError("constraint_from_hierarchy: empty hierarchy");
    ConstraintMatrix c(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            c.set(i, j, i == j || h.levels[i] > h.levels[j]);
        }
    }
    return c;
}

ConstraintMatrix constraint_from_ordering(const Ordering& o) {
    const int n = o.size();
    if (n < 1) throw ValidationError("constraint_from_ordering: empty ordering");
    std::vector<int> rank(static_cast<std::size_t>(n), -1);
    for (int k = 0; k < n; ++k) {
        const int node = o.order[static_cast<std::size_t>(k)];
        if (node < 0 || node >= n || rank[static_cast<std::size_t>(node)] != -1) {
            throw ValidationError("constraint_from_ordering: not a permutation of 0.." +
                                  std::to_string(n - 1));
        }
        rank[static_cast<std::size_t>(node)] = k;
    }
    ConstraintMatrix c(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            c.set(i, j, i == j || rank[static_cast<std::size_t>(i)] < rank[static_cast<std::size_t>(j)]);
        }
    }
    return c;
}

namespace {

// Iterative three-colour DFS over the off-diagonal edges. Returns a cycle
// (first == last) if one exists.
std::optional<std::vector<int>> find_cycle_impl(const Digraph& g) {
    const int n = g.n;
    enum : std::uint8_t { kWhite, kGrey, kBlack };
    std::vector<std::uint8_t> colour(static_cast<std::size_t>(n), kWhite);
    std::vector<int> path;

    struct Frame {
        int node;
        int next_neighbour;
    };
    std::vector<Frame> stack;

    for (int start = 0; start < n; ++start) {
        if (colour[static_cast<std::size_t>(start)] != kWhite) continue;
        stack.push_back({start, 0});
        colour[static_cast<std::size_t>(start)] = kGrey;
        path.push_back(start);
        while (!stack.empty()) {
            Frame& frame = stack.back();
            bool descended = false;
            while (frame.next_neighbour < n) {
                const int j = frame.next_neighbour++;
                if (j == frame.node || !g.edge(frame.node, j)) continue;
                if (colour[static_cast<std::size_t>(j)] == kGrey) {
                    // Back edge: the cycle is the path suffix from j.
                    const auto it = std::find(path.begin(), path.end(), j);
                    std::vector<int> cycle(it, path.end());
                    cycle.push_back(j);
                    return cycle;
                }
                if (colour[static_cast<std::size_t>(j)] == kWhite) {
                    colour[static_cast<std::size_t>(j)] = kGrey;
                    stack.push_back({j, 0});
                    path.push_back(j);
                    descended = true;
                    break;
                }
            }
            if (descended) continue;
            colour[static_cast<std::size_t>(frame.node)] = kBlack;
            path.pop_back();
            stack.pop_back();
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::vector<int>> find_cycle(const Digraph& g) { return find_cycle_impl(g); }

std::string format_cycle(const std::vector<int>& cycle) {
    std::string out;
    for (std::size_t i = 0; i < cycle.size(); ++i) {
        if (i > 0) out += " -> ";
        out += std::to_string(cycle[i]);
    }
    return out;
}

bool is_acyclic(const Digraph& g) { return !find_cycle_impl(g).has_value(); }

Hierarchy canonicalize(const Digraph& g) {
    const int n = g.n;
    if (const auto cycle = find_cycle_impl(g)) {
        throw ValidationError("canonicalize: graph has a cycle: " + format_cycle(*cycle));
    }

    // Longest path to a sink over the off-diagonal edges, computed by
    // memoized post-order traversal (explicit stack; no recursion).
    std::vector<int> level(static_cast<std::size_t>(n), 0);
    struct Frame {
        int node;
        int next_neighbour;
    };
    std::vector<Frame> stack;
    for (int start = 0; start < n; ++start) {
        if (level[static_cast<std::size_t>(start)] != 0) continue;
        stack.push_back({start, 0});
        while (!stack.empty()) {
            Frame& frame = stack.back();
            bool descended = false;
            while (frame.next_neighbour < n) {
                const int j = frame.next_neighbour++;
                if (j == frame.node || !g.edge(frame.node, j)) continue;
                if (level[static_cast<std::size_t>(j)] == 0) {
                    stack.push_back({j, 0});
                    descended = true;
                    break;
                }
            }
            if (descended) continue;
            int best = 0;
            for (int j = 0; j < n; ++j) {
                if (j != frame.node && g.edge(frame.node, j)) {
                    best = std::max(best, level[static_cast<std::size_t>(j)]);
                }
            }
            level[static_cast<std::size_t>(frame.node)] = best + 1;
            stack.pop_back();
        }
    }
    return Hierarchy(std::move(level));
}

bool is_consistent(const Digraph& g, const Hierarchy& h) {
    if (h.size() != g.n) throw ValidationError("is_consistent: dimension mismatch");
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) {
            if (i != j && g.edge(i, j) && !(h.levels[i] > h.levels[j])) return false;
        }
    }
    return true;
}

}  // namespace heave::graph
