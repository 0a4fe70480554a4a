#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

// Graph-side vocabulary of the model: directed graphs over positionally
// identified nodes, integer hierarchies, topological orderings, and the
// constraint matrices they induce. Node identity is the index 0..n-1;
// external files attach names at ingestion.
//
// Self-loops are control variables throughout: acyclicity, consistency
// and canonical levels are always judged on the off-diagonal part only.

namespace heave::graph {

struct Digraph {
    int n = 0;
    std::vector<std::uint8_t> adj;  // row-major, adj[i*n+j] == 1 means edge i -> j

    Digraph() = default;
    explicit Digraph(int nodes)
        : n(nodes), adj(static_cast<std::size_t>(nodes) * nodes, 0) {}

    bool edge(int i, int j) const { return adj[static_cast<std::size_t>(i) * n + j] != 0; }
    void set_edge(int i, int j, bool present = true) {
        adj[static_cast<std::size_t>(i) * n + j] = present ? 1 : 0;
    }
    int edge_count_off_diagonal() const {
        int count = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && edge(i, j)) ++count;
        return count;
    }
    bool operator==(const Digraph&) const = default;
};

struct Hierarchy {
    std::vector<int> levels;  // levels[j] is the level of node j

    Hierarchy() = default;
    explicit Hierarchy(std::vector<int> values) : levels(std::move(values)) {}
    Hierarchy(std::initializer_list<int> values) : levels(values) {}
    int size() const { return static_cast<int>(levels.size()); }
    bool operator==(const Hierarchy&) const = default;
};

struct Ordering {
    std::vector<int> order;  // order[k] is the node at rank k; sources precede targets

    Ordering() = default;
    explicit Ordering(std::vector<int> perm) : order(std::move(perm)) {}
    Ordering(std::initializer_list<int> perm) : order(perm) {}
    int size() const { return static_cast<int>(order.size()); }
    bool operator==(const Ordering&) const = default;
};

// Binary mask of permissible links. mask(i,j) == 1 means an edge i -> j is
// allowed. The diagonal is always allowed; the off-diagonal support is
// acyclic by construction and never permits both directions of a pair.
struct ConstraintMatrix {
    int n = 0;
    std::vector<std::uint8_t> mask;

    ConstraintMatrix() = default;
    explicit ConstraintMatrix(int nodes)
        : n(nodes), mask(static_cast<std::size_t>(nodes) * nodes, 0) {}

    bool allows(int i, int j) const { return mask[static_cast<std::size_t>(i) * n + j] != 0; }
    void set(int i, int j, bool allowed = true) {
        mask[static_cast<std::size_t>(i) * n + j] = allowed ? 1 : 0;
    }
    int ones_count() const {
        int count = 0;
        for (const auto v : mask) count += v;
        return count;
    }
    bool operator==(const ConstraintMatrix&) const = default;
};

// mask(i,j) = 1 iff levels[i] > levels[j] or i == j. Only relative levels
// matter; ties forbid both directions.
ConstraintMatrix constraint_from_hierarchy(const Hierarchy& h);

// mask(i,j) = 1 iff i precedes j in the ordering, or i == j.
ConstraintMatrix constraint_from_ordering(const Ordering& o);

// Minimal positive consistent hierarchy of a DAG: sinks (no off-diagonal
// outgoing edges) get level 1, every other node 1 + max over out-neighbour
// levels. Throws ValidationError naming a cycle if the off-diagonal part
// is cyclic.
Hierarchy canonicalize(const Digraph& g);

// True iff every off-diagonal edge i -> j satisfies levels[i] > levels[j].
bool is_consistent(const Digraph& g, const Hierarchy& h);

// True iff the off-diagonal part has no directed cycle.
bool is_acyclic(const Digraph& g);

// One off-diagonal cycle as a node sequence (first == last), if any.
std::optional<std::vector<int>> find_cycle(const Digraph& g);

std::string format_cycle(const std::vector<int>& cycle);

}  // namespace heave::graph
