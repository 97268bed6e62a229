#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bhdnet {

struct Arc {
    std::size_t from;
    std::size_t to;

    friend auto operator<=>(const Arc&, const Arc&) = default;
};

// Unordered pair with first < second.
struct Edge {
    std::size_t first;
    std::size_t second;

    Edge(std::size_t a, std::size_t b) : first(a < b ? a : b), second(a < b ? b : a) {}
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Directed acyclic graph over nodes 0..N-1. Every mutator keeps the graph
/// acyclic and free of self-loops and duplicate arcs, throwing
/// std::invalid_argument otherwise.
class Dag {
public:
    Dag() = default;
    explicit Dag(std::size_t nodes);
    Dag(std::size_t nodes, std::span<const Arc> arcs);

    std::size_t node_count() const { return n_; }
    std::size_t arc_count() const { return arcs_; }

    bool has_arc(std::size_t from, std::size_t to) const { return adj_[from * n_ + to] != 0; }
    bool adjacent(std::size_t a, std::size_t b) const { return has_arc(a, b) || has_arc(b, a); }

    // Sorted ascending.
    std::vector<std::size_t> parents(std::size_t node) const;
    std::vector<std::size_t> children(std::size_t node) const;
    // Lexicographically sorted.
    std::vector<Arc> arcs() const;

    // Directed path from -> ... -> to of length >= 1.
    bool has_path(std::size_t from, std::size_t to) const;
    bool can_add_arc(std::size_t from, std::size_t to) const;
    bool can_reverse_arc(std::size_t from, std::size_t to) const;

    void add_arc(std::size_t from, std::size_t to);
    void remove_arc(std::size_t from, std::size_t to);
    void reverse_arc(std::size_t from, std::size_t to);

    Dag with_arc(std::size_t from, std::size_t to) const;
    Dag without_arc(std::size_t from, std::size_t to) const;
    Dag with_reversed_arc(std::size_t from, std::size_t to) const;

    // Nodes ordered so that every arc points forward; ties by index.
    std::vector<std::size_t> topological_order() const;

    friend bool operator==(const Dag&, const Dag&) = default;

private:
    void check_node(std::size_t v) const;
    void set(std::size_t from, std::size_t to, bool on);

    std::size_t n_ = 0;
    std::size_t arcs_ = 0;
    std::vector<unsigned char> adj_;
};

bool is_acyclic(std::size_t nodes, std::span<const Arc> arcs);
inline bool is_acyclic(const Dag& dag) {
    const auto a = dag.arcs();
    return is_acyclic(dag.node_count(), a);
}

/// Completed partially directed graph of a Markov equivalence class.
class Cpdag {
public:
    enum class Mark { none, forward, backward, undirected };

    Cpdag(std::size_t nodes, std::vector<Arc> directed, std::vector<Edge> undirected);

    std::size_t node_count() const { return n_; }
    // Sorted.
    const std::vector<Arc>& directed_arcs() const { return directed_; }
    const std::vector<Edge>& undirected_edges() const { return undirected_; }
    std::size_t edge_count() const { return directed_.size() + undirected_.size(); }

    // Status of pair (a, b) seen from a: forward means a -> b.
    Mark mark(std::size_t a, std::size_t b) const;
    std::vector<Edge> skeleton() const;

    friend bool operator==(const Cpdag&, const Cpdag&) = default;

private:
    std::size_t n_;
    std::vector<Arc> directed_;
    std::vector<Edge> undirected_;
};

/// Arcs X -> Z <- Y with X and Y non-adjacent, as (X, Z) and (Y, Z) pairs.
std::vector<Arc> v_structure_arcs(const Dag& dag);

/// Skeleton plus v-structures, then Meek rules 1-3 to a fixpoint.
Cpdag to_cpdag(const Dag& dag);

/// Structural Hamming distance between the equivalence classes of two DAGs:
/// the number of node pairs whose CPDAG edge status (absent, either
/// direction, undirected) differs.
std::size_t shd(const Dag& estimated, const Dag& truth);
std::size_t shd(const Cpdag& estimated, const Cpdag& truth);

struct ArcConfusion {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    friend bool operator==(const ArcConfusion&, const ArcConfusion&) = default;
};

/// Skeleton-level confusion of the estimated graph against the truth.
ArcConfusion arc_confusion(const Dag& estimated, const Dag& truth);

}  // namespace bhdnet
