#include <bhdnet/graph.hpp>

#include <algorithm>
#include <stdexcept>

namespace bhdnet {

Dag::Dag(std::size_t nodes) : n_(nodes), adj_(nodes * nodes, 0) {}

Dag::Dag(std::size_t nodes, std::span<const Arc> arcs) : Dag(nodes) {
    for (const Arc& a : arcs) add_arc(a.from, a.to);
}

void Dag::check_node(std::size_t v) const {
    if (v >= n_) throw std::invalid_argument("node index " + std::to_string(v) + " out of range");
}

void Dag::set(std::size_t from, std::size_t to, bool on) {
    auto& cell = adj_[from * n_ + to];
    if (on && !cell) ++arcs_;
    if (!on && cell) --arcs_;
    cell = on ? 1 : 0;
}

std::vector<std::size_t> Dag::parents(std::size_t node) const {
    check_node(node);
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u < n_; ++u) {
        if (has_arc(u, node)) out.push_back(u);
    }
    return out;
}

std::vector<std::size_t> Dag::children(std::size_t node) const {
    check_node(node);
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < n_; ++v) {
        if (has_arc(node, v)) out.push_back(v);
    }
    return out;
}

std::vector<Arc> Dag::arcs() const {
    std::vector<Arc> out;
    out.reserve(arcs_);
    for (std::size_t u = 0; u < n_; ++u) {
        for (std::size_t v = 0; v < n_; ++v) {
            if (has_arc(u, v)) out.push_back({u, v});
        }
    }
    return out;
}

bool Dag::has_path(std::size_t from, std::size_t to) const {
    check_node(from);
    check_node(to);
    std::vector<unsigned char> seen(n_, 0);
    std::vector<std::size_t> stack{from};
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v = 0; v < n_; ++v) {
            if (!has_arc(u, v) || seen[v]) continue;
            if (v == to) return true;
            seen[v] = 1;
            stack.push_back(v);
        }
    }
    return false;
}

bool Dag::can_add_arc(std::size_t from, std::size_t to) const {
    check_node(from);
    check_node(to);
    return from != to && !adjacent(from, to) && !has_path(to, from);
}

bool Dag::can_reverse_arc(std::size_t from, std::size_t to) const {
    if (!has_arc(from, to)) return false;
    Dag without = without_arc(from, to);
    return !without.has_path(from, to);
}

void Dag::add_arc(std::size_t from, std::size_t to) {
    check_node(from);
    check_node(to);
    if (from == to) throw std::invalid_argument("self-loop on node " + std::to_string(from));
    if (has_arc(from, to)) throw std::invalid_argument("duplicate arc");
    if (has_arc(to, from) || has_path(to, from)) throw std::invalid_argument("arc would create a cycle");
    set(from, to, true);
}

void Dag::remove_arc(std::size_t from, std::size_t to) {
    check_node(from);
    check_node(to);
    if (!has_arc(from, to)) throw std::invalid_argument("no such arc");
    set(from, to, false);
}

void Dag::reverse_arc(std::size_t from, std::size_t to) {
    if (!can_reverse_arc(from, to)) throw std::invalid_argument("arc cannot be reversed without a cycle");
    set(from, to, false);
    set(to, from, true);
}

Dag Dag::with_arc(std::size_t from, std::size_t to) const {
    Dag out = *this;
    out.add_arc(from, to);
    return out;
}

Dag Dag::without_arc(std::size_t from, std::size_t to) const {
    Dag out = *this;
    out.remove_arc(from, to);
    return out;
}

Dag Dag::with_reversed_arc(std::size_t from, std::size_t to) const {
    Dag out = *this;
    out.reverse_arc(from, to);
    return out;
}

std::vector<std::size_t> Dag::topological_order() const {
    std::vector<std::size_t> indegree(n_, 0);
    for (std::size_t u = 0; u < n_; ++u) {
        for (std::size_t v = 0; v < n_; ++v) indegree[v] += has_arc(u, v) ? 1 : 0;
    }
    std::vector<std::size_t> order;
    std::vector<unsigned char> done(n_, 0);
    while (order.size() < n_) {
        std::size_t next = n_;
        for (std::size_t v = 0; v < n_; ++v) {
            if (!done[v] && indegree[v] == 0) {
                next = v;
                break;
            }
        }
        done[next] = 1;
        order.push_back(next);
        for (std::size_t v = 0; v < n_; ++v) {
            if (has_arc(next, v)) --indegree[v];
        }
    }
    return order;
}

bool is_acyclic(std::size_t nodes, std::span<const Arc> arcs) {
    std::vector<std::vector<std::size_t>> out(nodes);
    std::vector<std::size_t> indegree(nodes, 0);
    for (const Arc& a : arcs) {
        if (a.from >= nodes || a.to >= nodes) throw std::invalid_argument("arc endpoint out of range");
        if (a.from == a.to) return false;
        out[a.from].push_back(a.to);
        ++indegree[a.to];
    }
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < nodes; ++v) {
        if (indegree[v] == 0) ready.push_back(v);
    }
    std::size_t visited = 0;
    while (!ready.empty()) {
        const std::size_t u = ready.back();
        ready.pop_back();
        ++visited;
        for (std::size_t v : out[u]) {
            if (--indegree[v] == 0) ready.push_back(v);
        }
    }
    return visited == nodes;
}

Cpdag::Cpdag(std::size_t nodes, std::vector<Arc> directed, std::vector<Edge> undirected)
    : n_(nodes), directed_(std::move(directed)), undirected_(std::move(undirected)) {
    std::sort(directed_.begin(), directed_.end());
    std::sort(undirected_.begin(), undirected_.end());
    std::vector<Edge> seen;
    for (const Arc& a : directed_) seen.emplace_back(a.from, a.to);
    for (const Edge& e : undirected_) seen.push_back(e);
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
        throw std::invalid_argument("Cpdag: a node pair appears more than once");
    }
}

Cpdag::Mark Cpdag::mark(std::size_t a, std::size_t b) const {
    if (std::binary_search(directed_.begin(), directed_.end(), Arc{a, b})) return Mark::forward;
    if (std::binary_search(directed_.begin(), directed_.end(), Arc{b, a})) return Mark::backward;
    if (a != b && std::binary_search(undirected_.begin(), undirected_.end(), Edge(a, b))) return Mark::undirected;
    return Mark::none;
}

std::vector<Edge> Cpdag::skeleton() const {
    std::vector<Edge> out(undirected_);
    for (const Arc& a : directed_) out.emplace_back(a.from, a.to);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Arc> v_structure_arcs(const Dag& dag) {
    const std::size_t n = dag.node_count();
    std::vector<unsigned char> compelled(n * n, 0);
    for (std::size_t z = 0; z < n; ++z) {
        const auto pa = dag.parents(z);
        for (std::size_t a = 0; a < pa.size(); ++a) {
            for (std::size_t b = a + 1; b < pa.size(); ++b) {
                if (!dag.adjacent(pa[a], pa[b])) {
                    compelled[pa[a] * n + z] = 1;
                    compelled[pa[b] * n + z] = 1;
                }
            }
        }
    }
    std::vector<Arc> out;
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
            if (compelled[u * n + v]) out.push_back({u, v});
        }
    }
    return out;
}

Cpdag to_cpdag(const Dag& dag) {
    const std::size_t n = dag.node_count();
    // dir[u*n+v]: u -> v oriented; und[u*n+v] (symmetric): u - v.
    std::vector<unsigned char> dir(n * n, 0), und(n * n, 0);
    for (const Arc& a : dag.arcs()) {
        und[a.from * n + a.to] = 1;
        und[a.to * n + a.from] = 1;
    }
    auto orient = [&](std::size_t u, std::size_t v) {
        und[u * n + v] = 0;
        und[v * n + u] = 0;
        dir[u * n + v] = 1;
    };
    for (const Arc& a : v_structure_arcs(dag)) orient(a.from, a.to);

    auto adjacent = [&](std::size_t u, std::size_t v) {
        return dir[u * n + v] || dir[v * n + u] || und[u * n + v];
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t b = 0; b < n; ++b) {
            for (std::size_t c = 0; c < n; ++c) {
                if (!und[b * n + c]) continue;
                bool orient_bc = false;
                // Rule 1: a -> b - c, a and c non-adjacent.
                for (std::size_t a = 0; a < n && !orient_bc; ++a) {
                    if (a != c && dir[a * n + b] && !adjacent(a, c)) orient_bc = true;
                }
                // Rule 2: b -> a -> c with b - c.
                for (std::size_t a = 0; a < n && !orient_bc; ++a) {
                    if (dir[b * n + a] && dir[a * n + c]) orient_bc = true;
                }
                // Rule 3: b - x -> c, b - y -> c, x and y non-adjacent.
                for (std::size_t x = 0; x < n && !orient_bc; ++x) {
                    if (!und[b * n + x] || !dir[x * n + c]) continue;
                    for (std::size_t y = x + 1; y < n && !orient_bc; ++y) {
                        if (und[b * n + y] && dir[y * n + c] && !adjacent(x, y)) orient_bc = true;
                    }
                }
                if (orient_bc) {
                    orient(b, c);
                    changed = true;
                }
            }
        }
    }

    std::vector<Arc> directed;
    std::vector<Edge> undirected;
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
            if (dir[u * n + v]) directed.push_back({u, v});
            if (u < v && und[u * n + v]) undirected.emplace_back(u, v);
        }
    }
    return Cpdag(n, std::move(directed), std::move(undirected));
}

std::size_t shd(const Cpdag& estimated, const Cpdag& truth) {
    if (estimated.node_count() != truth.node_count()) throw std::invalid_argument("shd: node counts differ");
    const std::size_t n = truth.node_count();
    std::size_t distance = 0;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (estimated.mark(a, b) != truth.mark(a, b)) ++distance;
        }
    }
    return distance;
}

std::size_t shd(const Dag& estimated, const Dag& truth) {
    if (estimated.node_count() != truth.node_count()) throw std::invalid_argument("shd: node counts differ");
    return shd(to_cpdag(estimated), to_cpdag(truth));
}

ArcConfusion arc_confusion(const Dag& estimated, const Dag& truth) {
    if (estimated.node_count() != truth.node_count()) {
        throw std::invalid_argument("arc_confusion: node counts differ");
    }
    ArcConfusion out;
    const std::size_t n = truth.node_count();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const bool est = estimated.adjacent(a, b);
            const bool tru = truth.adjacent(a, b);
            if (est && tru) ++out.tp;
            if (est && !tru) ++out.fp;
            if (!est && tru) ++out.fn;
        }
    }
    return out;
}

}  // namespace bhdnet
