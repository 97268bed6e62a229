#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <bhdnet/graph.hpp>

namespace bhdnet {

struct NamedDag {
    std::vector<std::string> nodes;
    Dag dag;
};

// {"schema":1,"nodes":[...],"arcs":[["from","to"],...]}
std::string dag_to_json(const Dag& dag, const std::vector<std::string>& names);
NamedDag dag_from_json(const std::string& text);

// digraph with `->` arcs; a CPDAG is written as a graph whose directed part
// uses `->` with dir=forward and whose undirected part uses dir=none.
std::string dag_to_dot(const Dag& dag, const std::vector<std::string>& names);
std::string cpdag_to_dot(const Cpdag& cpdag, const std::vector<std::string>& names);
NamedDag dag_from_dot(const std::string& text);

// Picks the parser by extension (.json / .dot / .gv), falling back on the
// first non-blank character.
NamedDag read_graph_file(const std::filesystem::path& path);

// Re-indexes `graph` so node i is `order[i]`. Node sets must match exactly.
Dag reorder_nodes(const NamedDag& graph, const std::vector<std::string>& order);

}  // namespace bhdnet
