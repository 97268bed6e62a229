#include <bhdnet/graph_io.hpp>

#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include <json.hpp>

#include <bhdnet/error.hpp>

namespace bhdnet {

namespace {

std::string dot_id(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out.push_back('\\');
        out.push_back(ch);
    }
    return out + "\"";
}

NamedDag build(std::vector<std::string> nodes, const std::vector<std::pair<std::string, std::string>>& arcs) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!index.emplace(nodes[i], i).second) throw DataError("graph: duplicate node '" + nodes[i] + "'");
    }
    Dag dag(nodes.size());
    for (const auto& [from, to] : arcs) {
        const auto f = index.find(from);
        const auto t = index.find(to);
        if (f == index.end() || t == index.end()) throw DataError("graph: arc references unknown node");
        try {
            dag.add_arc(f->second, t->second);
        } catch (const std::invalid_argument& e) {
            throw DataError(std::string("graph: invalid arc ") + from + " -> " + to + ": " + e.what());
        }
    }
    return {std::move(nodes), std::move(dag)};
}

}  // namespace

std::string dag_to_json(const Dag& dag, const std::vector<std::string>& names) {
    nlohmann::json j;
    j["schema"] = 1;
    j["nodes"] = names;
    j["arcs"] = nlohmann::json::array();
    for (const Arc& a : dag.arcs()) j["arcs"].push_back({names.at(a.from), names.at(a.to)});
    return j.dump(2);
}

NamedDag dag_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("graph JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("nodes") || !j["nodes"].is_array()) {
        throw DataError("graph JSON: missing 'nodes' array");
    }
    std::vector<std::string> nodes;
    for (const auto& n : j["nodes"]) {
        if (!n.is_string()) throw DataError("graph JSON: node names must be strings");
        nodes.push_back(n.get<std::string>());
    }
    std::vector<std::pair<std::string, std::string>> arcs;
    if (j.contains("arcs")) {
        for (const auto& a : j["arcs"]) {
            if (!a.is_array() || a.size() != 2) throw DataError("graph JSON: arcs must be [from, to] pairs");
            auto endpoint = [&](const nlohmann::json& e) -> std::string {
                if (e.is_string()) return e.get<std::string>();
                if (e.is_number_unsigned() && e.get<std::size_t>() < nodes.size()) return nodes[e.get<std::size_t>()];
                throw DataError("graph JSON: arc endpoint must be a node name or index");
            };
            arcs.emplace_back(endpoint(a[0]), endpoint(a[1]));
        }
    }
    return build(std::move(nodes), arcs);
}

std::string dag_to_dot(const Dag& dag, const std::vector<std::string>& names) {
    std::ostringstream out;
    out << "digraph G {\n";
    for (const auto& n : names) out << "  " << dot_id(n) << ";\n";
    for (const Arc& a : dag.arcs()) out << "  " << dot_id(names.at(a.from)) << " -> " << dot_id(names.at(a.to)) << ";\n";
    out << "}\n";
    return out.str();
}

std::string cpdag_to_dot(const Cpdag& cpdag, const std::vector<std::string>& names) {
    std::ostringstream out;
    out << "graph G {\n";
    for (const auto& n : names) out << "  " << dot_id(n) << ";\n";
    for (const Arc& a : cpdag.directed_arcs()) {
        out << "  " << dot_id(names.at(a.from)) << " -- " << dot_id(names.at(a.to)) << " [dir=forward];\n";
    }
    for (const Edge& e : cpdag.undirected_edges()) {
        out << "  " << dot_id(names.at(e.first)) << " -- " << dot_id(names.at(e.second)) << ";\n";
    }
    out << "}\n";
    return out.str();
}

NamedDag dag_from_dot(const std::string& text) {
    static const std::string id = R"re((?:"((?:[^"\\]|\\.)*)"|([A-Za-z0-9_.]+)))re";
    static const std::regex arc_re("^\\s*" + id + "\\s*->\\s*" + id + "\\s*(?:\\[[^\\]]*\\])?\\s*;?\\s*$");
    static const std::regex node_re("^\\s*" + id + "\\s*(?:\\[[^\\]]*\\])?\\s*;?\\s*$");
    auto unescape = [](const std::string& s) {
        std::string out;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '\\' && i + 1 < s.size()) ++i;
            out.push_back(s[i]);
        }
        return out;
    };
    auto pick = [&](const std::smatch& m, int q, int b) {
        return m[q].matched ? unescape(m[q].str()) : m[b].str();
    };

    std::vector<std::string> nodes;
    std::map<std::string, bool> known;
    auto add_node = [&](const std::string& n) {
        if (known.emplace(n, true).second) nodes.push_back(n);
    };
    std::vector<std::pair<std::string, std::string>> arcs;

    std::istringstream in(text);
    std::string line;
    bool opened = false;
    while (std::getline(in, line)) {
        if (!opened) {
            if (line.find("digraph") != std::string::npos && line.find('{') != std::string::npos) opened = true;
            continue;
        }
        if (line.find('}') != std::string::npos && line.find_first_not_of(" \t}") == std::string::npos) break;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::smatch m;
        if (std::regex_match(line, m, arc_re)) {
            const auto from = pick(m, 1, 2);
            const auto to = pick(m, 3, 4);
            add_node(from);
            add_node(to);
            arcs.emplace_back(from, to);
        } else if (std::regex_match(line, m, node_re)) {
            const auto name = pick(m, 1, 2);
            if (name != "node" && name != "edge" && name != "graph") add_node(name);
        } else if (line.find('=') == std::string::npos) {
            throw DataError("DOT: cannot parse line '" + line + "'");
        }
    }
    if (!opened) throw DataError("DOT: expected a 'digraph { ... }' block");
    return build(std::move(nodes), arcs);
}

NamedDag read_graph_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open graph file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto ext = path.extension().string();
    if (ext == ".json") return dag_from_json(text);
    if (ext == ".dot" || ext == ".gv") return dag_from_dot(text);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return dag_from_json(text);
    return dag_from_dot(text);
}

Dag reorder_nodes(const NamedDag& graph, const std::vector<std::string>& order) {
    if (graph.nodes.size() != order.size()) throw DataError("graph nodes do not match the data variables");
    std::map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;
    std::vector<std::size_t> remap(graph.nodes.size());
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        const auto it = position.find(graph.nodes[i]);
        if (it == position.end()) throw DataError("graph node '" + graph.nodes[i] + "' is not a data variable");
        remap[i] = it->second;
    }
    Dag out(order.size());
    for (const Arc& a : graph.dag.arcs()) out.add_arc(remap[a.from], remap[a.to]);
    return out;
}

}  // namespace bhdnet
