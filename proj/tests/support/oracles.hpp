#pragma once

// Independent reference implementations and random generators for tests.
// Nothing here calls the library's scoring or CPDAG code.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <bhdnet/data.hpp>
#include <bhdnet/graph.hpp>

namespace oracle {

using big = boost::multiprecision::cpp_bin_float_50;

inline big lgamma_big(const big& x) { return boost::multiprecision::lgamma(x); }

// Marginal likelihood of one family, straight from the Gamma-ratio formula,
// in 50-digit arithmetic. table/alpha share the (j, k) layout.
inline double bd_family(const std::vector<std::int64_t>& table, int r, const std::vector<double>& alpha) {
    big total = 0;
    const std::size_t q = table.size() / static_cast<std::size_t>(r);
    for (std::size_t j = 0; j < q; ++j) {
        big a_j = 0, n_j = 0;
        for (int k = 0; k < r; ++k) {
            const std::size_t c = j * r + k;
            const big a = alpha[c];
            const big n = static_cast<double>(table[c]);
            a_j += a;
            n_j += n;
            total += lgamma_big(a + n) - lgamma_big(a);
        }
        total += lgamma_big(a_j) - lgamma_big(a_j + n_j);
    }
    return static_cast<double>(total);
}

// Pooled (j, k) table of child given parents, tabulated directly from rows.
inline std::vector<std::int64_t> tabulate(const bhdnet::GroupedDataset& d, std::size_t child,
                                          const std::vector<std::size_t>& parents, int group = -1) {
    std::size_t q = 1;
    for (auto p : parents) q *= d.cardinality(p);
    const int r = d.cardinality(child);
    std::vector<std::int64_t> t(q * r, 0);
    for (std::size_t g = 0; g < d.num_groups(); ++g) {
        if (group >= 0 && static_cast<std::size_t>(group) != g) continue;
        for (std::size_t row = 0; row < d.group_size(g); ++row) {
            std::size_t j = 0;
            for (auto p : parents) j = j * d.cardinality(p) + d.value(g, row, p);
            ++t[j * r + d.value(g, row, child)];
        }
    }
    return t;
}

inline double bdeu_network(const bhdnet::GroupedDataset& d, const bhdnet::Dag& dag, double s) {
    double total = 0;
    for (std::size_t i = 0; i < dag.node_count(); ++i) {
        const auto ps = dag.parents(i);
        const auto t = tabulate(d, i, ps);
        total += bd_family(t, d.cardinality(i), std::vector<double>(t.size(), s / static_cast<double>(t.size())));
    }
    return total;
}

// Random grouped data set; every variable shows every level at least once
// so levels are never degenerate.
inline bhdnet::GroupedDataset random_dataset(std::mt19937_64& rng, std::size_t vars, std::vector<int> cards,
                                             std::vector<std::size_t> group_rows) {
    std::vector<bhdnet::VariableMeta> meta;
    for (std::size_t i = 0; i < vars; ++i) {
        bhdnet::VariableMeta m{"V" + std::to_string(i), {}};
        for (int k = 0; k < cards[i]; ++k) m.levels.push_back(std::to_string(k));
        meta.push_back(m);
    }
    std::vector<bhdnet::GroupRows> groups;
    for (std::size_t g = 0; g < group_rows.size(); ++g) {
        bhdnet::GroupRows gr{"g" + std::to_string(g), {}};
        for (std::size_t row = 0; row < group_rows[g]; ++row)
            for (std::size_t i = 0; i < vars; ++i)
                gr.cells.push_back(std::uniform_int_distribution<int>(0, cards[i] - 1)(rng));
        groups.push_back(std::move(gr));
    }
    return bhdnet::GroupedDataset(std::move(meta), std::move(groups));
}

// Data with dependence: each variable copies an earlier one with
// probability `copy`, otherwise draws uniformly.
inline bhdnet::GroupedDataset correlated_dataset(std::mt19937_64& rng, std::size_t vars, int card,
                                                 std::vector<std::size_t> group_rows, double copy = 0.6) {
    std::vector<bhdnet::VariableMeta> meta;
    for (std::size_t i = 0; i < vars; ++i) {
        bhdnet::VariableMeta m{"V" + std::to_string(i), {}};
        for (int k = 0; k < card; ++k) m.levels.push_back(std::to_string(k));
        meta.push_back(m);
    }
    std::vector<std::size_t> source(vars, 0);
    for (std::size_t i = 1; i < vars; ++i) source[i] = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<bhdnet::GroupRows> groups;
    for (std::size_t g = 0; g < group_rows.size(); ++g) {
        bhdnet::GroupRows gr{"g" + std::to_string(g), {}};
        for (std::size_t row = 0; row < group_rows[g]; ++row) {
            std::vector<int> x(vars);
            for (std::size_t i = 0; i < vars; ++i) {
                x[i] = (i > 0 && u(rng) < copy) ? x[source[i]] : std::uniform_int_distribution<int>(0, card - 1)(rng);
            }
            gr.cells.insert(gr.cells.end(), x.begin(), x.end());
        }
        groups.push_back(std::move(gr));
    }
    return bhdnet::GroupedDataset(std::move(meta), std::move(groups));
}

inline bhdnet::FamilyCounts random_counts(std::mt19937_64& rng, int r, std::vector<int> parent_cards,
                                          std::size_t groups, int max_count) {
    bhdnet::FamilyCounts c(r, parent_cards, groups);
    std::uniform_int_distribution<int> d(0, max_count);
    for (std::size_t f = 0; f < groups; ++f)
        for (std::size_t j = 0; j < c.num_configs(); ++j)
            for (int k = 0; k < r; ++k) c.at(f, j, k) = d(rng);
    return c;
}

// Every DAG on n nodes, by brute force over all arc subsets.
inline std::vector<bhdnet::Dag> all_dags(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
    std::vector<bhdnet::Dag> out;
    std::size_t combos = 1;
    for (std::size_t i = 0; i < pairs.size(); ++i) combos *= 3;
    for (std::size_t code = 0; code < combos; ++code) {
        std::vector<bhdnet::Arc> arcs;
        std::size_t c = code;
        for (auto [a, b] : pairs) {
            const auto state = c % 3;
            c /= 3;
            if (state == 1) arcs.push_back({a, b});
            if (state == 2) arcs.push_back({b, a});
        }
        if (bhdnet::is_acyclic(n, arcs)) out.emplace_back(n, arcs);
    }
    return out;
}

// Equivalence class signature: skeleton plus unshielded colliders.
inline std::pair<std::set<std::pair<std::size_t, std::size_t>>, std::set<std::vector<std::size_t>>>
class_signature(const bhdnet::Dag& d) {
    std::set<std::pair<std::size_t, std::size_t>> skel;
    std::set<std::vector<std::size_t>> colliders;
    const std::size_t n = d.node_count();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            if (d.has_arc(a, b) || d.has_arc(b, a)) skel.emplace(a, b);
    for (std::size_t z = 0; z < n; ++z)
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = x + 1; y < n; ++y)
                if (d.has_arc(x, z) && d.has_arc(y, z) && !d.has_arc(x, y) && !d.has_arc(y, x))
                    colliders.insert({x, z, y});
    return {skel, colliders};
}

// Pair status per the equivalence class: 0 absent, 1 a->b in every member,
// 2 b->a in every member, 3 both orientations occur.
inline std::map<std::pair<std::size_t, std::size_t>, int> class_marks(const bhdnet::Dag& d,
                                                                      const std::vector<bhdnet::Dag>& universe) {
    const auto sig = class_signature(d);
    std::map<std::pair<std::size_t, std::size_t>, int> marks;
    const std::size_t n = d.node_count();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) marks[{a, b}] = 0;
    for (const auto& m : universe) {
        if (class_signature(m) != sig) continue;
        for (auto& [p, v] : marks) {
            if (m.has_arc(p.first, p.second)) v |= 1;
            if (m.has_arc(p.second, p.first)) v |= 2;
        }
    }
    return marks;
}

}  // namespace oracle
