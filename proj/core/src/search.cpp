#include <bhdnet/search.hpp>

#include <algorithm>
#include <atomic>
#include <set>
#include <stdexcept>
#include <thread>

namespace bhdnet {

void SearchConfig::validate() const {
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
    if (threads < 1) throw std::invalid_argument("search threads must be at least 1");
}

std::vector<Move> neighbourhood(const Dag& dag, std::optional<std::size_t> max_parents) {
    const std::size_t n = dag.node_count();
    std::vector<std::size_t> indegree(n, 0);
    for (const Arc& a : dag.arcs()) ++indegree[a.to];
    auto room = [&](std::size_t v) { return !max_parents || indegree[v] < *max_parents; };

    std::vector<Move> moves;
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
            if (u != v && room(v) && dag.can_add_arc(u, v)) moves.push_back({MoveType::add, u, v});
        }
    }
    for (const Arc& a : dag.arcs()) moves.push_back({MoveType::remove, a.from, a.to});
    for (const Arc& a : dag.arcs()) {
        if (room(a.from) && dag.can_reverse_arc(a.from, a.to)) moves.push_back({MoveType::reverse, a.from, a.to});
    }
    return moves;
}

Dag apply_move(const Dag& dag, const Move& move) {
    switch (move.type) {
        case MoveType::add: return dag.with_arc(move.from, move.to);
        case MoveType::remove: return dag.without_arc(move.from, move.to);
        case MoveType::reverse: return dag.with_reversed_arc(move.from, move.to);
    }
    throw std::invalid_argument("unknown move type");
}

namespace {

std::vector<std::size_t> with_parent(std::vector<std::size_t> parents, std::size_t p) {
    parents.insert(std::upper_bound(parents.begin(), parents.end(), p), p);
    return parents;
}

std::vector<std::size_t> without_parent(std::vector<std::size_t> parents, std::size_t p) {
    parents.erase(std::find(parents.begin(), parents.end(), p));
    return parents;
}

struct Family {
    std::size_t child;
    std::vector<std::size_t> parents;

    friend auto operator<=>(const Family&, const Family&) = default;
};

// (old family, new family) pairs whose local score difference is the move's delta.
std::vector<std::pair<Family, Family>> touched_families(const Dag& dag, const Move& m) {
    switch (m.type) {
        case MoveType::add: {
            auto pa = dag.parents(m.to);
            return {{{m.to, pa}, {m.to, with_parent(pa, m.from)}}};
        }
        case MoveType::remove: {
            auto pa = dag.parents(m.to);
            return {{{m.to, pa}, {m.to, without_parent(pa, m.from)}}};
        }
        case MoveType::reverse: {
            auto pa_to = dag.parents(m.to);
            auto pa_from = dag.parents(m.from);
            return {{{m.to, pa_to}, {m.to, without_parent(pa_to, m.from)}},
                    {{m.from, pa_from}, {m.from, with_parent(pa_from, m.to)}}};
        }
    }
    return {};
}

void prescore(const std::vector<Family>& families, const GroupedDataset& data, const ScoreConfig& config,
              LocalScoreCache& cache, unsigned threads) {
    std::vector<const Family*> missing;
    for (const auto& fam : families) {
        double ignored = 0.0;
        if (!cache.lookup(make_family_key(fam.child, fam.parents, config), ignored)) missing.push_back(&fam);
    }
    if (missing.size() < 2 || threads < 2) return;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < missing.size(); i = next++) {
            local_log_score(data, missing[i]->child, missing[i]->parents, config, &cache);
        }
    };
    std::vector<std::jthread> pool;
    const unsigned count = std::min<unsigned>(threads, static_cast<unsigned>(missing.size()));
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
}

}  // namespace

double move_delta(const Dag& dag, const Move& move, const GroupedDataset& data, const ScoreConfig& config,
                  LocalScoreCache& cache) {
    double delta = 0.0;
    for (const auto& [before, after] : touched_families(dag, move)) {
        delta += local_log_score(data, after.child, after.parents, config, &cache) -
                 local_log_score(data, before.child, before.parents, config, &cache);
    }
    return delta;
}

SearchResult hill_climb(const GroupedDataset& data, const ScoreConfig& score_config,
                        const SearchConfig& search_config, LocalScoreCache* cache) {
    score_config.validate();
    search_config.validate();
    LocalScoreCache local_cache;
    LocalScoreCache& scores = cache ? *cache : local_cache;

    SearchResult result;
    result.dag = search_config.start.value_or(Dag(data.num_variables()));
    if (result.dag.node_count() != data.num_variables()) {
        throw std::invalid_argument("hill_climb: start graph does not match the data");
    }
    result.log_score = total_log_score(result.dag, data, score_config, &scores).total;
    result.score_trace.push_back(result.log_score);

    while (result.iterations < search_config.max_iterations) {
        const auto moves = neighbourhood(result.dag, search_config.max_parents);
        if (search_config.threads > 1) {
            std::set<Family> needed;
            for (const auto& m : moves) {
                for (auto& [before, after] : touched_families(result.dag, m)) needed.insert(after);
            }
            prescore({needed.begin(), needed.end()}, data, score_config, scores, search_config.threads);
        }

        // Candidate totals are re-summed in node order so that the accepted
        // score equals a cold total_log_score() of the new graph bit for bit.
        std::vector<double> local(result.dag.node_count());
        for (std::size_t i = 0; i < local.size(); ++i) {
            local[i] = local_log_score(data, i, result.dag.parents(i), score_config, &scores);
        }
        const Move* best = nullptr;
        double best_total = result.log_score;
        std::vector<double> candidate;
        for (const auto& m : moves) {
            candidate = local;
            for (const auto& [before, after] : touched_families(result.dag, m)) {
                candidate[after.child] = local_log_score(data, after.child, after.parents, score_config, &scores);
            }
            double total = 0.0;
            for (double v : candidate) total += v;
            if (total > best_total) {
                best_total = total;
                best = &m;
            }
        }
        if (!best) break;

        result.dag = apply_move(result.dag, *best);
        result.moves.push_back(*best);
        ++result.iterations;
        result.log_score = best_total;
        result.score_trace.push_back(result.log_score);
    }
    return result;
}

}  // namespace bhdnet
