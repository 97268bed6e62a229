#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <vector>

#include <bhdnet/data.hpp>
#include <bhdnet/graph.hpp>
#include <bhdnet/scores.hpp>

namespace bhdnet {

enum class MoveType { add = 0, remove = 1, reverse = 2 };

struct Move {
    MoveType type;
    std::size_t from;
    std::size_t to;

    friend auto operator<=>(const Move&, const Move&) = default;
};

/// All legal single-arc moves, ordered by (type, from, to).
std::vector<Move> neighbourhood(const Dag& dag, std::optional<std::size_t> max_parents = std::nullopt);

Dag apply_move(const Dag& dag, const Move& move);

struct SearchConfig {
    std::optional<std::size_t> max_parents;
    std::size_t max_iterations = 1'000'000;
    std::optional<Dag> start;  // empty graph when unset
    unsigned threads = 1;      // workers that pre-score candidate families

    void validate() const;
};

struct SearchResult {
    Dag dag;
    double log_score = 0.0;
    std::vector<double> score_trace;  // start score, then one entry per applied move
    std::vector<Move> moves;
    std::size_t iterations = 0;
};

/// Score change of `move` using only the one or two families it touches.
double move_delta(const Dag& dag, const Move& move, const GroupedDataset& data, const ScoreConfig& config,
                  LocalScoreCache& cache);

/// Greedy ascent over single-arc additions, deletions and reversals. Applies
/// the best strictly improving move each iteration, ties going to the first
/// move in (type, from, to) order.
SearchResult hill_climb(const GroupedDataset& data, const ScoreConfig& score_config,
                        const SearchConfig& search_config = {}, LocalScoreCache* cache = nullptr);

}  // namespace bhdnet
