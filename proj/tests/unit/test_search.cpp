#include <random>

#include <gtest/gtest.h>

#include <bhdnet/search.hpp>

#include "oracles.hpp"

using namespace bhdnet;

namespace {

ScoreConfig cfg(ScoreKind k) {
    ScoreConfig c;
    c.kind = k;
    return c;
}

std::size_t count(const std::vector<Move>& moves, MoveType t) {
    return static_cast<std::size_t>(std::count_if(moves.begin(), moves.end(), [&](const Move& m) { return m.type == t; }));
}

}  // namespace

TEST(Neighbourhood, EmptyThreeNodeGraph) {
    const auto moves = neighbourhood(Dag(3));
    EXPECT_EQ(count(moves, MoveType::add), 6u);
    EXPECT_EQ(count(moves, MoveType::remove), 0u);
    EXPECT_EQ(count(moves, MoveType::reverse), 0u);
}

TEST(Neighbourhood, Chain) {
    const auto moves = neighbourhood(Dag(3, std::vector<Arc>{{0, 1}, {1, 2}}));
    EXPECT_EQ(count(moves, MoveType::remove), 2u);
    EXPECT_EQ(count(moves, MoveType::reverse), 2u);
    ASSERT_EQ(count(moves, MoveType::add), 1u);
    EXPECT_EQ(moves.front(), (Move{MoveType::add, 0, 2}));
}

TEST(Neighbourhood, SortedUniqueAndAcyclic) {
    std::mt19937_64 rng(41);
    for (const auto& d : oracle::all_dags(4)) {
        const auto moves = neighbourhood(d);
        EXPECT_TRUE(std::is_sorted(moves.begin(), moves.end()));
        EXPECT_EQ(std::adjacent_find(moves.begin(), moves.end()), moves.end());
        for (const auto& m : moves) EXPECT_TRUE(is_acyclic(apply_move(d, m)));
        // Every legal single-arc change is present.
        std::size_t legal = 0;
        for (std::size_t a = 0; a < 4; ++a)
            for (std::size_t b = 0; b < 4; ++b) {
                if (a == b) continue;
                if (d.has_arc(a, b)) legal += 1 + (d.can_reverse_arc(a, b) ? 1 : 0);
                else if (!d.has_arc(b, a) && d.can_add_arc(a, b)) legal += 1;
            }
        EXPECT_EQ(moves.size(), legal);
    }
}

TEST(Neighbourhood, RespectsParentCap) {
    const Dag d(3, std::vector<Arc>{{0, 2}});
    for (const auto& m : neighbourhood(d, 1)) {
        EXPECT_LE(apply_move(d, m).parents(m.to).size(), 1u);
        EXPECT_LE(apply_move(d, m).parents(m.from).size(), 1u);
    }
    EXPECT_EQ(count(neighbourhood(d, 1), MoveType::add), 3u);  // 0->1, 1->0, 2->1
}

TEST(MoveDelta, EqualsTotalScoreDifference) {
    std::mt19937_64 rng(42);
    const auto d = oracle::correlated_dataset(rng, 4, 2, {50, 50});
    for (auto kind : {ScoreKind::bdeu, ScoreKind::bic, ScoreKind::bhd}) {
        LocalScoreCache cache;
        const Dag g(4, std::vector<Arc>{{0, 1}, {2, 1}});
        const double base = total_log_score(g, d, cfg(kind)).total;
        for (const auto& m : neighbourhood(g)) {
            const double direct = total_log_score(apply_move(g, m), d, cfg(kind)).total - base;
            EXPECT_NEAR(move_delta(g, m, d, cfg(kind), cache), direct, 1e-9);
        }
    }
}

TEST(HillClimb, IndependentVariablesStayEmpty) {
    std::mt19937_64 rng(43);
    const auto d = oracle::random_dataset(rng, 2, {2, 2}, {1000, 1000});
    for (auto kind : {ScoreKind::bdeu, ScoreKind::bic, ScoreKind::bhd}) {
        const double empty = total_log_score(Dag(2), d, cfg(kind)).total;
        const double arc = total_log_score(Dag(2, std::vector<Arc>{{0, 1}}), d, cfg(kind)).total;
        ASSERT_GT(empty, arc) << to_string(kind);
        EXPECT_EQ(hill_climb(d, cfg(kind)).dag.arc_count(), 0u);
    }
}

TEST(HillClimb, CopiedVariableGetsOneEdge) {
    std::mt19937_64 rng(44);
    std::vector<int> cells;
    for (int r = 0; r < 1000; ++r) {
        const int y = static_cast<int>(rng() % 2);
        cells.push_back(y);
        cells.push_back(y);
    }
    const GroupedDataset d({{"X", {"0", "1"}}, {"Y", {"0", "1"}}}, {{"g", cells}});
    const auto res = hill_climb(d, cfg(ScoreKind::bdeu));
    EXPECT_EQ(res.dag.arc_count(), 1u);
    EXPECT_TRUE(res.dag.adjacent(0, 1));
    EXPECT_GT(total_log_score(res.dag, d, cfg(ScoreKind::bdeu)).total, total_log_score(Dag(2), d, cfg(ScoreKind::bdeu)).total);
}

TEST(HillClimb, LocalOptimumStrictTraceAndColdScore) {
    std::mt19937_64 rng(45);
    for (int t = 0; t < 30; ++t) {
        const auto kind = static_cast<ScoreKind>(t % 3);
        const auto d = oracle::correlated_dataset(rng, 4, 2 + static_cast<int>(rng() % 2), {40, 60});
        const auto res = hill_climb(d, cfg(kind));
        const double cold = total_log_score(res.dag, d, cfg(kind)).total;
        EXPECT_EQ(res.log_score, cold);
        EXPECT_EQ(res.score_trace.back(), cold);
        EXPECT_EQ(res.score_trace.size(), res.moves.size() + 1);
        for (std::size_t i = 1; i < res.score_trace.size(); ++i) EXPECT_GT(res.score_trace[i], res.score_trace[i - 1]);
        for (const auto& m : neighbourhood(res.dag))
            EXPECT_LE(total_log_score(apply_move(res.dag, m), d, cfg(kind)).total, cold);
    }
}

TEST(HillClimb, DeterministicAcrossRunsAndThreads) {
    std::mt19937_64 rng(46);
    const auto d = oracle::correlated_dataset(rng, 6, 2, {80, 80, 80});
    for (auto kind : {ScoreKind::bdeu, ScoreKind::bhd}) {
        const auto a = hill_climb(d, cfg(kind));
        const auto b = hill_climb(d, cfg(kind));
        SearchConfig threaded;
        threaded.threads = 3;
        const auto c = hill_climb(d, cfg(kind), threaded);
        EXPECT_EQ(a.dag, b.dag);
        EXPECT_EQ(a.dag, c.dag);
        EXPECT_EQ(a.score_trace, c.score_trace);
        EXPECT_EQ(a.moves, c.moves);
    }
}

TEST(HillClimb, IterationCapAndStart) {
    std::mt19937_64 rng(47);
    const auto d = oracle::correlated_dataset(rng, 5, 2, {200}, 0.9);
    SearchConfig capped;
    capped.max_iterations = 1;
    const auto res = hill_climb(d, cfg(ScoreKind::bdeu), capped);
    EXPECT_LE(res.moves.size(), 1u);

    SearchConfig from_start;
    const auto full = hill_climb(d, cfg(ScoreKind::bdeu));
    from_start.start = full.dag;
    const auto again = hill_climb(d, cfg(ScoreKind::bdeu), from_start);
    EXPECT_TRUE(again.moves.empty());
    EXPECT_EQ(again.dag, full.dag);

    SearchConfig bad;
    bad.max_iterations = 0;
    EXPECT_THROW(hill_climb(d, cfg(ScoreKind::bdeu), bad), std::invalid_argument);
}
