#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <bhdnet/graph.hpp>
#include <bhdnet/scores.hpp>
#include <bhdnet/simgen.hpp>

namespace bhdnet {

struct Evaluation {
    std::size_t shd = 0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    friend bool operator==(const Evaluation&, const Evaluation&) = default;
};

/// Compares a learned DAG with the master structure: CPDAG-based SHD and
/// skeleton-level TP/FP/FN.
Evaluation evaluate(const Dag& learned, const Dag& truth_master);

/// One learned network of one replicate. `seed` is the replicate's data seed
/// and identifies the replicate within its configuration.
struct RunRecord {
    std::string config_id;
    Scenario scenario = Scenario::a;
    Regime regime = Regime::hier;
    std::size_t nodes = 0;
    std::size_t groups = 0;
    int card = 0;
    double arcs_per_node = 0.0;
    std::size_t rows_per_group = 0;
    std::size_t perturbed_groups = 0;
    std::size_t removed_arcs = 0;
    std::uint64_t seed = 0;
    ScoreKind score = ScoreKind::bdeu;
    std::optional<Evaluation> eval;  // empty marks a failed job
    double log_score = 0.0;
    double wall_time_s = 0.0;
    std::optional<Dag> learned;      // not serialised

    bool failed() const { return !eval.has_value(); }
};

// Field-wise equality of the serialised columns.
bool same_row(const RunRecord& a, const RunRecord& b);

extern const char* const kResultsHeader;

std::string to_csv_row(const RunRecord& record);
RunRecord parse_csv_row(const std::string& line);

// Canonical order: (config_id, seed, score).
void sort_records(std::vector<RunRecord>& records);

void write_results_csv(std::ostream& out, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_results_csv(std::istream& in);

enum class Metric { shd, tp, fp, fn, log_score };
Metric parse_metric(const std::string& name);

struct PairedValue {
    std::string config_id;
    std::uint64_t seed = 0;
    double difference = 0.0;
};

struct CellSummary {
    std::string config_id;
    std::size_t count = 0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    std::size_t positive = 0;
    std::size_t negative = 0;
};

struct PairedDifferences {
    std::vector<PairedValue> values;  // sorted by (config_id, seed)
    std::vector<CellSummary> cells;   // sorted by config_id
};

/// metric(a) - metric(b) per replicate, records matched on (config_id, seed).
/// Failed records and unmatched keys are errors.
PairedDifferences paired_difference(const std::vector<RunRecord>& records_a, const std::vector<RunRecord>& records_b,
                                    Metric metric);

std::vector<RunRecord> select_score(const std::vector<RunRecord>& records, ScoreKind kind);

/// Linear-interpolation quantile (the common "type 7" definition) of
/// unsorted values; p in [0, 1].
double quantile(std::vector<double> values, double p);

}  // namespace bhdnet
