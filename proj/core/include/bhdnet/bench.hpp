#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <bhdnet/hier.hpp>
#include <bhdnet/keyvalue.hpp>
#include <bhdnet/metrics.hpp>
#include <bhdnet/scores.hpp>
#include <bhdnet/simgen.hpp>

namespace bhdnet {

struct ReplicationCounts {
    std::size_t structures = 3;
    std::size_t param_sets = 10;
    std::size_t data_samplings = 10;
};

/// A grid of generator cells, the scores to compare on each replicate and
/// the replication plan. Every cell carries the root seed.
struct ExperimentPlan {
    std::vector<GenConfig> cells;
    std::vector<ScoreKind> scores;
    std::vector<double> iss{1.0};
    ReplicationCounts replication;
    std::uint64_t root_seed = 1;
    VariationalSettings vb;
    std::optional<std::size_t> max_parents;

    void validate() const;
};

/// Reads a plan document. Grid keys take comma-separated lists and are
/// expanded as a Cartesian product: scenario, regime, N, F, card, c, n_f,
/// N_F, N_A. Scenario a cells ignore N_F/N_A; scenario b cells use the
/// positive values. Other keys: scores, iss, structures, param_sets,
/// data_samplings, seed, vb_tol, vb_max_iters, s0, max_parents.
ExperimentPlan parse_plan(const KeyValueDoc& doc);
ExperimentPlan load_plan(const std::filesystem::path& path);

/// N=5, |F| in {2,5}, card 2, n_f in {100,500}, c=1, all three regimes,
/// scenario a; 2 structures x 3 parameter sets x 3 samplings; BDeu and BHD.
ExperimentPlan desk_scale_plan(std::uint64_t seed = 1);

/// The full published grid for one scenario and the given regimes.
ExperimentPlan full_grid_plan(Scenario scenario, std::vector<Regime> regimes, std::uint64_t seed = 1);

/// "a-hier-N5-F5-card2-c1-nf500-NF0-NA0-s1".
std::string config_id(const GenConfig& cell, double iss);

struct Job {
    std::string id;         // config_id + "/s<structure>-p<params>-d<sampling>"
    std::string config_id;
    GenConfig cell;
    double iss = 1.0;
    std::size_t structure = 0;
    std::size_t param_set = 0;
    std::size_t sampling = 0;
};

std::vector<Job> expand(const ExperimentPlan& plan);

/// Generates the replicate and learns one network per score, evaluating
/// against the master DAG. Exceptions become failed records.
std::vector<RunRecord> run_job(const Job& job, const ExperimentPlan& plan, bool record_wall_time = false);

struct RunOptions {
    unsigned parallelism = 1;
    bool resume = false;
    bool record_wall_time = false;             // off keeps the CSV reproducible
    std::optional<std::size_t> max_jobs;       // stop after this many jobs
};

struct RunSummary {
    std::size_t jobs_total = 0;
    std::size_t jobs_skipped = 0;
    std::size_t jobs_run = 0;
    std::size_t failed_records = 0;
};

/// Executes the plan, appending one CSV line per record as jobs finish,
/// then rewrites the file in canonical order. With `resume`, jobs whose
/// records are all present (and not failed) are skipped and a torn final
/// line is discarded.
RunSummary run(const ExperimentPlan& plan, const std::filesystem::path& out_path, const RunOptions& options);

}  // namespace bhdnet
