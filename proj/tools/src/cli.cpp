#include "cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include <bhdnet/bench.hpp>
#include <bhdnet/data.hpp>
#include <bhdnet/error.hpp>
#include <bhdnet/graph_io.hpp>
#include <bhdnet/keyvalue.hpp>
#include <bhdnet/scores.hpp>
#include <bhdnet/search.hpp>
#include <bhdnet/simgen.hpp>

namespace bhdnet::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

json arcs_json(const Dag& dag, const std::vector<std::string>& names) {
    json arcs = json::array();
    for (const Arc& a : dag.arcs()) arcs.push_back({names.at(a.from), names.at(a.to)});
    return arcs;
}

struct ScoreFlags {
    std::string data;
    std::string group;
    std::string score = "bdeu";
    double iss = 1.0;
    double vb_tol = 1e-6;
    int vb_max_iters = 500;
    std::optional<double> s0;

    void add_to(CLI::App& app) {
        app.add_option("--data", data, "CSV file with a header row; every column is categorical")
            ->required();
        app.add_option("--group", group, "Column holding the group label; without it the data is one group");
        app.add_option("--score", score, "Scoring function")
            ->check(CLI::IsMember({"bdeu", "bic", "bhd"}))
            ->capture_default_str();
        app.add_option("--iss", iss, "Imaginary sample size s (BDeu and BHD)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app.add_option("--vb-tol", vb_tol, "BHD: relative ELBO change that stops the variational fit")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app.add_option("--vb-max-iters", vb_max_iters, "BHD: variational iteration cap")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app.add_option("--s0", s0, "BHD: hyperprior mass (default: number of family cells)")
            ->check(CLI::PositiveNumber);
    }

    ScoreConfig config() const {
        ScoreConfig c;
        c.kind = parse_score_kind(score);
        c.iss = iss;
        c.vb.tolerance = vb_tol;
        c.vb.max_iterations = vb_max_iters;
        c.vb.s0 = s0;
        return c;
    }

    GroupedDataset load() const {
        if (parse_score_kind(score) == ScoreKind::bhd && group.empty()) {
            throw UsageError("--score bhd needs grouped data: pass --group <column>");
        }
        return group.empty() ? load_csv_ungrouped(data) : load_csv(data, group);
    }
};

int cmd_learn(const ScoreFlags& flags, const std::string& out_path, const std::string& dot_path,
              std::optional<std::size_t> max_parents, unsigned jobs, std::ostream& out) {
    const GroupedDataset data = flags.load();
    const ScoreConfig config = flags.config();
    SearchConfig search;
    search.max_parents = max_parents;
    search.threads = jobs;
    LocalScoreCache cache;
    const SearchResult result = hill_climb(data, config, search, &cache);
    const auto names = data.variable_names();

    if (!out_path.empty()) write_file(out_path, dag_to_json(result.dag, names) + "\n");
    if (!dot_path.empty()) write_file(dot_path, dag_to_dot(result.dag, names));

    json j;
    j["schema"] = 1;
    j["nodes"] = names;
    j["arcs"] = arcs_json(result.dag, names);
    j["score"] = std::string(to_string(config.kind));
    j["iss"] = config.iss;
    j["log_score"] = result.log_score;
    j["iterations"] = result.iterations;
    j["groups"] = data.num_groups();
    j["rows"] = data.total_rows();
    out << j.dump(2) << '\n';
    return ok;
}

int cmd_score(const ScoreFlags& flags, const std::string& graph_path, std::ostream& out) {
    const GroupedDataset data = flags.load();
    const ScoreConfig config = flags.config();
    const auto names = data.variable_names();
    const Dag dag = reorder_nodes(read_graph_file(graph_path), names);
    const ScoreBreakdown b = total_log_score(dag, data, config);

    json j;
    j["schema"] = 1;
    j["score"] = std::string(to_string(config.kind));
    j["iss"] = config.iss;
    j["total"] = b.total;
    j["per_node"] = json::array();
    for (std::size_t i = 0; i < names.size(); ++i) {
        j["per_node"].push_back({{"node", names[i]}, {"log_score", b.per_node[i]}});
    }
    out << j.dump(2) << '\n';
    return ok;
}

template <class T>
T parse_value(const std::string& key, const std::string& text) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, value);
    if (res.ec != std::errc{} || res.ptr != end) throw DataError("config key '" + key + "': cannot parse '" + text + "'");
    return value;
}

struct SimulateSetup {
    GenConfig gen;
    std::size_t structures = 1;
    std::size_t param_sets = 1;
    std::size_t data_samplings = 1;
};

SimulateSetup read_simulate_config(const std::filesystem::path& path) {
    const auto doc = KeyValueDoc::load(path);
    SimulateSetup setup;
    auto number = [&](const char* key, auto& field) {
        if (doc.has(key)) field = parse_value<std::remove_reference_t<decltype(field)>>(key, doc.one(key));
    };
    number("N", setup.gen.nodes);
    number("F", setup.gen.groups);
    number("card", setup.gen.card);
    number("c", setup.gen.arcs_per_node);
    number("n_f", setup.gen.rows_per_group);
    number("N_F", setup.gen.perturbed_groups);
    number("N_A", setup.gen.removed_arcs);
    number("seed", setup.gen.seed);
    number("structures", setup.structures);
    number("param_sets", setup.param_sets);
    number("data_samplings", setup.data_samplings);
    try {
        if (doc.has("regime")) setup.gen.regime = parse_regime(doc.one("regime"));
        if (doc.has("scenario")) setup.gen.scenario = parse_scenario(doc.one("scenario"));
    } catch (const std::invalid_argument& e) {
        throw DataError(e.what());
    }
    if (const auto unknown = doc.unused_keys(); !unknown.empty()) {
        throw DataError("unknown config key '" + unknown.front() + "'");
    }
    if (setup.structures < 1 || setup.param_sets < 1 || setup.data_samplings < 1) {
        throw DataError("replication counts must be at least 1");
    }
    try {
        setup.gen.validate();
    } catch (const std::invalid_argument& e) {
        throw DataError(e.what());
    }
    return setup;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, std::optional<std::uint64_t> seed,
                 std::ostream& out) {
    SimulateSetup setup = read_simulate_config(config_path);
    if (seed) setup.gen.seed = *seed;
    std::filesystem::create_directories(out_dir);
    const auto names = default_variable_names(setup.gen.nodes);

    json truth;
    truth["schema"] = 1;
    truth["config"] = {{"N", setup.gen.nodes},
                       {"F", setup.gen.groups},
                       {"card", setup.gen.card},
                       {"c", setup.gen.arcs_per_node},
                       {"n_f", setup.gen.rows_per_group},
                       {"regime", std::string(to_string(setup.gen.regime))},
                       {"scenario", std::string(to_string(setup.gen.scenario))},
                       {"N_F", setup.gen.perturbed_groups},
                       {"N_A", setup.gen.removed_arcs},
                       {"seed", setup.gen.seed}};
    truth["nodes"] = names;
    truth["replicates"] = json::array();
    for (std::size_t s = 0; s < setup.structures; ++s)
        for (std::size_t p = 0; p < setup.param_sets; ++p)
            for (std::size_t d = 0; d < setup.data_samplings; ++d) {
                const Replicate rep = generate_replicate(setup.gen, s, p, d);
                const std::string file =
                    "replicate-s" + std::to_string(s) + "-p" + std::to_string(p) + "-d" + std::to_string(d) + ".csv";
                write_csv(rep.data, std::filesystem::path(out_dir) / file, "F");
                json groups = json::array();
                for (std::size_t f = 0; f < rep.truth.group_dags.size(); ++f) {
                    groups.push_back({{"label", rep.data.group_label(f)}, {"arcs", arcs_json(rep.truth.group_dags[f], names)}});
                }
                truth["replicates"].push_back({{"file", file},
                                               {"structure", s},
                                               {"param_set", p},
                                               {"sampling", d},
                                               {"seeds",
                                                {{"structure", rep.seeds.structure},
                                                 {"perturbation", rep.seeds.perturbation},
                                                 {"params", rep.seeds.params},
                                                 {"data", rep.seeds.data}}},
                                               {"master", arcs_json(rep.truth.master, names)},
                                               {"groups", groups}});
            }
    write_file(std::filesystem::path(out_dir) / "truth.json", truth.dump(2) + "\n");

    json summary;
    summary["schema"] = 1;
    summary["replicates"] = truth["replicates"].size();
    summary["out_dir"] = out_dir;
    out << summary.dump(2) << '\n';
    return ok;
}

int cmd_bench(const std::string& plan_path, const std::string& grid, const std::string& out_path, unsigned jobs,
              bool resume, bool timing, std::optional<std::uint64_t> seed, std::ostream& out) {
    ExperimentPlan plan;
    if (!plan_path.empty()) {
        plan = load_plan(plan_path);
    } else if (!grid.empty()) {
        plan = full_grid_plan(parse_scenario(grid), {Regime::hier, Regime::iid, Regime::id});
    } else {
        plan = desk_scale_plan();
    }
    if (seed) {
        plan.root_seed = *seed;
        for (auto& cell : plan.cells) cell.seed = *seed;
    }
    RunOptions options;
    options.parallelism = jobs;
    options.resume = resume;
    options.record_wall_time = timing;
    const RunSummary s = run(plan, out_path, options);

    json j;
    j["schema"] = 1;
    j["out"] = out_path;
    j["jobs_total"] = s.jobs_total;
    j["jobs_skipped"] = s.jobs_skipped;
    j["jobs_run"] = s.jobs_run;
    j["failed_records"] = s.failed_records;
    out << j.dump(2) << '\n';
    return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayesian network structure learning from related data sets"};
    app.name(args.empty() ? "bhdnet" : std::filesystem::path(args.front()).filename().string());
    app.require_subcommand(1);
    app.set_version_flag("--version", "0.1.0");

    ScoreFlags learn_flags;
    std::string learn_out, learn_dot;
    std::optional<std::size_t> max_parents;
    unsigned learn_jobs = default_jobs();
    auto* learn = app.add_subcommand("learn", "Hill-climb a DAG; prints the graph and its score as JSON");
    learn_flags.add_to(*learn);
    learn->add_option("--out", learn_out, "Also write the graph JSON to this file");
    learn->add_option("--dot", learn_dot, "Also write the graph as DOT to this file");
    learn->add_option("--max-parents", max_parents, "Upper bound on parents per node");
    learn->add_option("--jobs", learn_jobs, "Threads scoring candidate families")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    ScoreFlags score_flags;
    std::string graph_path;
    auto* score = app.add_subcommand("score", "Score a given graph; prints total and per-node log-scores as JSON");
    score_flags.add_to(*score);
    score->add_option("--graph", graph_path, "Graph file (.json or .dot)")->required();

    std::string sim_config, sim_out_dir;
    std::optional<std::uint64_t> sim_seed;
    auto* simulate = app.add_subcommand("simulate", "Generate grouped data sets and their ground truth");
    simulate
        ->add_option("--config", sim_config,
                     "key = value file: N, F, card, c, n_f, regime, scenario, N_F, N_A, seed, structures, "
                     "param_sets, data_samplings")
        ->required();
    simulate->add_option("--out-dir", sim_out_dir, "Directory for replicate CSVs and truth.json")->required();
    simulate->add_option("--seed", sim_seed, "Root seed (overrides the config file)");

    std::string plan_path, grid, bench_out;
    unsigned bench_jobs = default_jobs();
    bool resume = false, timing = false;
    std::optional<std::uint64_t> bench_seed;
    auto* bench = app.add_subcommand("bench", "Run a simulation study and write a results CSV");
    auto* plan_opt = bench->add_option("--plan", plan_path, "Plan file (default: the desk-scale plan)");
    bench->add_option("--full-grid", grid, "Use the full published grid for scenario a or b, all regimes")
        ->check(CLI::IsMember({"a", "b"}))
        ->excludes(plan_opt);
    bench->add_option("--out", bench_out, "Results CSV")->required();
    bench->add_option("--jobs", bench_jobs, "Parallel jobs")->check(CLI::PositiveNumber)->capture_default_str();
    bench->add_flag("--resume", resume, "Skip jobs already recorded in the output file");
    bench->add_flag("--timing", timing, "Record wall time per run (makes the CSV non-reproducible)");
    bench->add_option("--seed", bench_seed, "Root seed (overrides the plan)");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    if (argv.empty()) argv.push_back("bhdnet");
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage_error;
    }

    try {
        if (*learn) return cmd_learn(learn_flags, learn_out, learn_dot, max_parents, learn_jobs, out);
        if (*score) return cmd_score(score_flags, graph_path, out);
        if (*simulate) return cmd_simulate(sim_config, sim_out_dir, sim_seed, out);
        if (*bench) return cmd_bench(plan_path, grid, bench_out, bench_jobs, resume, timing, bench_seed, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return data_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return runtime_failure;
    }
    return usage_error;
}

}  // namespace bhdnet::cli
