#include <bhdnet/bench.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <bhdnet/error.hpp>
#include <bhdnet/search.hpp>

namespace bhdnet {

namespace {

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, value);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw DataError("plan key '" + key + "': cannot parse '" + text + "'");
    }
    return value;
}

template <class T>
std::vector<T> number_list(const KeyValueDoc& doc, const std::string& key, std::vector<T> fallback) {
    if (!doc.has(key)) return fallback;
    std::vector<T> out;
    for (const auto& item : doc.list(key)) out.push_back(parse_number<T>(key, item));
    return out;
}

template <class T>
T number_one(const KeyValueDoc& doc, const std::string& key, T fallback) {
    return doc.has(key) ? parse_number<T>(key, doc.one(key)) : fallback;
}

struct GridAxes {
    std::vector<Scenario> scenarios{Scenario::a};
    std::vector<Regime> regimes{Regime::hier};
    std::vector<std::size_t> nodes{5};
    std::vector<std::size_t> groups{2};
    std::vector<int> cards{2};
    std::vector<double> ratios{1.0};
    std::vector<std::size_t> rows{100};
    std::vector<std::size_t> perturbed{1};
    std::vector<std::size_t> removed{1};
};

std::vector<GenConfig> grid_cells(const GridAxes& ax, std::uint64_t seed) {
    std::vector<GenConfig> cells;
    for (const auto scenario : ax.scenarios) {
        std::vector<std::pair<std::size_t, std::size_t>> perturbations;
        if (scenario == Scenario::a) {
            perturbations.emplace_back(0, 0);
        } else {
            for (const auto nf : ax.perturbed) {
                for (const auto na : ax.removed) {
                    if (nf > 0 && na > 0) perturbations.emplace_back(nf, na);
                }
            }
        }
        for (const auto regime : ax.regimes)
            for (const auto n : ax.nodes)
                for (const auto f : ax.groups)
                    for (const auto card : ax.cards)
                        for (const auto c : ax.ratios)
                            for (const auto rows : ax.rows)
                                for (const auto& [nf, na] : perturbations) {
                                    GenConfig g;
                                    g.scenario = scenario;
                                    g.regime = regime;
                                    g.nodes = n;
                                    g.groups = f;
                                    g.card = card;
                                    g.arcs_per_node = c;
                                    g.rows_per_group = rows;
                                    g.perturbed_groups = nf;
                                    g.removed_arcs = na;
                                    g.seed = seed;
                                    cells.push_back(g);
                                }
    }
    return cells;
}

}  // namespace

void ExperimentPlan::validate() const {
    if (cells.empty()) throw std::invalid_argument("ExperimentPlan: no cells");
    if (scores.empty()) throw std::invalid_argument("ExperimentPlan: no scores");
    if (iss.empty()) throw std::invalid_argument("ExperimentPlan: no iss values");
    for (const double s : iss) {
        if (!(s > 0.0)) throw std::invalid_argument("ExperimentPlan: iss must be positive");
    }
    if (replication.structures < 1 || replication.param_sets < 1 || replication.data_samplings < 1) {
        throw std::invalid_argument("ExperimentPlan: replication counts must be at least 1");
    }
    for (const auto& cell : cells) {
        cell.validate();
        if (cell.seed != root_seed) throw std::invalid_argument("ExperimentPlan: cell seed differs from root seed");
    }
    vb.validate();
}

namespace {

ExperimentPlan parse_plan_fields(const KeyValueDoc& doc) {
    GridAxes ax;
    if (doc.has("scenario")) {
        ax.scenarios.clear();
        for (const auto& s : doc.list("scenario")) ax.scenarios.push_back(parse_scenario(s));
    }
    if (doc.has("regime")) {
        ax.regimes.clear();
        for (const auto& s : doc.list("regime")) ax.regimes.push_back(parse_regime(s));
    }
    ax.nodes = number_list(doc, "N", ax.nodes);
    ax.groups = number_list(doc, "F", ax.groups);
    ax.cards = number_list(doc, "card", ax.cards);
    ax.ratios = number_list(doc, "c", ax.ratios);
    ax.rows = number_list(doc, "n_f", ax.rows);
    ax.perturbed = number_list(doc, "N_F", ax.perturbed);
    ax.removed = number_list(doc, "N_A", ax.removed);

    ExperimentPlan plan;
    plan.root_seed = number_one<std::uint64_t>(doc, "seed", 1);
    plan.scores = {ScoreKind::bdeu, ScoreKind::bhd};
    if (doc.has("scores")) {
        plan.scores.clear();
        for (const auto& s : doc.list("scores")) plan.scores.push_back(parse_score_kind(s));
    }
    plan.iss = number_list(doc, "iss", plan.iss);
    plan.replication.structures = number_one(doc, "structures", plan.replication.structures);
    plan.replication.param_sets = number_one(doc, "param_sets", plan.replication.param_sets);
    plan.replication.data_samplings = number_one(doc, "data_samplings", plan.replication.data_samplings);
    plan.vb.tolerance = number_one(doc, "vb_tol", plan.vb.tolerance);
    plan.vb.max_iterations = number_one(doc, "vb_max_iters", plan.vb.max_iterations);
    if (doc.has("s0")) plan.vb.s0 = parse_number<double>("s0", doc.one("s0"));
    if (doc.has("max_parents")) plan.max_parents = parse_number<std::size_t>("max_parents", doc.one("max_parents"));

    if (const auto unknown = doc.unused_keys(); !unknown.empty()) {
        throw DataError("unknown plan key '" + unknown.front() + "'");
    }
    plan.cells = grid_cells(ax, plan.root_seed);
    plan.validate();
    return plan;
}

}  // namespace

ExperimentPlan parse_plan(const KeyValueDoc& doc) {
    try {
        return parse_plan_fields(doc);
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("plan: ") + e.what());
    }
}

ExperimentPlan load_plan(const std::filesystem::path& path) { return parse_plan(KeyValueDoc::load(path)); }

ExperimentPlan desk_scale_plan(std::uint64_t seed) {
    GridAxes ax;
    ax.regimes = {Regime::hier, Regime::iid, Regime::id};
    ax.groups = {2, 5};
    ax.rows = {100, 500};
    ExperimentPlan plan;
    plan.root_seed = seed;
    plan.cells = grid_cells(ax, seed);
    plan.scores = {ScoreKind::bdeu, ScoreKind::bhd};
    plan.replication = {2, 3, 3};
    return plan;
}

ExperimentPlan full_grid_plan(Scenario scenario, std::vector<Regime> regimes, std::uint64_t seed) {
    GridAxes ax;
    ax.scenarios = {scenario};
    ax.regimes = std::move(regimes);
    ax.nodes = {5, 10};
    ax.groups = {2, 5, 10};
    ax.cards = {2, 5};
    ax.rows = {10, 100, 200, 500, 1000};
    ax.ratios = {1.0, 1.2, 1.5};
    ax.perturbed = {1, 2};
    ax.removed = {1, 2};
    ExperimentPlan plan;
    plan.root_seed = seed;
    plan.cells = grid_cells(ax, seed);
    plan.scores = {ScoreKind::bdeu, ScoreKind::bhd};
    plan.replication = {3, 10, 10};
    return plan;
}

std::string config_id(const GenConfig& cell, double iss) {
    std::ostringstream out;
    out << to_string(cell.scenario) << '-' << to_string(cell.regime) << "-N" << cell.nodes << "-F" << cell.groups
        << "-card" << cell.card << "-c" << format_number(cell.arcs_per_node) << "-nf" << cell.rows_per_group << "-NF"
        << cell.perturbed_groups << "-NA" << cell.removed_arcs << "-s" << format_number(iss);
    return out.str();
}

std::vector<Job> expand(const ExperimentPlan& plan) {
    plan.validate();
    std::vector<Job> jobs;
    std::set<std::string> seen;
    for (const auto& cell : plan.cells) {
        for (const double iss : plan.iss) {
            const std::string cid = config_id(cell, iss);
            for (std::size_t s = 0; s < plan.replication.structures; ++s)
                for (std::size_t p = 0; p < plan.replication.param_sets; ++p)
                    for (std::size_t d = 0; d < plan.replication.data_samplings; ++d) {
                        Job job;
                        job.config_id = cid;
                        job.id = cid + "/s" + std::to_string(s) + "-p" + std::to_string(p) + "-d" + std::to_string(d);
                        job.cell = cell;
                        job.iss = iss;
                        job.structure = s;
                        job.param_set = p;
                        job.sampling = d;
                        if (!seen.insert(job.id).second) {
                            throw std::invalid_argument("ExperimentPlan: duplicate cell " + cid);
                        }
                        jobs.push_back(std::move(job));
                    }
        }
    }
    return jobs;
}

std::vector<RunRecord> run_job(const Job& job, const ExperimentPlan& plan, bool record_wall_time) {
    const std::uint64_t data_seed = replicate_seeds(job.cell, job.structure, job.param_set, job.sampling).data;
    auto blank = [&](ScoreKind kind) {
        RunRecord r;
        r.config_id = job.config_id;
        r.scenario = job.cell.scenario;
        r.regime = job.cell.regime;
        r.nodes = job.cell.nodes;
        r.groups = job.cell.groups;
        r.card = job.cell.card;
        r.arcs_per_node = job.cell.arcs_per_node;
        r.rows_per_group = job.cell.rows_per_group;
        r.perturbed_groups = job.cell.perturbed_groups;
        r.removed_arcs = job.cell.removed_arcs;
        r.seed = data_seed;
        r.score = kind;
        return r;
    };

    std::vector<RunRecord> out;
    std::optional<Replicate> rep;
    try {
        rep = generate_replicate(job.cell, job.structure, job.param_set, job.sampling);
    } catch (const std::exception&) {
        for (const auto kind : plan.scores) out.push_back(blank(kind));
        return out;
    }

    LocalScoreCache cache;
    SearchConfig search;
    search.max_parents = plan.max_parents;
    for (const auto kind : plan.scores) {
        RunRecord r = blank(kind);
        try {
            ScoreConfig sc;
            sc.kind = kind;
            sc.iss = job.iss;
            sc.vb = plan.vb;
            const auto t0 = std::chrono::steady_clock::now();
            auto result = hill_climb(rep->data, sc, search, &cache);
            const auto t1 = std::chrono::steady_clock::now();
            r.eval = evaluate(result.dag, rep->truth.master);
            r.log_score = result.log_score;
            if (record_wall_time) r.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
            r.learned = std::move(result.dag);
        } catch (const std::exception&) {
            r.eval.reset();
        }
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

using RecordKey = std::tuple<std::string, std::uint64_t, ScoreKind>;

// Complete, parseable, non-failed rows of an existing results file. A final
// line without a newline is a torn write and is dropped.
std::vector<RunRecord> read_completed(const std::filesystem::path& path) {
    std::vector<RunRecord> out;
    std::ifstream in(path, std::ios::binary);
    if (!in) return out;
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        if (nl == std::string::npos) break;
        const std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.empty() || line == kResultsHeader) continue;
        try {
            RunRecord r = parse_csv_row(line);
            if (!r.failed()) out.push_back(std::move(r));
        } catch (const std::exception&) {
        }
    }
    return out;
}

void write_atomically(const std::filesystem::path& path, const std::vector<RunRecord>& records) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        write_results_csv(out, records);
        out.flush();
        if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

RunSummary run(const ExperimentPlan& plan, const std::filesystem::path& out_path, const RunOptions& options) {
    const auto jobs = expand(plan);
    RunSummary summary;
    summary.jobs_total = jobs.size();

    std::vector<RunRecord> kept;
    if (options.resume) kept = read_completed(out_path);
    std::set<RecordKey> done;
    for (const auto& r : kept) done.emplace(r.config_id, r.seed, r.score);

    std::vector<const Job*> pending;
    for (const auto& job : jobs) {
        const auto seed = replicate_seeds(job.cell, job.structure, job.param_set, job.sampling).data;
        const bool complete = std::all_of(plan.scores.begin(), plan.scores.end(), [&](ScoreKind k) {
            return done.count(RecordKey{job.config_id, seed, k}) != 0;
        });
        if (complete) {
            ++summary.jobs_skipped;
        } else {
            pending.push_back(&job);
        }
    }
    // Partially recorded jobs are rerun in full; drop their stale rows.
    {
        std::set<std::pair<std::string, std::uint64_t>> rerun;
        for (const Job* job : pending) {
            rerun.emplace(job->config_id,
                          replicate_seeds(job->cell, job->structure, job->param_set, job->sampling).data);
        }
        std::erase_if(kept, [&](const RunRecord& r) { return rerun.count({r.config_id, r.seed}) != 0; });
    }
    if (options.max_jobs && pending.size() > *options.max_jobs) pending.resize(*options.max_jobs);

    sort_records(kept);
    write_atomically(out_path, kept);

    std::ofstream sink(out_path, std::ios::binary | std::ios::app);
    if (!sink) throw std::runtime_error("cannot append to '" + out_path.string() + "'");
    std::mutex sink_mutex;
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> failures{0};

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= pending.size()) return;
            const auto records = run_job(*pending[i], plan, options.record_wall_time);
            std::string block;
            for (const auto& r : records) {
                if (r.failed()) ++failures;
                block += to_csv_row(r);
                block += '\n';
            }
            std::lock_guard lock(sink_mutex);
            sink.write(block.data(), static_cast<std::streamsize>(block.size()));
            sink.flush();
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(options.parallelism,
                                                               static_cast<unsigned>(std::max<std::size_t>(1, pending.size()))));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
    sink.close();
    summary.jobs_run = pending.size();
    summary.failed_records = failures.load();

    std::vector<RunRecord> all;
    {
        std::ifstream in(out_path, std::ios::binary);
        all = read_results_csv(in);
    }
    sort_records(all);
    write_atomically(out_path, all);
    return summary;
}

}  // namespace bhdnet
