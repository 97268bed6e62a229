// Runs every acceptance criterion and prints one PASS/FAIL line for each.
// Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include <bhdnet/bench.hpp>
#include <bhdnet/hier.hpp>
#include <bhdnet/metrics.hpp>
#include <bhdnet/scores.hpp>
#include <bhdnet/search.hpp>

#include "oracles.hpp"

using namespace bhdnet;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

unsigned workers() { return std::max(2u, std::thread::hardware_concurrency()); }

std::filesystem::path scratch() {
    static const auto dir = [] {
        auto p = std::filesystem::temp_directory_path() / "bhdnet_acceptance";
        std::filesystem::remove_all(p);
        std::filesystem::create_directories(p);
        return p;
    }();
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

// 1. BDeu against 50-digit direct evaluation.
Outcome score_oracle() {
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        std::vector<int> cards(3);
        for (auto& c : cards) c = 2 + static_cast<int>(rng() % 3);
        std::vector<std::size_t> rows(1 + rng() % 3);
        std::size_t budget = 1 + rng() % 50;
        for (std::size_t g = 0; g < rows.size(); ++g) {
            rows[g] = g + 1 == rows.size() ? std::max<std::size_t>(budget, 1) : 1 + rng() % std::max<std::size_t>(budget, 1);
            budget = budget > rows[g] ? budget - rows[g] : 1;
        }
        const auto d = oracle::random_dataset(rng, 3, cards, rows);
        const double s = std::uniform_real_distribution<double>(0.1, 10.0)(rng);
        for (std::size_t child = 0; child < 3; ++child) {
            std::vector<std::size_t> others;
            for (std::size_t v = 0; v < 3; ++v)
                if (v != child) others.push_back(v);
            for (unsigned mask = 0; mask < 4; ++mask) {
                std::vector<std::size_t> ps;
                for (unsigned b = 0; b < 2; ++b)
                    if (mask & (1u << b)) ps.push_back(others[b]);
                const auto counts = family_counts(d, child, ps);
                const auto table = oracle::tabulate(d, child, ps);
                const std::vector<double> alpha(table.size(), s / static_cast<double>(table.size()));
                const double got = bdeu_local_log_score(counts, s);
                worst = std::max(worst, std::abs(got - oracle::bd_family(table, d.cardinality(child), alpha)));
            }
        }
    }
    return {worst <= 1e-9, "max |diff| = " + fmt("%.3g", worst) + " over 1200 families"};
}

// 2. Score equivalence of BDeu over all 3-node DAGs.
Outcome bdeu_equivalence() {
    const auto dags = oracle::all_dags(3);
    std::map<decltype(oracle::class_signature(dags[0])), std::vector<std::size_t>> classes;
    for (std::size_t i = 0; i < dags.size(); ++i) classes[oracle::class_signature(dags[i])].push_back(i);
    std::mt19937_64 rng(102);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const auto d = oracle::correlated_dataset(rng, 3, 2 + static_cast<int>(rng() % 2), {30 + rng() % 70, 40});
        ScoreConfig cfg;
        for (const auto& [sig, members] : classes) {
            const double first = total_log_score(dags[members[0]], d, cfg).total;
            for (auto m : members) worst = std::max(worst, std::abs(total_log_score(dags[m], d, cfg).total - first));
        }
    }
    const bool shape = dags.size() == 25 && classes.size() == 11;
    return {shape && worst <= 1e-9, std::to_string(dags.size()) + " DAGs in " + std::to_string(classes.size()) +
                                        " classes, max in-class spread = " + fmt("%.3g", worst)};
}

// 3. BHD with uniform kappa is the per-group BDeu sum, bit for bit.
Outcome uniform_kappa_identity() {
    std::mt19937_64 rng(103);
    int exact = 0;
    for (int t = 0; t < 100; ++t) {
        const int r = 2 + static_cast<int>(rng() % 4);
        std::vector<int> pc(rng() % 3);
        for (auto& c : pc) c = 2 + static_cast<int>(rng() % 3);
        const auto counts = oracle::random_counts(rng, r, pc, 1 + rng() % 6, 20);
        const double s = std::uniform_real_distribution<double>(0.1, 10.0)(rng);
        const std::vector<double> kappa(counts.num_cells(), 1.0 / static_cast<double>(counts.num_cells()));
        double sum = 0.0;
        for (std::size_t f = 0; f < counts.num_groups(); ++f) sum += bdeu_local_log_score(counts.group(f), s);
        exact += bhd_local_log_score(counts, kappa, s) == sum;
    }
    return {exact == 100, std::to_string(exact) + "/100 families bit-identical"};
}

// 4. Variational fixed point and monotone ELBO.
Outcome variational_fixed_point() {
    std::mt19937_64 rng(104);
    double worst_nu = 0.0, worst_drop = 0.0;
    int converged = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        const int r = 2 + static_cast<int>(rng() % 3);
        std::vector<int> pc(rng() % 3);
        for (auto& c : pc) c = 2 + static_cast<int>(rng() % 2);
        const auto counts = oracle::random_counts(rng, r, pc, 1 + rng() % 5, 1 + static_cast<int>(rng() % 60));
        const double s = std::uniform_real_distribution<double>(0.5, 5.0)(rng);
        const auto fit = fit_variational(counts, HierPrior::uniform(counts.num_cells(), s));
        converged += fit.converged;
        const std::size_t cells = counts.num_cells();
        for (std::size_t f = 0; f < counts.num_groups(); ++f) {
            const auto n = counts.group_table(f);
            for (std::size_t c = 0; c < cells; ++c) {
                worst_nu = std::max(worst_nu, std::abs(fit.nu[f * cells + c] - s * fit.kappa[c] - static_cast<double>(n[c])));
            }
        }
        for (std::size_t i = 1; i < fit.elbo_trace.size(); ++i)
            worst_drop = std::max(worst_drop, fit.elbo_trace[i - 1] - fit.elbo_trace[i]);
    }
    return {worst_nu <= 1e-8 && worst_drop <= 1e-9,
            "max |nu - s*kappa - n| = " + fmt("%.3g", worst_nu) + ", largest ELBO drop = " + fmt("%.3g", worst_drop) +
                ", converged " + std::to_string(converged) + "/" + std::to_string(trials)};
}

// 5. Hierarchical posterior means: normalisation and shrinkage.
Outcome posterior_means() {
    std::mt19937_64 rng(105);
    double worst_sum = 0.0;
    int violations = 0;
    for (int t = 0; t < 1000; ++t) {
        const int r = 2 + static_cast<int>(rng() % 3);
        std::vector<int> pc(rng() % 2);
        for (auto& c : pc) c = 2 + static_cast<int>(rng() % 2);
        const auto counts = oracle::random_counts(rng, r, pc, 1 + rng() % 4, 25);
        const double s = std::uniform_real_distribution<double>(0.1, 20.0)(rng);
        const auto fit = fit_variational(counts, HierPrior::uniform(counts.num_cells(), s));
        const auto theta = hier_posterior_means(counts, fit.kappa, s);
        const std::size_t cells = counts.num_cells();
        for (std::size_t f = 0; f < counts.num_groups(); ++f) {
            double sum = 0.0;
            for (std::size_t c = 0; c < cells; ++c) sum += theta[f * cells + c];
            worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
            const double n = static_cast<double>(counts.group_total(f));
            if (n == 0) continue;
            for (std::size_t c = 0; c < cells; ++c) {
                const double p = static_cast<double>(counts.group_table(f)[c]) / n;
                const double lo = std::min(p, fit.kappa[c]), hi = std::max(p, fit.kappa[c]);
                const double v = theta[f * cells + c];
                violations += (v < lo - 1e-15 || v > hi + 1e-15);
            }
        }
    }
    return {worst_sum <= 1e-12 && violations == 0,
            "max |sum - 1| = " + fmt("%.3g", worst_sum) + ", shrinkage violations = " + std::to_string(violations) +
                " over 1000 instances"};
}

// Runs one cell with 4 structures x 3 parameter sets x 3 samplings.
std::vector<RunRecord> run_cell(const std::string& name, Regime regime, Scenario scenario) {
    ExperimentPlan plan;
    GenConfig cell;
    cell.nodes = 5;
    cell.groups = 5;
    cell.card = 2;
    cell.rows_per_group = 500;
    cell.arcs_per_node = 1.0;
    cell.regime = regime;
    cell.scenario = scenario;
    if (scenario == Scenario::b) {
        cell.perturbed_groups = 1;
        cell.removed_arcs = 1;
    }
    plan.cells = {cell};
    plan.scores = {ScoreKind::bdeu, ScoreKind::bhd};
    plan.replication = {4, 3, 3};
    const auto out = scratch() / (name + ".csv");
    RunOptions options;
    options.parallelism = workers();
    run(plan, out, options);
    std::ifstream in(out);
    return read_results_csv(in);
}

std::vector<double> paired(const std::vector<RunRecord>& records, Metric metric) {
    const auto res = paired_difference(select_score(records, ScoreKind::bdeu), select_score(records, ScoreKind::bhd), metric);
    std::vector<double> d;
    for (const auto& v : res.values) d.push_back(v.difference);
    return d;
}

// 6. hier regime: BHD recovers structure at least as well as BDeu.
Outcome hier_shd() {
    const auto d = paired(run_cell("hier_a", Regime::hier, Scenario::a), Metric::shd);
    const double med = quantile(d, 0.5);
    const auto pos = std::count_if(d.begin(), d.end(), [](double x) { return x > 0; });
    const double frac = static_cast<double>(pos) / static_cast<double>(d.size());
    return {d.size() >= 30 && med >= 0 && frac >= 0.4,
            std::to_string(d.size()) + " replicates, median SHD(BDeu)-SHD(BHD) = " + fmt("%g", med) +
                ", positive in " + fmt("%.1f", 100 * frac) + "%"};
}

// 7. id regime: pooling is already right, BHD gains nothing.
Outcome id_shd() {
    const auto d = paired(run_cell("id_a", Regime::id, Scenario::a), Metric::shd);
    const double med = quantile(d, 0.5);
    return {d.size() >= 30 && med <= 0,
            std::to_string(d.size()) + " replicates, median SHD(BDeu)-SHD(BHD) = " + fmt("%g", med)};
}

// 8. Scenario b: fewer false positives, similar true positives.
Outcome perturbed_fp() {
    const auto records = run_cell("hier_b", Regime::hier, Scenario::b);
    const auto fp = paired(records, Metric::fp);
    auto tp = paired(records, Metric::tp);
    for (auto& v : tp) v = std::abs(v);
    const double med_fp = quantile(fp, 0.5), med_tp = quantile(tp, 0.5);
    return {fp.size() >= 30 && med_fp >= 0 && med_tp <= 1,
            std::to_string(fp.size()) + " replicates, median FP(BDeu)-FP(BHD) = " + fmt("%g", med_fp) +
                ", median |TP diff| = " + fmt("%g", med_tp)};
}

// 9. Hill climbing returns a local optimum along a strictly increasing path.
Outcome hill_climbing() {
    std::mt19937_64 rng(109);
    int ok = 0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 3 + rng() % 3;
        const int card = 2 + static_cast<int>(rng() % 2);
        std::vector<std::size_t> rows(1 + rng() % 3);
        for (auto& r : rows) r = 20 + rng() % 80;
        const auto d = oracle::correlated_dataset(rng, n, card, rows, std::uniform_real_distribution<double>(0.2, 0.9)(rng));
        ScoreConfig cfg;
        cfg.kind = static_cast<ScoreKind>(t % 3);
        LocalScoreCache cache;
        const auto res = hill_climb(d, cfg, {}, &cache);
        bool good = res.log_score == total_log_score(res.dag, d, cfg, &cache).total;
        for (std::size_t i = 1; i < res.score_trace.size(); ++i) good = good && res.score_trace[i] > res.score_trace[i - 1];
        for (const auto& m : neighbourhood(res.dag))
            good = good && total_log_score(apply_move(res.dag, m), d, cfg, &cache).total <= res.log_score;
        ok += good;
    }
    return {ok == 200, std::to_string(ok) + "/200 instances"};
}

// 10. The desk-scale bench is independent of the number of workers.
Outcome bench_determinism() {
    const auto plan = desk_scale_plan(7);
    const auto a = scratch() / "desk_1.csv", b = scratch() / "desk_n.csv";
    RunOptions one, many;
    many.parallelism = workers();
    const auto s = run(plan, a, one);
    run(plan, b, many);
    const bool same = slurp(a) == slurp(b);
    return {same && s.failed_records == 0,
            std::to_string(s.jobs_total) + " jobs, --jobs 1 vs " + std::to_string(many.parallelism) +
                (same ? ": identical CSVs" : ": CSVs differ")};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"BDeu matches high-precision oracle", score_oracle},
        {"BDeu score equivalence on 3 nodes", bdeu_equivalence},
        {"BHD with uniform kappa equals per-group BDeu", uniform_kappa_identity},
        {"variational fixed point and monotone ELBO", variational_fixed_point},
        {"posterior means normalised and shrunk", posterior_means},
        {"hier regime: SHD(BDeu) - SHD(BHD) >= 0", hier_shd},
        {"id regime: SHD(BDeu) - SHD(BHD) <= 0", id_shd},
        {"scenario b: FP advantage, similar TP", perturbed_fp},
        {"hill climbing local optimum, strict trace", hill_climbing},
        {"bench output independent of --jobs", bench_determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s  %2zu  %-46s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                    secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
