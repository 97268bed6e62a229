#include <bhdnet/metrics.hpp>

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <bhdnet/error.hpp>

namespace bhdnet {

Evaluation evaluate(const Dag& learned, const Dag& truth_master) {
    const ArcConfusion conf = arc_confusion(learned, truth_master);
    return {shd(learned, truth_master), conf.tp, conf.fp, conf.fn};
}

const char* const kResultsHeader =
    "config_id,scenario,regime,N,F,card,c,n_f,N_F,N_A,seed,score,shd,tp,fp,fn,logscore,wall_time_s";

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw DataError("results CSV: bad number '" + s + "'");
    return v;
}

std::uint64_t parse_uint(const std::string& s) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw DataError("results CSV: bad integer '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

bool same_row(const RunRecord& a, const RunRecord& b) { return to_csv_row(a) == to_csv_row(b); }

std::string to_csv_row(const RunRecord& r) {
    if (r.config_id.find(',') != std::string::npos) throw std::invalid_argument("config_id must not contain commas");
    std::ostringstream out;
    out << r.config_id << ',' << to_string(r.scenario) << ',' << to_string(r.regime) << ',' << r.nodes << ','
        << r.groups << ',' << r.card << ',' << format_double(r.arcs_per_node) << ',' << r.rows_per_group << ','
        << r.perturbed_groups << ',' << r.removed_arcs << ',' << r.seed << ',' << to_string(r.score) << ',';
    if (r.eval) {
        out << r.eval->shd << ',' << r.eval->tp << ',' << r.eval->fp << ',' << r.eval->fn << ','
            << format_double(r.log_score);
    } else {
        out << "NA,NA,NA,NA,error";
    }
    out << ',' << format_double(r.wall_time_s);
    return out.str();
}

RunRecord parse_csv_row(const std::string& line) {
    const auto f = split(line);
    if (f.size() != 18) throw DataError("results CSV: expected 18 fields, found " + std::to_string(f.size()));
    RunRecord r;
    r.config_id = f[0];
    r.scenario = parse_scenario(f[1]);
    r.regime = parse_regime(f[2]);
    r.nodes = parse_uint(f[3]);
    r.groups = parse_uint(f[4]);
    r.card = static_cast<int>(parse_uint(f[5]));
    r.arcs_per_node = parse_double(f[6]);
    r.rows_per_group = parse_uint(f[7]);
    r.perturbed_groups = parse_uint(f[8]);
    r.removed_arcs = parse_uint(f[9]);
    r.seed = parse_uint(f[10]);
    r.score = parse_score_kind(f[11]);
    if (f[16] == "error") {
        r.eval.reset();
    } else {
        r.eval = Evaluation{parse_uint(f[12]), parse_uint(f[13]), parse_uint(f[14]), parse_uint(f[15])};
        r.log_score = parse_double(f[16]);
    }
    r.wall_time_s = parse_double(f[17]);
    return r;
}

void sort_records(std::vector<RunRecord>& records) {
    std::stable_sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
        return std::tie(a.config_id, a.seed, a.score) < std::tie(b.config_id, b.seed, b.score);
    });
}

void write_results_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    out << kResultsHeader << '\n';
    for (const auto& r : records) out << to_csv_row(r) << '\n';
}

std::vector<RunRecord> read_results_csv(std::istream& in) {
    std::vector<RunRecord> out;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            if (line != kResultsHeader) throw DataError("results CSV: unexpected header");
            header = false;
            continue;
        }
        if (!line.empty()) out.push_back(parse_csv_row(line));
    }
    return out;
}

Metric parse_metric(const std::string& name) {
    if (name == "shd") return Metric::shd;
    if (name == "tp") return Metric::tp;
    if (name == "fp") return Metric::fp;
    if (name == "fn") return Metric::fn;
    if (name == "logscore") return Metric::log_score;
    throw std::invalid_argument("unknown metric '" + name + "'");
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level must be in [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<RunRecord> select_score(const std::vector<RunRecord>& records, ScoreKind kind) {
    std::vector<RunRecord> out;
    for (const auto& r : records) {
        if (r.score == kind) out.push_back(r);
    }
    return out;
}

namespace {

double metric_value(const RunRecord& r, Metric m) {
    if (!r.eval) throw std::invalid_argument("paired_difference: record for " + r.config_id + " is a failed job");
    switch (m) {
        case Metric::shd: return static_cast<double>(r.eval->shd);
        case Metric::tp: return static_cast<double>(r.eval->tp);
        case Metric::fp: return static_cast<double>(r.eval->fp);
        case Metric::fn: return static_cast<double>(r.eval->fn);
        case Metric::log_score: return r.log_score;
    }
    return 0.0;
}

}  // namespace

PairedDifferences paired_difference(const std::vector<RunRecord>& records_a, const std::vector<RunRecord>& records_b,
                                    Metric metric) {
    using Key = std::pair<std::string, std::uint64_t>;
    auto index = [&](const std::vector<RunRecord>& records) {
        std::map<Key, double> out;
        for (const auto& r : records) {
            if (!out.emplace(Key{r.config_id, r.seed}, metric_value(r, metric)).second) {
                throw std::invalid_argument("paired_difference: duplicate record for " + r.config_id);
            }
        }
        return out;
    };
    const auto a = index(records_a);
    const auto b = index(records_b);
    if (a.size() != b.size()) throw std::invalid_argument("paired_difference: record sets are not aligned");

    PairedDifferences out;
    std::map<std::string, std::vector<double>> by_cell;
    for (const auto& [key, value] : a) {
        const auto it = b.find(key);
        if (it == b.end()) throw std::invalid_argument("paired_difference: no partner for " + key.first);
        const double d = value - it->second;
        out.values.push_back({key.first, key.second, d});
        by_cell[key.first].push_back(d);
    }
    for (auto& [cell, diffs] : by_cell) {
        CellSummary s;
        s.config_id = cell;
        s.count = diffs.size();
        s.q1 = quantile(diffs, 0.25);
        s.median = quantile(diffs, 0.5);
        s.q3 = quantile(diffs, 0.75);
        s.positive = static_cast<std::size_t>(std::count_if(diffs.begin(), diffs.end(), [](double d) { return d > 0; }));
        s.negative = static_cast<std::size_t>(std::count_if(diffs.begin(), diffs.end(), [](double d) { return d < 0; }));
        out.cells.push_back(std::move(s));
    }
    return out;
}

}  // namespace bhdnet
