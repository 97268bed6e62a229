#include <bhdnet/scores.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include <bhdnet/special.hpp>

namespace bhdnet {

std::string_view to_string(ScoreKind kind) {
    switch (kind) {
        case ScoreKind::bdeu: return "bdeu";
        case ScoreKind::bic: return "bic";
        case ScoreKind::bhd: return "bhd";
    }
    return "unknown";
}

ScoreKind parse_score_kind(std::string_view name) {
    if (name == "bdeu") return ScoreKind::bdeu;
    if (name == "bic") return ScoreKind::bic;
    if (name == "bhd") return ScoreKind::bhd;
    throw std::invalid_argument("unknown score '" + std::string(name) + "' (expected bdeu, bic or bhd)");
}

void ScoreConfig::validate() const {
    if (!(iss > 0.0) || !std::isfinite(iss)) throw std::invalid_argument("imaginary sample size must be positive");
    vb.validate();
}

double bd_local_log_score(std::span<const std::int64_t> table, int child_card, std::span<const double> alpha) {
    if (table.size() != alpha.size()) throw std::invalid_argument("bd_local_log_score: shape mismatch");
    if (child_card < 1 || table.size() % static_cast<std::size_t>(child_card) != 0) {
        throw std::invalid_argument("bd_local_log_score: table is not a whole number of configurations");
    }
    for (double a : alpha) {
        if (!(a > 0.0)) throw std::invalid_argument("bd_local_log_score: alpha must be positive");
    }
    const std::size_t r = static_cast<std::size_t>(child_card);
    const std::size_t q = table.size() / r;
    double score = 0.0;
    for (std::size_t j = 0; j < q; ++j) {
        double a_ij = 0.0;
        std::int64_t n_ij = 0;
        for (std::size_t k = 0; k < r; ++k) {
            a_ij += alpha[j * r + k];
            n_ij += table[j * r + k];
        }
        if (n_ij == 0) continue;
        double term = special::log_gamma(a_ij) - special::log_gamma(a_ij + static_cast<double>(n_ij));
        for (std::size_t k = 0; k < r; ++k) {
            const std::int64_t n = table[j * r + k];
            if (n == 0) continue;
            const double a = alpha[j * r + k];
            term += special::log_gamma(a + static_cast<double>(n)) - special::log_gamma(a);
        }
        score += term;
    }
    return score;
}

double bd_local_log_score(const FamilyCounts& counts, std::span<const double> alpha) {
    const auto pooled = counts.pooled_table();
    return bd_local_log_score(pooled, counts.child_cardinality(), alpha);
}

std::vector<double> uniform_alpha(std::size_t cells, double s) {
    if (cells == 0) throw std::invalid_argument("uniform_alpha: no cells");
    return std::vector<double>(cells, s * (1.0 / static_cast<double>(cells)));
}

double bdeu_local_log_score(const FamilyCounts& counts, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("BDeu: imaginary sample size must be positive");
    const auto alpha = uniform_alpha(counts.num_cells(), s);
    return bd_local_log_score(counts, alpha);
}

double bic_local_log_score(const FamilyCounts& counts) {
    const auto pooled = counts.pooled_table();
    const std::size_t r = static_cast<std::size_t>(counts.child_cardinality());
    const std::size_t q = counts.num_configs();
    double loglik = 0.0;
    std::int64_t n = 0;
    for (std::size_t j = 0; j < q; ++j) {
        std::int64_t n_ij = 0;
        for (std::size_t k = 0; k < r; ++k) n_ij += pooled[j * r + k];
        n += n_ij;
        for (std::size_t k = 0; k < r; ++k) {
            const std::int64_t n_ijk = pooled[j * r + k];
            if (n_ijk > 0) loglik += static_cast<double>(n_ijk) * std::log(static_cast<double>(n_ijk) / static_cast<double>(n_ij));
        }
    }
    if (n == 0) return 0.0;
    const double params = static_cast<double>(q) * static_cast<double>(r - 1);
    return loglik - 0.5 * std::log(static_cast<double>(n)) * params;
}

std::vector<double> classic_posterior_mean(const FamilyCounts& counts, std::span<const double> alpha) {
    if (alpha.size() != counts.num_cells()) throw std::invalid_argument("classic_posterior_mean: shape mismatch");
    for (double a : alpha) {
        if (!(a > 0.0)) throw std::invalid_argument("classic_posterior_mean: alpha must be positive");
    }
    const auto pooled = counts.pooled_table();
    const std::size_t r = static_cast<std::size_t>(counts.child_cardinality());
    std::vector<double> theta(pooled.size());
    for (std::size_t j = 0; j < counts.num_configs(); ++j) {
        double denom = 0.0;
        for (std::size_t k = 0; k < r; ++k) denom += alpha[j * r + k] + static_cast<double>(pooled[j * r + k]);
        for (std::size_t k = 0; k < r; ++k) {
            theta[j * r + k] = (alpha[j * r + k] + static_cast<double>(pooled[j * r + k])) / denom;
        }
    }
    return theta;
}

double local_log_score(const FamilyCounts& counts, const ScoreConfig& config) {
    switch (config.kind) {
        case ScoreKind::bdeu: return bdeu_local_log_score(counts, config.iss);
        case ScoreKind::bic: return bic_local_log_score(counts);
        case ScoreKind::bhd: {
            const auto prior = HierPrior::uniform(counts.num_cells(), config.iss, config.vb.s0);
            const auto fit = fit_variational(counts, prior, config.vb);
            return bhd_local_log_score(counts, fit, config.iss);
        }
    }
    throw std::invalid_argument("local_log_score: unknown score kind");
}

std::size_t FamilyKeyHash::operator()(const FamilyKey& key) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    };
    mix(key.child);
    mix(key.parents.size());
    for (std::size_t p : key.parents) mix(p);
    mix(static_cast<std::uint64_t>(key.kind));
    mix(std::bit_cast<std::uint64_t>(key.iss));
    mix(std::bit_cast<std::uint64_t>(key.vb_tolerance));
    mix(static_cast<std::uint64_t>(key.vb_max_iterations));
    mix(std::bit_cast<std::uint64_t>(key.vb_s0));
    return h;
}

FamilyKey make_family_key(std::size_t child, std::span<const std::size_t> parents, const ScoreConfig& config) {
    FamilyKey key;
    key.child = child;
    key.parents.assign(parents.begin(), parents.end());
    std::sort(key.parents.begin(), key.parents.end());
    key.kind = config.kind;
    key.iss = config.kind == ScoreKind::bic ? 0.0 : config.iss;
    if (config.kind == ScoreKind::bhd) {
        key.vb_tolerance = config.vb.tolerance;
        key.vb_max_iterations = config.vb.max_iterations;
        key.vb_s0 = config.vb.s0.value_or(0.0);
    }
    return key;
}

bool LocalScoreCache::lookup(const FamilyKey& key, double& value) const {
    std::shared_lock lock(mutex_);
    const auto it = table_.find(key);
    if (it == table_.end()) return false;
    value = it->second;
    return true;
}

void LocalScoreCache::insert(const FamilyKey& key, double value) {
    std::unique_lock lock(mutex_);
    table_.emplace(key, value);
}

std::size_t LocalScoreCache::size() const {
    std::shared_lock lock(mutex_);
    return table_.size();
}

void LocalScoreCache::clear() {
    std::unique_lock lock(mutex_);
    table_.clear();
}

double local_log_score(const GroupedDataset& data, std::size_t child, std::span<const std::size_t> parents,
                       const ScoreConfig& config, LocalScoreCache* cache) {
    FamilyKey key = make_family_key(child, parents, config);
    double value = 0.0;
    if (cache && cache->lookup(key, value)) return value;
    const auto counts = family_counts(data, child, key.parents);
    value = local_log_score(counts, config);
    if (cache) cache->insert(key, value);
    return value;
}

ScoreBreakdown total_log_score(const Dag& dag, const GroupedDataset& data, const ScoreConfig& config,
                               LocalScoreCache* cache) {
    if (dag.node_count() != data.num_variables()) {
        throw std::invalid_argument("total_log_score: graph has " + std::to_string(dag.node_count()) +
                                    " nodes but the data has " + std::to_string(data.num_variables()) + " variables");
    }
    config.validate();
    ScoreBreakdown out;
    out.per_node.reserve(dag.node_count());
    for (std::size_t i = 0; i < dag.node_count(); ++i) {
        const auto parents = dag.parents(i);
        const double local = local_log_score(data, i, parents, config, cache);
        out.per_node.push_back(local);
        out.total += local;
    }
    return out;
}

}  // namespace bhdnet
