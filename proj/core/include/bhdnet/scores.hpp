#pragma once

#include <cstddef>
#include <cstdint>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <bhdnet/data.hpp>
#include <bhdnet/graph.hpp>
#include <bhdnet/hier.hpp>

namespace bhdnet {

enum class ScoreKind { bdeu, bic, bhd };

std::string_view to_string(ScoreKind kind);
ScoreKind parse_score_kind(std::string_view name);

struct ScoreConfig {
    ScoreKind kind = ScoreKind::bdeu;
    double iss = 1.0;  // imaginary sample size s
    VariationalSettings vb;

    void validate() const;
};

/// Log of the BD marginal likelihood of one family.
/// `table` and `alpha` share the (j,k) layout with `child_card` levels per
/// configuration; summation runs j ascending then k ascending.
double bd_local_log_score(std::span<const std::int64_t> table, int child_card, std::span<const double> alpha);
// On counts pooled over groups.
double bd_local_log_score(const FamilyCounts& counts, std::span<const double> alpha);

// alpha_ijk = s / (|X_i| |Pi_i|) for every cell.
std::vector<double> uniform_alpha(std::size_t cells, double s);

double bdeu_local_log_score(const FamilyCounts& counts, double s);
double bic_local_log_score(const FamilyCounts& counts);

/// (alpha_ijk + n_ijk) / (alpha_ij + n_ij) on pooled counts, (j,k) layout.
std::vector<double> classic_posterior_mean(const FamilyCounts& counts, std::span<const double> alpha);

double local_log_score(const FamilyCounts& counts, const ScoreConfig& config);

struct FamilyKey {
    std::size_t child = 0;
    std::vector<std::size_t> parents;  // sorted
    ScoreKind kind = ScoreKind::bdeu;
    double iss = 0.0;
    double vb_tolerance = 0.0;
    int vb_max_iterations = 0;
    double vb_s0 = 0.0;  // 0 when unset

    friend bool operator==(const FamilyKey&, const FamilyKey&) = default;
};

struct FamilyKeyHash {
    std::size_t operator()(const FamilyKey& key) const noexcept;
};

FamilyKey make_family_key(std::size_t child, std::span<const std::size_t> parents, const ScoreConfig& config);

/// Thread-safe memo of local scores for one data set. Concurrent inserts of
/// the same key store the same value.
class LocalScoreCache {
public:
    bool lookup(const FamilyKey& key, double& value) const;
    void insert(const FamilyKey& key, double value);
    std::size_t size() const;
    void clear();

private:
    mutable std::shared_mutex mutex_;
    std::unordered_map<FamilyKey, double, FamilyKeyHash> table_;
};

// Parent order is irrelevant; the family is scored with sorted parents.
double local_log_score(const GroupedDataset& data, std::size_t child, std::span<const std::size_t> parents,
                       const ScoreConfig& config, LocalScoreCache* cache = nullptr);

struct ScoreBreakdown {
    double total = 0.0;
    std::vector<double> per_node;
};

ScoreBreakdown total_log_score(const Dag& dag, const GroupedDataset& data, const ScoreConfig& config,
                               LocalScoreCache* cache = nullptr);

}  // namespace bhdnet
