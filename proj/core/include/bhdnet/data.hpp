#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <bhdnet/error.hpp>

namespace bhdnet {

struct VariableMeta {
    std::string name;
    std::vector<std::string> levels;

    int cardinality() const { return static_cast<int>(levels.size()); }
};

// Rows of one related data set. Row-major, one category index per variable.
struct GroupRows {
    std::string label;
    std::vector<int> cells;
};

/// Complete categorical data partitioned by an always-observed group
/// variable. The group variable is a conditioning input and never appears
/// among `variables()`. Immutable after construction.
class GroupedDataset {
public:
    GroupedDataset(std::vector<VariableMeta> variables, std::vector<GroupRows> groups);

    std::size_t num_variables() const { return variables_.size(); }
    std::size_t num_groups() const { return groups_.size(); }
    std::size_t group_size(std::size_t g) const { return groups_[g].cells.size() / variables_.size(); }
    std::size_t total_rows() const;

    const std::vector<VariableMeta>& variables() const { return variables_; }
    const VariableMeta& variable(std::size_t i) const { return variables_[i]; }
    int cardinality(std::size_t i) const { return variables_[i].cardinality(); }
    const std::string& group_label(std::size_t g) const { return groups_[g].label; }

    std::span<const int> row(std::size_t g, std::size_t r) const {
        return {groups_[g].cells.data() + r * variables_.size(), variables_.size()};
    }
    int value(std::size_t g, std::size_t r, std::size_t var) const {
        return groups_[g].cells[r * variables_.size() + var];
    }

    std::vector<std::string> variable_names() const;
    // Index of the named variable; throws std::invalid_argument if absent.
    std::size_t index_of(const std::string& name) const;

    // Same data with every group merged into one (label "all").
    GroupedDataset pooled() const;

private:
    std::vector<VariableMeta> variables_;
    std::vector<GroupRows> groups_;
};

/// Per-group contingency counts for a (child, parent set) family.
/// Layout: counts[(f * configs + j) * child_card + k], with the parent
/// configuration j enumerated row-major over the parent levels in the order
/// the parents were given (last parent varies fastest).
class FamilyCounts {
public:
    FamilyCounts(int child_card, std::vector<int> parent_cards, std::size_t groups);

    int child_cardinality() const { return child_card_; }
    const std::vector<int>& parent_cardinalities() const { return parent_cards_; }
    std::size_t num_groups() const { return groups_; }
    std::size_t num_configs() const { return configs_; }
    std::size_t num_cells() const { return configs_ * static_cast<std::size_t>(child_card_); }

    std::int64_t& at(std::size_t f, std::size_t j, int k) { return counts_[index(f, j, k)]; }
    std::int64_t at(std::size_t f, std::size_t j, int k) const { return counts_[index(f, j, k)]; }

    // Joint (j,k) cell table of one group, length num_cells().
    std::span<const std::int64_t> group_table(std::size_t f) const {
        return {counts_.data() + f * num_cells(), num_cells()};
    }
    std::int64_t config_total(std::size_t f, std::size_t j) const;
    std::int64_t group_total(std::size_t f) const;

    // n_ijk summed over groups, same (j,k) layout as group_table().
    std::vector<std::int64_t> pooled_table() const;
    std::int64_t total() const;

    // Single-group counts holding the pooled table.
    FamilyCounts pooled() const;
    // Single-group counts holding only group f.
    FamilyCounts group(std::size_t f) const;

    friend bool operator==(const FamilyCounts&, const FamilyCounts&) = default;

private:
    std::size_t index(std::size_t f, std::size_t j, int k) const {
        return (f * configs_ + j) * static_cast<std::size_t>(child_card_) + static_cast<std::size_t>(k);
    }

    int child_card_;
    std::vector<int> parent_cards_;
    std::size_t groups_;
    std::size_t configs_;
    std::vector<std::int64_t> counts_;
};

FamilyCounts family_counts(const GroupedDataset& data, std::size_t child, std::span<const std::size_t> parents);

/// Reads a header-first, comma-separated file. Every column other than
/// `group_column` becomes a categorical variable whose levels are the
/// distinct observed strings in lexicographic order. Group labels are
/// sorted the same way.
GroupedDataset load_csv(const std::filesystem::path& path, const std::string& group_column);

/// Same as load_csv() but without a group column: the whole file is one group.
GroupedDataset load_csv_ungrouped(const std::filesystem::path& path);

/// Writes `data` with the group column appended last.
void write_csv(const GroupedDataset& data, const std::filesystem::path& path, const std::string& group_column = "F");

}  // namespace bhdnet
