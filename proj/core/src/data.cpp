#include <bhdnet/data.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace bhdnet {

GroupedDataset::GroupedDataset(std::vector<VariableMeta> variables, std::vector<GroupRows> groups)
    : variables_(std::move(variables)), groups_(std::move(groups)) {
    if (variables_.empty()) throw DataError("dataset has no variables");
    if (groups_.empty()) throw DataError("dataset has no groups");

    std::set<std::string> names;
    for (const auto& v : variables_) {
        if (!names.insert(v.name).second) throw DataError("duplicate variable name '" + v.name + "'");
        if (v.cardinality() < 2) throw DataError("degenerate variable '" + v.name + "': fewer than 2 levels");
        std::set<std::string> lv(v.levels.begin(), v.levels.end());
        if (lv.size() != v.levels.size()) throw DataError("duplicate level labels in variable '" + v.name + "'");
    }

    std::set<std::string> labels;
    const std::size_t n = variables_.size();
    for (const auto& g : groups_) {
        if (!labels.insert(g.label).second) throw DataError("duplicate group label '" + g.label + "'");
        if (g.cells.empty()) throw DataError("group '" + g.label + "' has no rows");
        if (g.cells.size() % n != 0) throw DataError("group '" + g.label + "' has a ragged row matrix");
        for (std::size_t c = 0; c < g.cells.size(); ++c) {
            const int card = variables_[c % n].cardinality();
            if (g.cells[c] < 0 || g.cells[c] >= card) {
                throw DataError("category index out of range in variable '" + variables_[c % n].name + "'");
            }
        }
    }
}

std::size_t GroupedDataset::total_rows() const {
    std::size_t total = 0;
    for (std::size_t g = 0; g < groups_.size(); ++g) total += group_size(g);
    return total;
}

std::vector<std::string> GroupedDataset::variable_names() const {
    std::vector<std::string> out;
    out.reserve(variables_.size());
    for (const auto& v : variables_) out.push_back(v.name);
    return out;
}

std::size_t GroupedDataset::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        if (variables_[i].name == name) return i;
    }
    throw std::invalid_argument("unknown variable '" + name + "'");
}

GroupedDataset GroupedDataset::pooled() const {
    GroupRows all{"all", {}};
    for (const auto& g : groups_) all.cells.insert(all.cells.end(), g.cells.begin(), g.cells.end());
    return GroupedDataset(variables_, {std::move(all)});
}

FamilyCounts::FamilyCounts(int child_card, std::vector<int> parent_cards, std::size_t groups)
    : child_card_(child_card), parent_cards_(std::move(parent_cards)), groups_(groups), configs_(1) {
    if (child_card_ < 1 || groups_ < 1) throw std::invalid_argument("FamilyCounts: empty shape");
    for (int c : parent_cards_) {
        if (c < 1) throw std::invalid_argument("FamilyCounts: parent cardinality must be positive");
        configs_ *= static_cast<std::size_t>(c);
    }
    counts_.assign(groups_ * num_cells(), 0);
}

std::int64_t FamilyCounts::config_total(std::size_t f, std::size_t j) const {
    std::int64_t sum = 0;
    for (int k = 0; k < child_card_; ++k) sum += at(f, j, k);
    return sum;
}

std::int64_t FamilyCounts::group_total(std::size_t f) const {
    const auto t = group_table(f);
    return std::accumulate(t.begin(), t.end(), std::int64_t{0});
}

std::vector<std::int64_t> FamilyCounts::pooled_table() const {
    std::vector<std::int64_t> out(num_cells(), 0);
    for (std::size_t f = 0; f < groups_; ++f) {
        const auto t = group_table(f);
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += t[c];
    }
    return out;
}

std::int64_t FamilyCounts::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
}

FamilyCounts FamilyCounts::pooled() const {
    FamilyCounts out(child_card_, parent_cards_, 1);
    out.counts_ = pooled_table();
    return out;
}

FamilyCounts FamilyCounts::group(std::size_t f) const {
    if (f >= groups_) throw std::out_of_range("FamilyCounts::group: index out of range");
    FamilyCounts out(child_card_, parent_cards_, 1);
    const auto t = group_table(f);
    out.counts_.assign(t.begin(), t.end());
    return out;
}

FamilyCounts family_counts(const GroupedDataset& data, std::size_t child, std::span<const std::size_t> parents) {
    const std::size_t n = data.num_variables();
    if (child >= n) throw std::invalid_argument("family_counts: child index out of range");
    std::vector<int> parent_cards;
    parent_cards.reserve(parents.size());
    for (std::size_t p : parents) {
        if (p >= n) throw std::invalid_argument("family_counts: parent index out of range");
        if (p == child) throw std::invalid_argument("family_counts: child listed among its parents");
        parent_cards.push_back(data.cardinality(p));
    }
    {
        std::vector<std::size_t> sorted(parents.begin(), parents.end());
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw std::invalid_argument("family_counts: duplicate parent");
        }
    }

    FamilyCounts counts(data.cardinality(child), parent_cards, data.num_groups());
    for (std::size_t f = 0; f < data.num_groups(); ++f) {
        const std::size_t rows = data.group_size(f);
        for (std::size_t r = 0; r < rows; ++r) {
            const auto row = data.row(f, r);
            std::size_t j = 0;
            for (std::size_t q = 0; q < parents.size(); ++q) {
                j = j * static_cast<std::size_t>(parent_cards[q]) + static_cast<std::size_t>(row[parents[q]]);
            }
            ++counts.at(f, j, row[child]);
        }
    }
    return counts;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(ch);
        }
    }
    if (quoted) throw DataError("unterminated quoted field");
    fields.push_back(std::move(field));
    return fields;
}

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

RawTable read_raw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file '" + path.string() + "'");

    RawTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (table.header.empty()) {
            if (line.empty()) throw DataError("missing header row");
            table.header = split_csv_line(line);
            continue;
        }
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != table.header.size()) {
            throw DataError("line " + std::to_string(lineno) + ": expected " + std::to_string(table.header.size()) +
                            " fields, found " + std::to_string(fields.size()));
        }
        for (const auto& f : fields) {
            if (f.empty()) throw DataError("incomplete data: empty cell on line " + std::to_string(lineno));
        }
        table.rows.push_back(std::move(fields));
    }
    if (table.header.empty()) throw DataError("missing header row");
    if (table.rows.empty()) throw DataError("data file has no rows");
    return table;
}

GroupedDataset build_dataset(const RawTable& table, std::ptrdiff_t group_col) {
    const std::size_t ncols = table.header.size();
    std::vector<std::size_t> var_cols;
    for (std::size_t c = 0; c < ncols; ++c) {
        if (static_cast<std::ptrdiff_t>(c) != group_col) var_cols.push_back(c);
    }
    if (var_cols.empty()) throw DataError("data file has no variable columns");

    std::vector<VariableMeta> vars;
    std::vector<std::map<std::string, int>> codes(var_cols.size());
    for (std::size_t v = 0; v < var_cols.size(); ++v) {
        std::set<std::string> levels;
        for (const auto& row : table.rows) levels.insert(row[var_cols[v]]);
        VariableMeta meta{table.header[var_cols[v]], {levels.begin(), levels.end()}};
        if (meta.cardinality() < 2) {
            throw DataError("degenerate variable '" + meta.name + "': fewer than 2 observed levels");
        }
        for (int k = 0; k < meta.cardinality(); ++k) codes[v][meta.levels[k]] = k;
        vars.push_back(std::move(meta));
    }

    std::map<std::string, std::vector<int>> by_group;
    for (const auto& row : table.rows) {
        auto& cells = by_group[group_col >= 0 ? row[group_col] : std::string("all")];
        for (std::size_t v = 0; v < var_cols.size(); ++v) cells.push_back(codes[v].at(row[var_cols[v]]));
    }
    std::vector<GroupRows> groups;
    for (auto& [label, cells] : by_group) groups.push_back({label, std::move(cells)});
    return GroupedDataset(std::move(vars), std::move(groups));
}

}  // namespace

GroupedDataset load_csv(const std::filesystem::path& path, const std::string& group_column) {
    const RawTable table = read_raw(path);
    const auto it = std::find(table.header.begin(), table.header.end(), group_column);
    if (it == table.header.end()) throw DataError("unknown group column '" + group_column + "'");
    return build_dataset(table, it - table.header.begin());
}

GroupedDataset load_csv_ungrouped(const std::filesystem::path& path) {
    return build_dataset(read_raw(path), -1);
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

}  // namespace

void write_csv(const GroupedDataset& data, const std::filesystem::path& path, const std::string& group_column) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    for (const auto& v : data.variables()) out << csv_escape(v.name) << ',';
    out << csv_escape(group_column) << '\n';
    for (std::size_t f = 0; f < data.num_groups(); ++f) {
        for (std::size_t r = 0; r < data.group_size(f); ++r) {
            const auto row = data.row(f, r);
            for (std::size_t i = 0; i < row.size(); ++i) out << csv_escape(data.variable(i).levels[row[i]]) << ',';
            out << csv_escape(data.group_label(f)) << '\n';
        }
    }
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace bhdnet
