#include <bhdnet/simgen.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bhdnet {

std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::hier: return "hier";
        case Regime::iid: return "iid";
        case Regime::id: return "id";
    }
    return "unknown";
}

std::string_view to_string(Scenario s) { return s == Scenario::a ? "a" : "b"; }

Regime parse_regime(std::string_view name) {
    if (name == "hier") return Regime::hier;
    if (name == "iid") return Regime::iid;
    if (name == "id") return Regime::id;
    throw std::invalid_argument("unknown regime '" + std::string(name) + "' (expected hier, iid or id)");
}

Scenario parse_scenario(std::string_view name) {
    if (name == "a") return Scenario::a;
    if (name == "b") return Scenario::b;
    throw std::invalid_argument("unknown scenario '" + std::string(name) + "' (expected a or b)");
}

std::size_t GenConfig::arc_count() const {
    return static_cast<std::size_t>(std::llround(arcs_per_node * static_cast<double>(nodes)));
}

void GenConfig::validate() const {
    if (nodes < 2) throw std::invalid_argument("GenConfig: need at least 2 nodes");
    if (card < 2) throw std::invalid_argument("GenConfig: cardinality must be at least 2");
    if (!(arcs_per_node >= 0.0)) throw std::invalid_argument("GenConfig: arcs per node must be non-negative");
    if (arc_count() > nodes * (nodes - 1) / 2) throw std::invalid_argument("GenConfig: too many arcs for a DAG");
    if (groups < 1) throw std::invalid_argument("GenConfig: need at least one group");
    if (rows_per_group < 1) throw std::invalid_argument("GenConfig: need at least one row per group");
    if (perturbed_groups > groups) throw std::invalid_argument("GenConfig: N_F exceeds the number of groups");
    if (removed_arcs > arc_count()) throw std::invalid_argument("GenConfig: N_A exceeds the arc count");
    if (scenario == Scenario::a && (perturbed_groups != 0 || removed_arcs != 0)) {
        throw std::invalid_argument("GenConfig: scenario a has no perturbed groups");
    }
    if (scenario == Scenario::b && (perturbed_groups == 0 || removed_arcs == 0)) {
        throw std::invalid_argument("GenConfig: scenario b needs N_F >= 1 and N_A >= 1");
    }
}

namespace {

// ln of a Gamma(shape, 1) variate; shapes below 1 use the
// Gamma(shape + 1) * U^(1/shape) identity in log space to avoid underflow.
double log_gamma_variate(Rng& rng, double shape) {
    if (shape >= 1.0) {
        std::gamma_distribution<double> g(shape, 1.0);
        return std::log(g(rng));
    }
    std::gamma_distribution<double> g(shape + 1.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return std::log(g(rng)) + std::log(1.0 - u(rng)) / shape;
}

// Log-weights of a Dirichlet(alpha) draw, unnormalised.
std::vector<double> log_dirichlet_weights(Rng& rng, std::span<const double> alpha) {
    std::vector<double> out(alpha.size());
    for (std::size_t c = 0; c < alpha.size(); ++c) out[c] = log_gamma_variate(rng, alpha[c]);
    return out;
}

double log_sum_exp(std::span<const double> x) {
    const double m = *std::max_element(x.begin(), x.end());
    double s = 0.0;
    for (double v : x) s += std::exp(v - m);
    return m + std::log(s);
}

std::vector<double> normalise_log(std::span<const double> logw) {
    const double z = log_sum_exp(logw);
    std::vector<double> p(logw.size());
    for (std::size_t c = 0; c < p.size(); ++c) p[c] = std::exp(logw[c] - z);
    return p;
}

Cpt empty_cpt(const Dag& dag, std::size_t node, int card) {
    Cpt cpt;
    cpt.parents = dag.parents(node);
    cpt.parent_cards.assign(cpt.parents.size(), card);
    cpt.card = card;
    std::size_t q = 1;
    for (int c : cpt.parent_cards) q *= static_cast<std::size_t>(c);
    cpt.probs.assign(q * static_cast<std::size_t>(card), 0.0);
    cpt.config_weights.assign(q, 1.0 / static_cast<double>(q));
    return cpt;
}

// Conditionals from a joint log-table over (j,k); weights are the joint's
// parent-configuration margins.
void fill_from_joint(Cpt& cpt, std::span<const double> log_joint) {
    const std::size_t r = static_cast<std::size_t>(cpt.card);
    const std::size_t q = cpt.num_configs();
    const double z = log_sum_exp(log_joint);
    for (std::size_t j = 0; j < q; ++j) {
        const auto row = log_joint.subspan(j * r, r);
        const double zj = log_sum_exp(row);
        for (std::size_t k = 0; k < r; ++k) cpt.probs[j * r + k] = std::exp(row[k] - zj);
        cpt.config_weights[j] = std::exp(zj - z);
    }
}

void fill_conditionals(Cpt& cpt, Rng& rng) {
    const std::size_t r = static_cast<std::size_t>(cpt.card);
    const std::vector<double> ones(r, 1.0);
    for (std::size_t j = 0; j < cpt.num_configs(); ++j) {
        const auto p = normalise_log(log_dirichlet_weights(rng, ones));
        std::copy(p.begin(), p.end(), cpt.probs.begin() + static_cast<std::ptrdiff_t>(j * r));
    }
}

}  // namespace

Dag random_dag(std::size_t nodes, double arcs_per_node, std::uint64_t seed) {
    const auto m = static_cast<std::size_t>(std::llround(arcs_per_node * static_cast<double>(nodes)));
    const std::size_t pairs = nodes * (nodes - 1) / 2;
    if (m > pairs) throw std::invalid_argument("random_dag: cannot place " + std::to_string(m) + " arcs");
    Rng rng(seed);
    std::vector<std::size_t> order(nodes);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<Arc> candidates;
    candidates.reserve(pairs);
    for (std::size_t a = 0; a < nodes; ++a) {
        for (std::size_t b = a + 1; b < nodes; ++b) candidates.push_back({order[a], order[b]});
    }
    // Partial Fisher-Yates: the first m entries are a uniform m-subset.
    for (std::size_t i = 0; i < m; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, candidates.size() - 1);
        std::swap(candidates[i], candidates[pick(rng)]);
    }
    Dag dag(nodes);
    for (std::size_t i = 0; i < m; ++i) dag.add_arc(candidates[i].from, candidates[i].to);
    return dag;
}

std::vector<NetworkParams> sample_params(const Dag& dag, int card, Regime regime, std::size_t groups,
                                         std::uint64_t seed) {
    if (card < 2) throw std::invalid_argument("sample_params: cardinality must be at least 2");
    if (groups < 1) throw std::invalid_argument("sample_params: need at least one group");
    const std::size_t n = dag.node_count();
    std::vector<NetworkParams> out(groups, NetworkParams(n));

    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(derive_seed(seed, {i}));
        const Cpt shape = empty_cpt(dag, i, card);
        const std::size_t cells = shape.probs.size();
        switch (regime) {
            case Regime::hier: {
                const std::vector<double> ones(cells, 1.0);
                const auto beta = normalise_log(log_dirichlet_weights(rng, ones));
                std::vector<double> alpha(cells);
                for (std::size_t c = 0; c < cells; ++c) alpha[c] = std::max(10.0 * beta[c], std::numeric_limits<double>::min());
                for (std::size_t f = 0; f < groups; ++f) {
                    Cpt cpt = shape;
                    fill_from_joint(cpt, log_dirichlet_weights(rng, alpha));
                    out[f][i] = std::move(cpt);
                }
                break;
            }
            case Regime::iid: {
                for (std::size_t f = 0; f < groups; ++f) {
                    Cpt cpt = shape;
                    fill_conditionals(cpt, rng);
                    out[f][i] = std::move(cpt);
                }
                break;
            }
            case Regime::id: {
                Cpt cpt = shape;
                fill_conditionals(cpt, rng);
                for (std::size_t f = 0; f < groups; ++f) out[f][i] = cpt;
                break;
            }
        }
    }
    return out;
}

std::vector<Dag> perturb_structures(const Dag& master, std::size_t groups, std::size_t perturbed,
                                    std::size_t removed, std::uint64_t seed) {
    if (perturbed > groups) throw std::invalid_argument("perturb_structures: N_F exceeds the number of groups");
    const auto arcs = master.arcs();
    if (perturbed > 0 && removed > arcs.size()) {
        throw std::invalid_argument("perturb_structures: cannot remove " + std::to_string(removed) + " of " +
                                    std::to_string(arcs.size()) + " arcs");
    }
    std::vector<Dag> out(groups, master);
    if (perturbed == 0) return out;

    Rng rng(seed);
    std::vector<std::size_t> chosen(groups);
    std::iota(chosen.begin(), chosen.end(), std::size_t{0});
    std::shuffle(chosen.begin(), chosen.end(), rng);
    chosen.resize(perturbed);
    std::sort(chosen.begin(), chosen.end());

    for (std::size_t f : chosen) {
        std::vector<Arc> pool = arcs;
        std::shuffle(pool.begin(), pool.end(), rng);
        for (std::size_t a = 0; a < removed; ++a) out[f].remove_arc(pool[a].from, pool[a].to);
    }
    return out;
}

NetworkParams project_params(const NetworkParams& params, const Dag& dag) {
    if (params.size() != dag.node_count()) throw std::invalid_argument("project_params: size mismatch");
    NetworkParams out(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const Cpt& src = params[i];
        const auto keep = dag.parents(i);
        if (keep == src.parents) {
            out[i] = src;
            continue;
        }
        Cpt dst;
        dst.parents = keep;
        dst.card = src.card;
        std::vector<std::size_t> position;  // index of each kept parent within src.parents
        for (std::size_t p : keep) {
            const auto it = std::find(src.parents.begin(), src.parents.end(), p);
            if (it == src.parents.end()) throw std::invalid_argument("project_params: graph adds a parent");
            position.push_back(static_cast<std::size_t>(it - src.parents.begin()));
            dst.parent_cards.push_back(src.parent_cards[position.back()]);
        }
        std::size_t q = 1;
        for (int c : dst.parent_cards) q *= static_cast<std::size_t>(c);
        const std::size_t r = static_cast<std::size_t>(src.card);
        dst.probs.assign(q * r, 0.0);
        dst.config_weights.assign(q, 0.0);

        std::vector<int> levels(src.parents.size(), 0);
        for (std::size_t j = 0; j < src.num_configs(); ++j) {
            // Decode j row-major, then re-encode over the kept parents.
            std::size_t rest = j;
            for (std::size_t p = src.parents.size(); p-- > 0;) {
                levels[p] = static_cast<int>(rest % static_cast<std::size_t>(src.parent_cards[p]));
                rest /= static_cast<std::size_t>(src.parent_cards[p]);
            }
            std::size_t jj = 0;
            for (std::size_t p = 0; p < keep.size(); ++p) {
                jj = jj * static_cast<std::size_t>(dst.parent_cards[p]) + static_cast<std::size_t>(levels[position[p]]);
            }
            const double w = src.config_weights[j];
            dst.config_weights[jj] += w;
            for (std::size_t k = 0; k < r; ++k) dst.probs[jj * r + k] += w * src.probs[j * r + k];
        }
        for (std::size_t jj = 0; jj < q; ++jj) {
            const double w = dst.config_weights[jj];
            for (std::size_t k = 0; k < r; ++k) {
                dst.probs[jj * r + k] = w > 0.0 ? dst.probs[jj * r + k] / w : 1.0 / static_cast<double>(r);
            }
        }
        out[i] = std::move(dst);
    }
    return out;
}

GroundTruth make_ground_truth(const Dag& master, std::vector<Dag> group_dags,
                              const std::vector<NetworkParams>& master_params, Regime regime, int card) {
    if (group_dags.size() != master_params.size()) {
        throw std::invalid_argument("make_ground_truth: one parameter set per group is required");
    }
    GroundTruth truth;
    truth.master = master;
    truth.regime = regime;
    truth.card = card;
    for (std::size_t f = 0; f < group_dags.size(); ++f) {
        truth.group_params.push_back(project_params(master_params[f], group_dags[f]));
    }
    truth.group_dags = std::move(group_dags);
    return truth;
}

std::vector<std::string> default_variable_names(std::size_t nodes) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < nodes; ++i) names.push_back("X" + std::to_string(i + 1));
    return names;
}

namespace {

std::string padded(std::size_t value, std::size_t width) {
    std::string s = std::to_string(value);
    return std::string(width > s.size() ? width - s.size() : 0, '0') + s;
}

}  // namespace

GroupedDataset sample_data(const GroundTruth& truth, std::size_t rows_per_group, std::uint64_t seed) {
    const std::size_t n = truth.master.node_count();
    const std::size_t groups = truth.group_dags.size();
    if (groups == 0 || truth.group_params.size() != groups) throw std::invalid_argument("sample_data: empty truth");

    std::vector<VariableMeta> vars;
    const std::size_t level_width = std::to_string(truth.card - 1).size();
    for (const auto& name : default_variable_names(n)) {
        VariableMeta meta{name, {}};
        for (int k = 0; k < truth.card; ++k) meta.levels.push_back(padded(static_cast<std::size_t>(k), level_width));
        vars.push_back(std::move(meta));
    }

    const std::size_t group_width = std::to_string(groups).size();
    std::vector<GroupRows> out;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t f = 0; f < groups; ++f) {
        Rng rng(derive_seed(seed, {f}));
        const auto order = truth.group_dags[f].topological_order();
        const NetworkParams& params = truth.group_params[f];
        GroupRows rows{"f" + padded(f + 1, group_width), std::vector<int>(rows_per_group * n)};
        for (std::size_t r = 0; r < rows_per_group; ++r) {
            int* row = rows.cells.data() + r * n;
            for (std::size_t v : order) {
                const Cpt& cpt = params[v];
                std::size_t j = 0;
                for (std::size_t p = 0; p < cpt.parents.size(); ++p) {
                    j = j * static_cast<std::size_t>(cpt.parent_cards[p]) + static_cast<std::size_t>(row[cpt.parents[p]]);
                }
                const double u = unif(rng);
                double acc = 0.0;
                int level = cpt.card - 1;
                for (int k = 0; k < cpt.card; ++k) {
                    acc += cpt.probs[j * static_cast<std::size_t>(cpt.card) + static_cast<std::size_t>(k)];
                    if (u < acc) {
                        level = k;
                        break;
                    }
                }
                row[v] = level;
            }
        }
        out.push_back(std::move(rows));
    }
    return GroupedDataset(std::move(vars), std::move(out));
}

ReplicateSeeds replicate_seeds(const GenConfig& config, std::size_t structure, std::size_t param_set,
                               std::size_t sampling) {
    ReplicateSeeds seeds;
    seeds.structure = derive_seed(config.seed, {1, config.nodes, std::bit_cast<std::uint64_t>(config.arcs_per_node),
                                                static_cast<std::uint64_t>(config.card), config.groups, structure});
    seeds.perturbation = derive_seed(seeds.structure, {2, config.perturbed_groups, config.removed_arcs});
    seeds.params = derive_seed(seeds.structure, {3, static_cast<std::uint64_t>(config.regime), param_set});
    seeds.data = derive_seed(seeds.params, {4, seeds.perturbation, config.rows_per_group, sampling});
    return seeds;
}

Replicate generate_replicate(const GenConfig& config, std::size_t structure, std::size_t param_set,
                             std::size_t sampling) {
    config.validate();
    const ReplicateSeeds seeds = replicate_seeds(config, structure, param_set, sampling);
    const Dag master = random_dag(config.nodes, config.arcs_per_node, seeds.structure);
    auto group_dags = perturb_structures(master, config.groups, config.perturbed_groups, config.removed_arcs,
                                         seeds.perturbation);
    const auto params = sample_params(master, config.card, config.regime, config.groups, seeds.params);
    GroundTruth truth = make_ground_truth(master, std::move(group_dags), params, config.regime, config.card);
    GroupedDataset data = sample_data(truth, config.rows_per_group, seeds.data);
    return {std::move(truth), std::move(data), seeds};
}

}  // namespace bhdnet
