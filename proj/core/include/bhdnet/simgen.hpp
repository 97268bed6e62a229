#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <bhdnet/data.hpp>
#include <bhdnet/graph.hpp>
#include <bhdnet/rng.hpp>

namespace bhdnet {

// hier: alpha ~ 10 * Dirichlet(1,...,1) over the joint cells of each family,
//       theta^f ~ Dirichlet(alpha) per group;
// iid:  theta^f_j ~ Dirichlet(1,...,1) per group and parent configuration;
// id:   one Dirichlet(1,...,1) draw per configuration shared by all groups.
enum class Regime { hier, iid, id };
// a: every group shares the master DAG; b: some groups lose arcs.
enum class Scenario { a, b };

std::string_view to_string(Regime r);
std::string_view to_string(Scenario s);
Regime parse_regime(std::string_view name);
Scenario parse_scenario(std::string_view name);

struct GenConfig {
    std::size_t nodes = 5;
    int card = 2;
    double arcs_per_node = 1.0;
    std::size_t groups = 2;
    std::size_t rows_per_group = 100;
    Regime regime = Regime::hier;
    Scenario scenario = Scenario::a;
    std::size_t perturbed_groups = 0;  // N_F
    std::size_t removed_arcs = 0;      // N_A
    std::uint64_t seed = 1;

    std::size_t arc_count() const;
    void validate() const;
};

/// Conditional table of one node: probs[j * card + k] = P(X = k | parents = j).
/// `config_weights` are the parent-configuration weights used when a parent
/// is marginalised out (the joint draw's margins in the hier regime, uniform
/// otherwise).
struct Cpt {
    std::vector<std::size_t> parents;  // sorted
    std::vector<int> parent_cards;
    int card = 2;
    std::vector<double> probs;
    std::vector<double> config_weights;

    std::size_t num_configs() const { return config_weights.size(); }
};

using NetworkParams = std::vector<Cpt>;  // one per node

struct GroundTruth {
    Dag master;
    std::vector<Dag> group_dags;
    std::vector<NetworkParams> group_params;
    Regime regime = Regime::hier;
    int card = 2;
};

/// round(c * n) arcs drawn uniformly among the pairs consistent with a
/// uniformly random topological order.
Dag random_dag(std::size_t nodes, double arcs_per_node, std::uint64_t seed);

/// Per-group parameters over the parent sets of `dag`.
std::vector<NetworkParams> sample_params(const Dag& dag, int card, Regime regime, std::size_t groups,
                                         std::uint64_t seed);

/// `perturbed` groups chosen without replacement each lose `removed` arcs of
/// `master`, chosen independently per group.
std::vector<Dag> perturb_structures(const Dag& master, std::size_t groups, std::size_t perturbed,
                                    std::size_t removed, std::uint64_t seed);

/// Restricts `params` (defined on a supergraph) to the parent sets of `dag`
/// by marginalising dropped parents with the configuration weights.
NetworkParams project_params(const NetworkParams& params, const Dag& dag);

GroundTruth make_ground_truth(const Dag& master, std::vector<Dag> group_dags,
                              const std::vector<NetworkParams>& master_params, Regime regime, int card);

/// Ancestral sampling of `rows_per_group` rows per group.
GroupedDataset sample_data(const GroundTruth& truth, std::size_t rows_per_group, std::uint64_t seed);

/// Seeds of one replicate: structure, perturbation, parameters and data.
struct ReplicateSeeds {
    std::uint64_t structure = 0;
    std::uint64_t perturbation = 0;
    std::uint64_t params = 0;
    std::uint64_t data = 0;
};

/// Seed tree rooted at config.seed: structure seeds depend on (N, c, card,
/// |F|, structure index); perturbation on (N_F, N_A); parameter seeds add
/// (regime, parameter index); data seeds add (n_f, sampling index).
ReplicateSeeds replicate_seeds(const GenConfig& config, std::size_t structure, std::size_t param_set,
                               std::size_t sampling);

struct Replicate {
    GroundTruth truth;
    GroupedDataset data;
    ReplicateSeeds seeds;
};

Replicate generate_replicate(const GenConfig& config, std::size_t structure, std::size_t param_set,
                             std::size_t sampling);

std::vector<std::string> default_variable_names(std::size_t nodes);

}  // namespace bhdnet
