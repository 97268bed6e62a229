#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <bhdnet/data.hpp>

namespace bhdnet {

/// Hyperparameters of the hierarchical Dirichlet prior of one family:
/// alpha = s * beta, beta ~ Dirichlet(alpha0), over the joint (parent
/// configuration, child level) cells.
struct HierPrior {
    double s = 1.0;
    std::vector<double> alpha0;

    double s0() const;
    void validate() const;

    // alpha0 uniform over `cells`; total mass `s0`, or one per cell if unset.
    static HierPrior uniform(std::size_t cells, double s, std::optional<double> s0 = std::nullopt);
};

struct VariationalSettings {
    double tolerance = 1e-6;   // relative ELBO change
    int max_iterations = 500;
    std::optional<double> s0;  // hyperprior mass; default is the cell count

    void validate() const;
};

/// Result of coordinate ascent on the variational family
///   q(alpha / s) = Dirichlet(tau * kappa),  q(theta^f) = Dirichlet(nu^f).
/// `nu` is laid out as nu[f * cells + c] with c = j * child_card + k.
struct VariationalFit {
    std::vector<double> kappa;
    double tau = 0.0;
    std::vector<double> nu;
    std::vector<double> elbo_trace;
    int iterations = 0;
    bool converged = false;
};

VariationalFit fit_variational(const FamilyCounts& counts, const HierPrior& prior,
                               const VariationalSettings& settings = {});

/// Per-group BD form with alpha_ijk replaced by s * kappa_ijk, summed over
/// groups in ascending order.
double bhd_local_log_score(const FamilyCounts& counts, std::span<const double> kappa, double s);
double bhd_local_log_score(const FamilyCounts& counts, const VariationalFit& fit, double s);

/// theta^f_jk = (s kappa_jk + n^f_jk) / (s + n^f), laid out [f * cells + c].
std::vector<double> hier_posterior_means(const FamilyCounts& counts, std::span<const double> kappa, double s);

/// Evidence lower bound of the hierarchical model under the factorised
/// variational family. E[ln Γ(s beta_c)] uses a second-order expansion around
/// its mean s kappa_c with the Dirichlet(tau kappa) variance.
double elbo(const FamilyCounts& counts, const HierPrior& prior, std::span<const double> kappa, double tau,
            std::span<const double> nu);

/// Gradient of the ELBO with nu held fixed, with respect to log(tau) and the
/// logits eta of kappa = softmax(eta).
struct ElboGradient {
    double d_log_tau = 0.0;
    std::vector<double> d_logits;
};
ElboGradient elbo_gradient(const FamilyCounts& counts, const HierPrior& prior, std::span<const double> kappa,
                           double tau, std::span<const double> nu);

}  // namespace bhdnet
