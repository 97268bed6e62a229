#include <bhdnet/hier.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <bhdnet/scores.hpp>
#include <bhdnet/special.hpp>

namespace bhdnet {

using special::digamma;
using special::log_gamma;
using special::tetragamma;
using special::trigamma;

double HierPrior::s0() const { return std::accumulate(alpha0.begin(), alpha0.end(), 0.0); }

void HierPrior::validate() const {
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("HierPrior: s must be positive");
    if (alpha0.empty()) throw std::invalid_argument("HierPrior: alpha0 is empty");
    for (double a : alpha0) {
        if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("HierPrior: alpha0 must be positive");
    }
}

HierPrior HierPrior::uniform(std::size_t cells, double s, std::optional<double> s0) {
    if (cells == 0) throw std::invalid_argument("HierPrior::uniform: no cells");
    const double per_cell = s0 ? *s0 / static_cast<double>(cells) : 1.0;
    HierPrior prior{s, std::vector<double>(cells, per_cell)};
    prior.validate();
    return prior;
}

void VariationalSettings::validate() const {
    if (!(tolerance > 0.0)) throw std::invalid_argument("variational tolerance must be positive");
    if (max_iterations < 1) throw std::invalid_argument("variational max iterations must be at least 1");
    if (s0 && !(*s0 > 0.0)) throw std::invalid_argument("s0 must be positive");
}

namespace {

constexpr double kKappaFloor = 1e-12;

// Entropy of Dirichlet(a).
double dirichlet_entropy(std::span<const double> a) {
    double a0 = 0.0;
    for (double x : a) a0 += x;
    const double psi0 = digamma(a0);
    double h = -log_gamma(a0);
    for (double x : a) h += log_gamma(x) - (x - 1.0) * (digamma(x) - psi0);
    return h;
}

void check_shapes(const FamilyCounts& counts, const HierPrior& prior, std::span<const double> kappa,
                  std::span<const double> nu) {
    const std::size_t cells = counts.num_cells();
    if (prior.alpha0.size() != cells || kappa.size() != cells) {
        throw std::invalid_argument("variational parameters do not match the family's cell count");
    }
    if (nu.size() != cells * counts.num_groups()) throw std::invalid_argument("nu has the wrong shape");
}

// ELBO pieces that depend only on nu, plus the expectations E[ln theta^f]
// that couple nu to (tau, kappa).
class Objective {
public:
    Objective(const FamilyCounts& counts, const HierPrior& prior, std::span<const double> nu)
        : prior_(prior), cells_(counts.num_cells()), groups_(counts.num_groups()),
          expected_log_theta_sum_(cells_, 0.0) {
        for (double v : nu) {
            if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("nu must be positive");
        }
        const double s = prior.s;
        nu_part_ = 0.0;
        for (std::size_t f = 0; f < groups_; ++f) {
            const auto n = counts.group_table(f);
            const std::span<const double> nu_f = nu.subspan(f * cells_, cells_);
            const double psi0 = digamma(std::accumulate(nu_f.begin(), nu_f.end(), 0.0));
            double group = log_gamma(s);
            for (std::size_t c = 0; c < cells_; ++c) {
                const double e = digamma(nu_f[c]) - psi0;
                expected_log_theta_sum_[c] += e;
                group += (static_cast<double>(n[c]) - 1.0) * e;
            }
            group += dirichlet_entropy(nu_f);
            nu_part_ += group;
        }
        prior_const_ = log_gamma(prior.s0());
        for (double a : prior.alpha0) prior_const_ -= log_gamma(a);
    }

    double operator()(std::span<const double> kappa, double tau) const {
        if (!(tau > 0.0) || !std::isfinite(tau)) return -std::numeric_limits<double>::infinity();
        const double s = prior_.s;
        const double groups = static_cast<double>(groups_);
        const double psi_tau = digamma(tau);
        double value = nu_part_ + prior_const_;
        double coupling = 0.0;
        double expected_log_gamma = 0.0;
        double hyper = 0.0;
        double entropy = -log_gamma(tau);
        for (std::size_t c = 0; c < cells_; ++c) {
            const double k = kappa[c];
            const double sk = s * k;
            const double tk = tau * k;
            const double psi_tk = digamma(tk);
            coupling += sk * expected_log_theta_sum_[c];
            expected_log_gamma += log_gamma(sk) + 0.5 * s * s * trigamma(sk) * k * (1.0 - k) / (tau + 1.0);
            hyper += (prior_.alpha0[c] - 1.0) * (psi_tk - psi_tau);
            entropy += log_gamma(tk) - (tk - 1.0) * (psi_tk - psi_tau);
        }
        value += coupling - groups * expected_log_gamma + hyper + entropy;
        return value;
    }

    ElboGradient gradient(std::span<const double> kappa, double tau) const {
        const double s = prior_.s;
        const double groups = static_cast<double>(groups_);
        const double s0 = prior_.s0();
        std::vector<double> d_kappa(cells_);
        double d_tau = trigamma(tau) * (tau - s0);
        for (std::size_t c = 0; c < cells_; ++c) {
            const double k = kappa[c];
            const double sk = s * k;
            const double tk = tau * k;
            const double v = k * (1.0 - k);
            const double tri_sk = trigamma(sk);
            const double tri_tk = trigamma(tk);
            const double d_elg = s * digamma(sk) +
                                 0.5 * s * s / (tau + 1.0) * (s * tetragamma(sk) * v + tri_sk * (1.0 - 2.0 * k));
            d_kappa[c] = s * expected_log_theta_sum_[c] - groups * d_elg + tau * tri_tk * (prior_.alpha0[c] - tk);
            d_tau += groups * 0.5 * s * s * tri_sk * v / ((tau + 1.0) * (tau + 1.0)) +
                     k * tri_tk * (prior_.alpha0[c] - tk);
        }
        double mean = 0.0;
        for (std::size_t c = 0; c < cells_; ++c) mean += kappa[c] * d_kappa[c];
        ElboGradient g;
        g.d_log_tau = tau * d_tau;
        g.d_logits.resize(cells_);
        for (std::size_t c = 0; c < cells_; ++c) g.d_logits[c] = kappa[c] * (d_kappa[c] - mean);
        return g;
    }

private:
    const HierPrior& prior_;
    std::size_t cells_;
    std::size_t groups_;
    std::vector<double> expected_log_theta_sum_;
    double nu_part_ = 0.0;
    double prior_const_ = 0.0;
};

void softmax(std::span<const double> logits, std::vector<double>& out) {
    const double m = *std::max_element(logits.begin(), logits.end());
    out.resize(logits.size());
    double z = 0.0;
    for (std::size_t c = 0; c < logits.size(); ++c) {
        out[c] = std::exp(logits[c] - m);
        z += out[c];
    }
    for (double& x : out) x /= z;
}

// nu^f = s kappa + n^f.
void update_nu(const FamilyCounts& counts, double s, std::span<const double> kappa, std::vector<double>& nu) {
    const std::size_t cells = counts.num_cells();
    nu.resize(cells * counts.num_groups());
    for (std::size_t f = 0; f < counts.num_groups(); ++f) {
        const auto n = counts.group_table(f);
        for (std::size_t c = 0; c < cells; ++c) nu[f * cells + c] = s * kappa[c] + static_cast<double>(n[c]);
    }
}

// Floors kappa at kKappaFloor and renormalises; returns true if anything moved.
bool apply_floor(std::vector<double>& kappa) {
    bool moved = false;
    for (double& k : kappa) {
        if (k < kKappaFloor) {
            k = kKappaFloor;
            moved = true;
        }
    }
    if (moved) {
        const double z = std::accumulate(kappa.begin(), kappa.end(), 0.0);
        for (double& k : kappa) k /= z;
    }
    return moved;
}

// Gradient ascent with Armijo backtracking on (log tau, logits), nu fixed.
void maximise_hyper(const Objective& objective, std::vector<double>& logits, double& log_tau,
                    std::vector<double>& kappa, double& step) {
    constexpr int kMaxInner = 200;
    constexpr double kArmijo = 1e-4;
    constexpr double kMinStep = 1e-14;
    constexpr double kMaxStep = 1e4;

    double value = objective(kappa, std::exp(log_tau));
    std::vector<double> trial_logits(logits.size());
    std::vector<double> trial_kappa;
    for (int inner = 0; inner < kMaxInner; ++inner) {
        const ElboGradient g = objective.gradient(kappa, std::exp(log_tau));
        double norm2 = g.d_log_tau * g.d_log_tau;
        for (double d : g.d_logits) norm2 += d * d;
        if (!(norm2 > 0.0) || std::sqrt(norm2) < 1e-12) break;

        bool accepted = false;
        double trial_value = value;
        double trial_log_tau = log_tau;
        while (step > kMinStep) {
            trial_log_tau = log_tau + step * g.d_log_tau;
            for (std::size_t c = 0; c < logits.size(); ++c) trial_logits[c] = logits[c] + step * g.d_logits[c];
            softmax(trial_logits, trial_kappa);
            trial_value = objective(trial_kappa, std::exp(trial_log_tau));
            if (std::isfinite(trial_value) && trial_value >= value + kArmijo * step * norm2) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            step = 1.0;
            break;
        }
        const double gain = trial_value - value;
        logits.swap(trial_logits);
        kappa.swap(trial_kappa);
        log_tau = trial_log_tau;
        value = trial_value;
        step = std::min(step * 2.0, kMaxStep);
        if (gain <= 1e-14 * std::max(1.0, std::abs(value))) break;
    }
}

}  // namespace

double elbo(const FamilyCounts& counts, const HierPrior& prior, std::span<const double> kappa, double tau,
            std::span<const double> nu) {
    prior.validate();
    check_shapes(counts, prior, kappa, nu);
    if (!(tau > 0.0)) throw std::invalid_argument("elbo: tau must be positive");
    for (double k : kappa) {
        if (!(k > 0.0)) throw std::invalid_argument("elbo: kappa must be strictly positive");
    }
    return Objective(counts, prior, nu)(kappa, tau);
}

ElboGradient elbo_gradient(const FamilyCounts& counts, const HierPrior& prior, std::span<const double> kappa,
                           double tau, std::span<const double> nu) {
    prior.validate();
    check_shapes(counts, prior, kappa, nu);
    if (!(tau > 0.0)) throw std::invalid_argument("elbo_gradient: tau must be positive");
    return Objective(counts, prior, nu).gradient(kappa, tau);
}

VariationalFit fit_variational(const FamilyCounts& counts, const HierPrior& prior,
                               const VariationalSettings& settings) {
    prior.validate();
    settings.validate();
    const std::size_t cells = counts.num_cells();
    if (prior.alpha0.size() != cells) throw std::invalid_argument("fit_variational: alpha0 has the wrong length");

    VariationalFit fit;
    const double s0 = prior.s0();

    if (counts.total() == 0) {
        fit.kappa.resize(cells);
        for (std::size_t c = 0; c < cells; ++c) fit.kappa[c] = prior.alpha0[c] / s0;
        fit.tau = s0;
        update_nu(counts, prior.s, fit.kappa, fit.nu);
        fit.elbo_trace.push_back(Objective(counts, prior, fit.nu)(fit.kappa, fit.tau));
        fit.converged = true;
        return fit;
    }

    const auto pooled = counts.pooled_table();
    fit.kappa.resize(cells);
    for (std::size_t c = 0; c < cells; ++c) fit.kappa[c] = static_cast<double>(pooled[c]) + prior.alpha0[c];
    const double z = std::accumulate(fit.kappa.begin(), fit.kappa.end(), 0.0);
    for (double& k : fit.kappa) k /= z;
    apply_floor(fit.kappa);

    std::vector<double> logits(cells);
    for (std::size_t c = 0; c < cells; ++c) logits[c] = std::log(fit.kappa[c]);
    double log_tau = std::log(s0);

    update_nu(counts, prior.s, fit.kappa, fit.nu);
    double previous = Objective(counts, prior, fit.nu)(fit.kappa, std::exp(log_tau));
    fit.elbo_trace.push_back(previous);

    double step = 1.0;
    for (int it = 1; it <= settings.max_iterations; ++it) {
        {
            const Objective objective(counts, prior, fit.nu);
            maximise_hyper(objective, logits, log_tau, fit.kappa, step);
        }
        if (apply_floor(fit.kappa)) {
            for (std::size_t c = 0; c < cells; ++c) logits[c] = std::log(fit.kappa[c]);
        }
        update_nu(counts, prior.s, fit.kappa, fit.nu);
        const double current = Objective(counts, prior, fit.nu)(fit.kappa, std::exp(log_tau));
        fit.elbo_trace.push_back(current);
        fit.iterations = it;
        if (std::abs(current - previous) < settings.tolerance * std::abs(previous)) {
            fit.converged = true;
            break;
        }
        previous = current;
    }
    fit.tau = std::exp(log_tau);
    return fit;
}

double bhd_local_log_score(const FamilyCounts& counts, std::span<const double> kappa, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("BHD: imaginary sample size must be positive");
    if (kappa.size() != counts.num_cells()) throw std::invalid_argument("BHD: kappa does not match the family shape");
    std::vector<double> alpha(kappa.size());
    for (std::size_t c = 0; c < kappa.size(); ++c) alpha[c] = s * kappa[c];
    double score = 0.0;
    for (std::size_t f = 0; f < counts.num_groups(); ++f) {
        score += bd_local_log_score(counts.group_table(f), counts.child_cardinality(), alpha);
    }
    return score;
}

double bhd_local_log_score(const FamilyCounts& counts, const VariationalFit& fit, double s) {
    if (fit.nu.size() != counts.num_cells() * counts.num_groups()) {
        throw std::invalid_argument("BHD: fit does not match the family shape");
    }
    return bhd_local_log_score(counts, fit.kappa, s);
}

std::vector<double> hier_posterior_means(const FamilyCounts& counts, std::span<const double> kappa, double s) {
    if (kappa.size() != counts.num_cells()) throw std::invalid_argument("hier_posterior_means: shape mismatch");
    const std::size_t cells = counts.num_cells();
    std::vector<double> theta(cells * counts.num_groups());
    for (std::size_t f = 0; f < counts.num_groups(); ++f) {
        const auto n = counts.group_table(f);
        const double denom = s + static_cast<double>(counts.group_total(f));
        for (std::size_t c = 0; c < cells; ++c) theta[f * cells + c] = (s * kappa[c] + static_cast<double>(n[c])) / denom;
    }
    return theta;
}

}  // namespace bhdnet
