/**
 * @file empirical_bayes.hpp
 * @brief Type-II maximum likelihood for the Dirichlet prior.
 *
 * The concentration vector is chosen to maximize the Dirichlet-multinomial
 * marginal likelihood of the observed counts. For a single count vector the
 * supremum is approached as alpha -> c * counts with c -> infinity, so the
 * search is bounded by FitConfig::alpha0_cap and FitResult::hit_cap reports
 * when that bound is active.
 */

#ifndef WSBAYES_EMPIRICAL_BAYES_HPP
#define WSBAYES_EMPIRICAL_BAYES_HPP

#include <optional>

#include "wsbayes/core.hpp"

namespace wsbayes {

enum class Optimizer { fixed_point, direct_search };

/// Lower bound applied to every fitted concentration.
inline constexpr double kAlphaFloor = 1e-6;

struct FitConfig {
    /// Starting point; all-ones over the counts' categories when unset.
    std::optional<DirichletParams> alpha_init;
    int max_iterations = 500;
    /// Max absolute change in alpha per step that counts as converged.
    double convergence_tol = 1e-8;
    double alpha0_cap = 1e4;
    Optimizer optimizer = Optimizer::fixed_point;

    /// Throws if the config is unusable for @p categories categories.
    void validate(std::size_t categories) const;
};

struct FitResult {
    DirichletParams alpha_hat;
    double log_marginal = 0.0;
    int iterations = 0;
    bool converged = false;
    bool hit_cap = false;
    /// Objective after each accepted iteration (starting value first).
    std::vector<double> trajectory;
};

/// log of the Dirichlet-multinomial marginal likelihood.
double log_marginal_likelihood(const PreferenceCounts& counts, const DirichletParams& alpha);

FitResult fit_alpha(const PreferenceCounts& counts, const FitConfig& config = {});

/// Posterior-mean weights (alpha_hat_i + n_i) / sum_j (alpha_hat_j + n_j).
WeightVector bayesian_weights(const PreferenceCounts& counts, const FitResult& fit);
WeightVector bayesian_weights(const PreferenceCounts& counts, const DirichletParams& alpha_hat);

}  // namespace wsbayes

#endif  // WSBAYES_EMPIRICAL_BAYES_HPP
