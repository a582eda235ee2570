/**
 * @file dirichlet.hpp
 * @brief Multinomial / Dirichlet kernels and the conjugate update.
 *
 * Densities are returned in log space; Gamma overflows for modest counts.
 */

#ifndef WSBAYES_DIRICHLET_HPP
#define WSBAYES_DIRICHLET_HPP

#include "wsbayes/core.hpp"
#include "wsbayes/rng.hpp"

namespace wsbayes {

/// log P(counts | weights) for the multinomial.
double multinomial_log_pmf(const PreferenceCounts& counts, const WeightVector& weights);

/// Log Dirichlet density at an interior simplex point; throws on boundary points.
double dirichlet_log_pdf(std::span<const double> point, const DirichletParams& params);

inline double dirichlet_log_pdf(const WeightVector& point, const DirichletParams& params) {
    return dirichlet_log_pdf(point.values(), params);
}

/// Conjugate update: alpha_i + n_i.
DirichletParams posterior_update(const DirichletParams& prior, const PreferenceCounts& counts);

/// alpha_i / alpha0.
WeightVector posterior_mean(const DirichletParams& params);

/// One Dirichlet draw via normalized Gamma variates.
WeightVector dirichlet_sample(const DirichletParams& params, RngSeed seed);
WeightVector dirichlet_sample(const DirichletParams& params, Rng& rng);

/// Multinomial draw by sequential conditional binomials.
PreferenceCounts multinomial_sample(std::int64_t trials, const WeightVector& weights, RngSeed seed);
PreferenceCounts multinomial_sample(std::int64_t trials, const WeightVector& weights, Rng& rng);

}  // namespace wsbayes

#endif  // WSBAYES_DIRICHLET_HPP
