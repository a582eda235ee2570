/**
 * @file estimators.hpp
 * @brief Frequentist vs. empirical-Bayes weight estimators and their error variances.
 */

#ifndef WSBAYES_ESTIMATORS_HPP
#define WSBAYES_ESTIMATORS_HPP

#include <iosfwd>
#include <limits>
#include <string>

#include "wsbayes/core.hpp"
#include "wsbayes/empirical_bayes.hpp"

namespace wsbayes {

/// Returned by efficiency() when the second variance is zero.
inline constexpr double kInfiniteEfficiency = std::numeric_limits<double>::infinity();

/**
 * Sample proportions n_i / n. Unlike WeightVector, entries may be zero when a
 * category received no votes; such proportions are reported but never used
 * as scalarization weights.
 */
struct Proportions {
    std::vector<double> values;
    bool has_zero = false;
};

Proportions frequentist_weights(const PreferenceCounts& counts);

/// w_i (1 - w_i) / n per component.
std::vector<double> frequentist_variance(std::span<const double> weights, std::int64_t n);

/**
 * Plug-in variance n w_i (1 - w_i) / (sum_j (alpha_j + n))^2, i.e. a
 * denominator of (alpha0 + l n)^2. It does not coincide with the Dirichlet
 * variance; see bayesian_variance_exact for that.
 */
std::vector<double> bayesian_variance_paper(const WeightVector& bayes_weights,
                                            const DirichletParams& alpha_hat, std::int64_t n);

/// Dirichlet posterior variance m_i (1 - m_i) / (a0 + 1).
std::vector<double> bayesian_variance_exact(const DirichletParams& posterior);

/// v1 / v2.
double efficiency(double v1, double v2);

/// (v1 - v2) / v1; throws when v1 == 0.
double relative_gain(double v1, double v2);

struct EstimatorReport {
    PreferenceCounts counts;
    Proportions freq_weights;
    WeightVector bayes_weights;
    DirichletParams alpha_hat;
    std::vector<double> freq_variance{};
    std::vector<double> bayes_variance_paper{};
    std::vector<double> bayes_variance_exact{};
    std::vector<double> efficiency{};
    /// NaN where the frequentist variance is zero (gain undefined).
    std::vector<double> gain{};
    /// Mean of the defined per-component gains.
    double gain_aggregate = 0.0;
    bool fit_converged = false;
    bool fit_hit_cap = false;
    bool zero_category = false;
};

EstimatorReport build_report(const PreferenceCounts& counts, const FitConfig& config = {});

/// `n,n1,..,nl,w1,..,wl,w1b,..,wlb,evd1..,evs1..,d1..,gain`
std::string report_csv_header(std::size_t categories);
std::string report_csv_row(const EstimatorReport& report);

/// Shortest round-trip decimal representation.
std::string format_full(double value);

}  // namespace wsbayes

#endif  // WSBAYES_ESTIMATORS_HPP
