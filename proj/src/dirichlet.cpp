#include "wsbayes/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wsbayes/special.hpp"

namespace wsbayes {

using special::log_factorial;
using special::log_gamma;

double multinomial_log_pmf(const PreferenceCounts& counts, const WeightVector& weights) {
    require_same_length(counts.size(), weights.size());
    double result = log_factorial(counts.total());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const auto n_i = counts[i];
        result -= log_factorial(n_i);
        if (n_i > 0) result += static_cast<double>(n_i) * std::log(weights[i]);
    }
    return result;
}

double dirichlet_log_pdf(std::span<const double> point, const DirichletParams& params) {
    require_same_length(params.size(), point.size());
    double result = log_gamma(params.alpha0());
    double sum = 0.0;
    for (std::size_t i = 0; i < point.size(); ++i) {
        const double x = point[i];
        if (!(x > 0.0 && x < 1.0))
            throw std::invalid_argument("point is not strictly inside the simplex");
        sum += x;
        result += (params[i] - 1.0) * std::log(x) - log_gamma(params[i]);
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("point does not sum to one");
    return result;
}

DirichletParams posterior_update(const DirichletParams& prior, const PreferenceCounts& counts) {
    require_same_length(prior.size(), counts.size());
    std::vector<double> alpha(prior.alpha().begin(), prior.alpha().end());
    for (std::size_t i = 0; i < alpha.size(); ++i) alpha[i] += static_cast<double>(counts[i]);
    return DirichletParams(std::move(alpha));
}

WeightVector posterior_mean(const DirichletParams& params) {
    return make_weight_vector(params.alpha());
}

WeightVector dirichlet_sample(const DirichletParams& params, Rng& rng) {
    // Work in log space so shapes far below one do not underflow to zero.
    std::vector<double> log_g(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double a = params[i];
        if (a >= 1.0) {
            log_g[i] = std::log(rng.gamma(a));
        } else {
            log_g[i] = std::log(rng.gamma(a + 1.0)) + std::log(rng.uniform_open()) / a;
        }
    }
    const double top = *std::ranges::max_element(log_g);
    std::vector<double> w(log_g.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = std::max(std::exp(log_g[i] - top), std::numeric_limits<double>::min());
    return make_weight_vector(w);
}

WeightVector dirichlet_sample(const DirichletParams& params, RngSeed seed) {
    Rng rng(seed);
    return dirichlet_sample(params, rng);
}

PreferenceCounts multinomial_sample(std::int64_t trials, const WeightVector& weights, Rng& rng) {
    if (trials < 1) throw std::invalid_argument("multinomial trials must be >= 1");
    std::vector<std::int64_t> counts(weights.size(), 0);
    std::int64_t remaining = trials;
    double remaining_mass = 1.0;
    for (std::size_t i = 0; i + 1 < weights.size() && remaining > 0; ++i) {
        const double p = std::clamp(weights[i] / remaining_mass, 0.0, 1.0);
        counts[i] = rng.binomial(remaining, p);
        remaining -= counts[i];
        remaining_mass -= weights[i];
        if (remaining_mass <= 0.0) break;
    }
    counts.back() += remaining;
    return PreferenceCounts::allow_empty(std::move(counts));
}

PreferenceCounts multinomial_sample(std::int64_t trials, const WeightVector& weights, RngSeed seed) {
    Rng rng(seed);
    return multinomial_sample(trials, weights, rng);
}

}  // namespace wsbayes
