#include "wsbayes/estimators.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "wsbayes/dirichlet.hpp"

namespace wsbayes {

Proportions frequentist_weights(const PreferenceCounts& counts) {
    if (counts.total() <= 0) throw std::invalid_argument("frequentist weights need a positive total");
    Proportions out;
    const double n = static_cast<double>(counts.total());
    out.values.reserve(counts.size());
    for (auto c : counts.values()) {
        out.values.push_back(static_cast<double>(c) / n);
        out.has_zero = out.has_zero || c == 0;
    }
    return out;
}

std::vector<double> frequentist_variance(std::span<const double> weights, std::int64_t n) {
    if (n < 1) throw std::invalid_argument("sample size must be >= 1");
    std::vector<double> out;
    out.reserve(weights.size());
    for (double w : weights) out.push_back(w * (1.0 - w) / static_cast<double>(n));
    return out;
}

std::vector<double> bayesian_variance_paper(const WeightVector& bayes_weights,
                                            const DirichletParams& alpha_hat, std::int64_t n) {
    require_same_length(alpha_hat.size(), bayes_weights.size());
    if (n < 1) throw std::invalid_argument("sample size must be >= 1");
    const double nd = static_cast<double>(n);
    double denom = 0.0;
    for (double a : alpha_hat.alpha()) denom += a + nd;
    denom *= denom;
    std::vector<double> out;
    out.reserve(bayes_weights.size());
    for (double w : bayes_weights.values()) out.push_back(nd * w * (1.0 - w) / denom);
    return out;
}

std::vector<double> bayesian_variance_exact(const DirichletParams& posterior) {
    const double a0 = posterior.alpha0();
    std::vector<double> out;
    out.reserve(posterior.size());
    for (double a : posterior.alpha()) {
        const double m = a / a0;
        out.push_back(m * (1.0 - m) / (a0 + 1.0));
    }
    return out;
}

double efficiency(double v1, double v2) {
    if (v2 == 0.0) return kInfiniteEfficiency;
    return v1 / v2;
}

double relative_gain(double v1, double v2) {
    if (v1 == 0.0) throw std::domain_error("relative gain undefined for zero reference variance");
    return (v1 - v2) / v1;
}

EstimatorReport build_report(const PreferenceCounts& counts, const FitConfig& config) {
    const FitResult fit = fit_alpha(counts, config);
    const std::int64_t n = counts.total();

    EstimatorReport r{.counts = counts,
                      .freq_weights = frequentist_weights(counts),
                      .bayes_weights = bayesian_weights(counts, fit),
                      .alpha_hat = fit.alpha_hat};
    r.freq_variance = frequentist_variance(r.freq_weights.values, n);
    r.bayes_variance_paper = bayesian_variance_paper(r.bayes_weights, fit.alpha_hat, n);
    r.bayes_variance_exact = bayesian_variance_exact(posterior_update(fit.alpha_hat, counts));
    r.fit_converged = fit.converged;
    r.fit_hit_cap = fit.hit_cap;
    r.zero_category = r.freq_weights.has_zero;

    double gain_sum = 0.0;
    int defined = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double v1 = r.freq_variance[i];
        const double v2 = r.bayes_variance_paper[i];
        r.efficiency.push_back(efficiency(v1, v2));
        if (v1 == 0.0) {
            r.gain.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        r.gain.push_back(relative_gain(v1, v2));
        gain_sum += r.gain.back();
        ++defined;
    }
    r.gain_aggregate = defined > 0 ? gain_sum / defined : std::numeric_limits<double>::quiet_NaN();
    return r;
}

std::string format_full(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string report_csv_header(std::size_t categories) {
    std::ostringstream out;
    out << "n";
    auto block = [&](const char* prefix, const char* suffix) {
        for (std::size_t i = 1; i <= categories; ++i) out << ',' << prefix << i << suffix;
    };
    block("n", "");
    block("w", "");
    block("w", "b");
    block("evd", "");
    block("evs", "");
    block("d", "");
    out << ",gain";
    return out.str();
}

std::string report_csv_row(const EstimatorReport& r) {
    std::ostringstream out;
    out << r.counts.total();
    for (auto c : r.counts.values()) out << ',' << c;
    auto block = [&](std::span<const double> v) {
        for (double x : v) out << ',' << format_full(x);
    };
    block(r.freq_weights.values);
    block(r.bayes_weights.values());
    block(r.freq_variance);
    block(r.bayes_variance_paper);
    std::vector<double> diff(r.freq_variance.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = r.freq_variance[i] - r.bayes_variance_paper[i];
    block(diff);
    out << ',' << format_full(r.gain_aggregate);
    return out.str();
}

}  // namespace wsbayes
