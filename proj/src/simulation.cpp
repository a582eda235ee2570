#include "wsbayes/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wsbayes/dirichlet.hpp"
#include "wsbayes/estimators.hpp"
#include "parallel.hpp"

namespace wsbayes {

void SimulationPlan::validate() const {
    if (sample_sizes.empty()) throw std::invalid_argument("no sample sizes given");
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");
    const auto l = static_cast<std::int64_t>(true_weights.size());
    for (std::size_t i = 0; i < sample_sizes.size(); ++i) {
        if (sample_sizes[i] < l)
            throw std::invalid_argument("sample size " + std::to_string(sample_sizes[i]) +
                                        " is smaller than the number of categories");
        if (i > 0 && sample_sizes[i] <= sample_sizes[i - 1])
            throw std::invalid_argument("sample sizes must be strictly ascending");
    }
    fit_config.validate(true_weights.size());
}

double pairwise_sum(std::span<const double> values) {
    if (values.empty()) return 0.0;
    if (values.size() == 1) return values[0];
    const std::size_t mid = values.size() / 2;
    return pairwise_sum(values.first(mid)) + pairwise_sum(values.subspan(mid));
}

namespace {

// Per-replication record: squared errors and raw estimates, freq then bayes.
struct Replicate {
    std::vector<double> sq_freq, sq_bayes, est_freq, est_bayes;
    bool skipped = false;
    bool unconverged = false;
};

Replicate run_replicate(const SimulationPlan& plan, std::int64_t n, int r) {
    const std::size_t l = plan.true_weights.size();
    Replicate out;
    out.sq_freq.assign(l, 0.0);
    out.sq_bayes.assign(l, 0.0);
    out.est_freq.assign(l, 0.0);
    out.est_bayes.assign(l, 0.0);

    const RngSeed stream =
        plan.seed.substream({static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r)});
    const PreferenceCounts counts = multinomial_sample(n, plan.true_weights, stream);
    const Proportions freq = frequentist_weights(counts);
    try {
        const FitResult fit = fit_alpha(counts, plan.fit_config);
        const WeightVector bayes = bayesian_weights(counts, fit);
        out.unconverged = !fit.converged;
        for (std::size_t i = 0; i < l; ++i) {
            const double t = plan.true_weights[i];
            out.est_freq[i] = freq.values[i];
            out.est_bayes[i] = bayes[i];
            out.sq_freq[i] = (freq.values[i] - t) * (freq.values[i] - t);
            out.sq_bayes[i] = (bayes[i] - t) * (bayes[i] - t);
        }
    } catch (const std::exception&) {
        out.skipped = true;
    }
    return out;
}

}  // namespace

SimulationResult run_simulation(const SimulationPlan& plan) {
    plan.validate();
    const std::size_t l = plan.true_weights.size();
    SimulationResult result;
    result.categories = l;

    for (const std::int64_t n : plan.sample_sizes) {
        std::vector<Replicate> reps(static_cast<std::size_t>(plan.replications));
        detail::parallel_for(plan.replications, plan.threads,
                     [&](int r) { reps[static_cast<std::size_t>(r)] = run_replicate(plan, n, r); });

        SizeResult row;
        row.sample_size = n;
        row.replication_count = plan.replications;
        for (const auto& rep : reps) {
            row.skipped += rep.skipped ? 1 : 0;
            row.unconverged += rep.unconverged ? 1 : 0;
        }
        const double used = static_cast<double>(plan.replications - row.skipped);

        std::vector<double> column(reps.size());
        auto average = [&](auto member, std::size_t i) {
            for (std::size_t r = 0; r < reps.size(); ++r) column[r] = (reps[r].*member)[i];
            return used > 0 ? pairwise_sum(column) / used : std::numeric_limits<double>::quiet_NaN();
        };
        double gain_sum = 0.0;
        int gain_terms = 0;
        for (std::size_t i = 0; i < l; ++i) {
            row.mse_freq.push_back(average(&Replicate::sq_freq, i));
            row.mse_bayes.push_back(average(&Replicate::sq_bayes, i));
            row.mean_freq.push_back(average(&Replicate::est_freq, i));
            row.mean_bayes.push_back(average(&Replicate::est_bayes, i));
            if (row.mse_freq.back() > 0.0) {
                gain_sum += relative_gain(row.mse_freq.back(), row.mse_bayes.back());
                ++gain_terms;
            }
        }
        row.mean_gain = gain_terms > 0 ? gain_sum / gain_terms : 0.0;
        result.sizes.push_back(std::move(row));
    }
    return result;
}

std::vector<GainPoint> gain_curve(const SimulationResult& result) {
    if (result.sizes.empty()) throw std::invalid_argument("empty simulation result");
    std::vector<GainPoint> curve;
    for (const auto& row : result.sizes) curve.push_back({row.sample_size, row.mean_gain});
    std::ranges::sort(curve, {}, &GainPoint::sample_size);
    return curve;
}

std::string gain_curve_csv(const SimulationResult& result) {
    std::ostringstream out;
    out << "n,mean_gain";
    for (std::size_t i = 1; i <= result.categories; ++i) out << ",mse_freq_" << i;
    for (std::size_t i = 1; i <= result.categories; ++i) out << ",mse_bayes_" << i;
    out << '\n';
    for (const auto& row : result.sizes) {
        out << row.sample_size << ',' << format_full(row.mean_gain);
        for (double v : row.mse_freq) out << ',' << format_full(v);
        for (double v : row.mse_bayes) out << ',' << format_full(v);
        out << '\n';
    }
    return out.str();
}

}  // namespace wsbayes
