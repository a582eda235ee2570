/**
 * @file simulation.hpp
 * @brief Monte-Carlo comparison of the frequentist and empirical-Bayes weight estimators.
 *
 * Each (sample size, replication) pair draws from its own RNG substream and
 * partial sums are combined with a fixed pairwise tree, so results are
 * bitwise identical for any thread count.
 */

#ifndef WSBAYES_SIMULATION_HPP
#define WSBAYES_SIMULATION_HPP

#include <string>

#include "wsbayes/core.hpp"
#include "wsbayes/empirical_bayes.hpp"
#include "wsbayes/rng.hpp"

namespace wsbayes {

struct SimulationPlan {
    WeightVector true_weights;
    std::vector<std::int64_t> sample_sizes;
    int replications = 1000;
    RngSeed seed{};
    FitConfig fit_config{};
    /// Worker threads; 0 picks hardware concurrency.
    unsigned threads = 0;

    void validate() const;
};

struct SizeResult {
    std::int64_t sample_size = 0;
    std::vector<double> mse_freq;
    std::vector<double> mse_bayes;
    /// Mean estimate across replications, for bias checks.
    std::vector<double> mean_freq;
    std::vector<double> mean_bayes;
    double mean_gain = 0.0;
    int replication_count = 0;
    /// Replications whose fit threw; excluded from the averages.
    int skipped = 0;
    int unconverged = 0;
};

struct SimulationResult {
    std::vector<SizeResult> sizes;
    std::size_t categories = 0;
};

SimulationResult run_simulation(const SimulationPlan& plan);

struct GainPoint {
    std::int64_t sample_size = 0;
    double mean_gain = 0.0;
};

/// One (sample size, mean gain) row per size, ascending.
std::vector<GainPoint> gain_curve(const SimulationResult& result);

/// `n,mean_gain,mse_freq_1..l,mse_bayes_1..l` with one row per size.
std::string gain_curve_csv(const SimulationResult& result);

/// Sum of @p values combined as a balanced binary tree over index ranges.
double pairwise_sum(std::span<const double> values);

}  // namespace wsbayes

#endif  // WSBAYES_SIMULATION_HPP
