/**
 * @file core.hpp
 * @brief Domain types shared by the estimation, simulation and routing code.
 *
 * All types validate their invariants at construction and are immutable
 * afterwards, so they can be passed freely between threads.
 */

#ifndef WSBAYES_CORE_HPP
#define WSBAYES_CORE_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wsbayes {

namespace tolerance {
/// Allowed deviation of a weight vector's sum from one.
inline constexpr double kSimplexSum = 1e-12;
/// Cross-checks against values tabulated to 4-5 decimal places.
inline constexpr double kCrossCheck = 1e-9;
}  // namespace tolerance

/// Thrown when two category-indexed vectors disagree in length.
class LengthMismatch : public std::invalid_argument {
public:
    LengthMismatch(std::size_t expected, std::size_t got);
};

/**
 * @brief Survey votes per category.
 *
 * Every entry is non-negative. A count vector with total zero is only
 * produced internally (e.g. "no data" posterior updates); validate_counts
 * rejects it.
 */
class PreferenceCounts {
public:
    PreferenceCounts() = default;

    std::span<const std::int64_t> values() const { return counts_; }
    std::int64_t operator[](std::size_t i) const { return counts_[i]; }
    std::size_t size() const { return counts_.size(); }
    std::int64_t total() const { return total_; }
    bool has_zero_category() const;

    /// Builds counts that may all be zero; used for the empty-data cases.
    static PreferenceCounts allow_empty(std::vector<std::int64_t> counts);

    friend bool operator==(const PreferenceCounts&, const PreferenceCounts&) = default;

private:
    explicit PreferenceCounts(std::vector<std::int64_t> counts);
    friend PreferenceCounts validate_counts(std::vector<std::int64_t> counts);

    std::vector<std::int64_t> counts_;
    std::int64_t total_ = 0;
};

/// Point strictly inside the probability simplex.
class WeightVector {
public:
    std::span<const double> values() const { return weights_; }
    double operator[](std::size_t i) const { return weights_[i]; }
    std::size_t size() const { return weights_.size(); }

    friend bool operator==(const WeightVector&, const WeightVector&) = default;

private:
    explicit WeightVector(std::vector<double> w) : weights_(std::move(w)) {}
    friend WeightVector make_weight_vector(std::span<const double> raw);

    std::vector<double> weights_;
};

/// Dirichlet concentration vector (prior or posterior).
class DirichletParams {
public:
    explicit DirichletParams(std::vector<double> alpha);

    /// All-ones concentration over @p categories categories.
    static DirichletParams uniform(std::size_t categories);

    std::span<const double> alpha() const { return alpha_; }
    double operator[](std::size_t i) const { return alpha_[i]; }
    std::size_t size() const { return alpha_.size(); }
    double alpha0() const { return alpha0_; }

    friend bool operator==(const DirichletParams&, const DirichletParams&) = default;

private:
    std::vector<double> alpha_;
    double alpha0_ = 0.0;
};

/// Normalized objective values f_i(x), each in [0,1].
class ObjectiveValues {
public:
    explicit ObjectiveValues(std::vector<double> values);

    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

private:
    std::vector<double> values_;
};

/// Normalizes positive raw weights onto the simplex.
WeightVector make_weight_vector(std::span<const double> raw);

inline WeightVector make_weight_vector(std::initializer_list<double> raw) {
    return make_weight_vector(std::span<const double>(raw.begin(), raw.size()));
}

/// Checks survey counts: length >= 2, non-negative, not all zero.
PreferenceCounts validate_counts(std::vector<std::int64_t> counts);

void require_same_length(std::size_t expected, std::size_t got);

}  // namespace wsbayes

#endif  // WSBAYES_CORE_HPP
