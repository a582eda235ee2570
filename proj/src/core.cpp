#include "wsbayes/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wsbayes {

LengthMismatch::LengthMismatch(std::size_t expected, std::size_t got)
    : std::invalid_argument("length mismatch: expected " + std::to_string(expected) +
                            " categories, got " + std::to_string(got)) {}

void require_same_length(std::size_t expected, std::size_t got) {
    if (expected != got) throw LengthMismatch(expected, got);
}

PreferenceCounts::PreferenceCounts(std::vector<std::int64_t> counts) : counts_(std::move(counts)) {
    if (counts_.size() < 2) throw std::invalid_argument("counts need at least 2 categories");
    for (auto c : counts_) {
        if (c < 0) throw std::invalid_argument("negative count " + std::to_string(c));
        total_ += c;
    }
}

PreferenceCounts PreferenceCounts::allow_empty(std::vector<std::int64_t> counts) {
    return PreferenceCounts(std::move(counts));
}

bool PreferenceCounts::has_zero_category() const {
    return std::ranges::any_of(counts_, [](auto c) { return c == 0; });
}

PreferenceCounts validate_counts(std::vector<std::int64_t> counts) {
    PreferenceCounts out(std::move(counts));
    if (out.total() == 0) throw std::invalid_argument("counts are all zero");
    return out;
}

WeightVector make_weight_vector(std::span<const double> raw) {
    if (raw.size() < 2) throw std::invalid_argument("weight vector needs at least 2 entries");
    double sum = 0.0;
    for (double w : raw) {
        if (!std::isfinite(w)) throw std::invalid_argument("non-finite weight");
        if (!(w > 0.0)) throw std::invalid_argument("weights must be strictly positive");
        sum += w;
    }
    if (!std::isfinite(sum)) throw std::invalid_argument("weight sum overflows");
    std::vector<double> w(raw.begin(), raw.end());
    for (double& x : w) x /= sum;
    return WeightVector(std::move(w));
}

DirichletParams::DirichletParams(std::vector<double> alpha) : alpha_(std::move(alpha)) {
    if (alpha_.size() < 2) throw std::invalid_argument("Dirichlet needs at least 2 categories");
    for (double a : alpha_) {
        if (!std::isfinite(a) || !(a > 0.0))
            throw std::invalid_argument("concentration parameters must be positive and finite");
    }
    alpha0_ = std::accumulate(alpha_.begin(), alpha_.end(), 0.0);
    if (!std::isfinite(alpha0_)) throw std::invalid_argument("alpha0 is not finite");
}

DirichletParams DirichletParams::uniform(std::size_t categories) {
    return DirichletParams(std::vector<double>(categories, 1.0));
}

ObjectiveValues::ObjectiveValues(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) {
        if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("objective value outside [0,1]");
    }
}

}  // namespace wsbayes
