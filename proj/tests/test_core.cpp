#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "wsbayes/core.hpp"
#include "wsbayes/rng.hpp"

using namespace wsbayes;

namespace {
double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }
}  // namespace

TEST_CASE("make_weight_vector normalizes onto the simplex") {
    const auto third = make_weight_vector({1.0, 1.0, 1.0});
    for (double w : third.values()) CHECK(w == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    const auto survey = make_weight_vector({24.0, 11.0, 12.0});
    CHECK(survey[0] == doctest::Approx(24.0 / 47.0).epsilon(1e-15));
    CHECK(survey[1] == doctest::Approx(11.0 / 47.0).epsilon(1e-15));
    CHECK(survey[2] == doctest::Approx(12.0 / 47.0).epsilon(1e-15));
    CHECK(std::abs(survey[0] - 0.510638) < 1e-6);

    const auto rounded = make_weight_vector({0.32, 0.28, 0.40});
    CHECK(std::abs(rounded[0] - 0.32) < 1e-12);
    CHECK(std::abs(rounded[1] - 0.28) < 1e-12);
    CHECK(std::abs(rounded[2] - 0.40) < 1e-12);
}

TEST_CASE("make_weight_vector rejects invalid input") {
    CHECK_THROWS_AS(make_weight_vector({1.0, 0.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_weight_vector({1.0, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_weight_vector({1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_weight_vector(std::span<const double>{}), std::invalid_argument);
    CHECK_THROWS_AS(make_weight_vector({1.0, std::numeric_limits<double>::infinity()}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_weight_vector({1.0, std::numeric_limits<double>::quiet_NaN()}),
                    std::invalid_argument);
}

TEST_CASE("weight vector properties: idempotent, scale invariant, on the simplex") {
    Rng rng(RngSeed{11, 0});
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t l = 2 + rng.below(7);
        std::vector<double> raw(l);
        for (double& x : raw) x = 1e-3 + 100.0 * rng.uniform();
        const auto w = make_weight_vector(raw);
        CHECK(std::abs(sum(w.values()) - 1.0) <= tolerance::kSimplexSum);
        CHECK(*std::min_element(w.values().begin(), w.values().end()) > 0.0);

        const auto again = make_weight_vector(w.values());
        const double c = std::exp(10.0 * rng.uniform() - 5.0);
        std::vector<double> scaled(raw);
        for (double& x : scaled) x *= c;
        const auto s = make_weight_vector(scaled);
        for (std::size_t i = 0; i < l; ++i) {
            CHECK(std::abs(again[i] - w[i]) <= 1e-12);
            CHECK(std::abs(s[i] - w[i]) <= 1e-12);
        }
    }
}

TEST_CASE("validate_counts") {
    CHECK(validate_counts({2, 3, 5}).total() == 10);
    CHECK(validate_counts({7, 7, 7}).total() == 21);
    CHECK_THROWS_AS(validate_counts({0, -1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(validate_counts({0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(validate_counts({5}), std::invalid_argument);
    CHECK(validate_counts({0, 4}).has_zero_category());
    CHECK_FALSE(validate_counts({1, 4}).has_zero_category());
}

TEST_CASE("DirichletParams and ObjectiveValues invariants") {
    const DirichletParams p({0.5, 1.5, 2.0});
    CHECK(p.alpha0() == doctest::Approx(4.0));
    CHECK_THROWS_AS(DirichletParams({1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(DirichletParams({1.0, -2.0}), std::invalid_argument);
    CHECK_THROWS_AS(DirichletParams({1.0, std::numeric_limits<double>::infinity()}), std::invalid_argument);
    CHECK_THROWS_AS(DirichletParams({1.0}), std::invalid_argument);
    CHECK(DirichletParams::uniform(4).alpha0() == 4.0);

    CHECK_NOTHROW(ObjectiveValues({0.0, 0.5, 1.0}));
    CHECK_THROWS_AS(ObjectiveValues({0.0, 1.5}), std::invalid_argument);
    CHECK_THROWS_AS(ObjectiveValues({-0.1, 0.5}), std::invalid_argument);
}

TEST_CASE("length mismatch is reported") {
    CHECK_THROWS_AS(require_same_length(3, 2), LengthMismatch);
    CHECK_NOTHROW(require_same_length(3, 3));
}
