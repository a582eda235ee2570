#include "wsbayes/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace wsbayes::special {

namespace {

constexpr double kShiftTo = 10.0;

// Stirling series for log Gamma(x), x >= 10; truncation error below 1e-17.
double stirling_log_gamma(double x) {
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double series =
        inv * (1.0 / 12.0 +
               inv2 * (-1.0 / 360.0 +
                       inv2 * (1.0 / 1260.0 +
                               inv2 * (-1.0 / 1680.0 +
                                       inv2 * (1.0 / 1188.0 + inv2 * (-691.0 / 360360.0))))));
    return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

double asymptotic_digamma(double x) {
    const double inv2 = 1.0 / (x * x);
    const double series =
        inv2 * (1.0 / 12.0 -
                inv2 * (1.0 / 120.0 -
                        inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
    return std::log(x) - 0.5 / x - series;
}

}  // namespace

double log_gamma(double x) {
    if (!(x > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(x)) return x;
    if (x >= kShiftTo) return stirling_log_gamma(x);
    // Gamma(x) = Gamma(x + k) / (x (x+1) ... (x+k-1))
    double product = 1.0;
    while (x < kShiftTo) {
        product *= x;
        x += 1.0;
    }
    return stirling_log_gamma(x) - std::log(product);
}

double digamma(double x) {
    if (!(x > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    double shift = 0.0;
    while (x < kShiftTo) {
        shift += 1.0 / x;
        x += 1.0;
    }
    return asymptotic_digamma(x) - shift;
}

double log_factorial(long long n) {
    if (n < 0) return std::numeric_limits<double>::quiet_NaN();
    if (n < 2) return 0.0;
    return log_gamma(static_cast<double>(n) + 1.0);
}

}  // namespace wsbayes::special
