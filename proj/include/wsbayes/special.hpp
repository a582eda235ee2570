#ifndef WSBAYES_SPECIAL_HPP
#define WSBAYES_SPECIAL_HPP

namespace wsbayes::special {

/// log Gamma(x) for x > 0. Upward recurrence to x >= 10, then the Stirling series.
double log_gamma(double x);

/// Digamma psi(x) for x > 0, same recurrence/asymptotic scheme as log_gamma.
double digamma(double x);

/// log(n!) for integer n >= 0.
double log_factorial(long long n);

}  // namespace wsbayes::special

#endif  // WSBAYES_SPECIAL_HPP
