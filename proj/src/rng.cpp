#include "wsbayes/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "wsbayes/special.hpp"

namespace wsbayes {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

RngSeed RngSeed::substream(std::initializer_list<std::uint64_t> keys) const {
    std::uint64_t h = stream_id ^ 0x6A09E667F3BCC909ULL;
    std::uint64_t out = splitmix64(h);
    for (auto k : keys) {
        h = out ^ (k + 0x9E3779B97F4A7C15ULL);
        out = splitmix64(h);
    }
    return RngSeed{seed, out};
}

namespace {
constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

Rng::Rng(RngSeed seed) {
    std::uint64_t state = seed.seed;
    const std::uint64_t mixed_stream = splitmix64(state) ^ seed.stream_id;
    state = mixed_stream;
    for (auto& word : s_) word = splitmix64(state);
}

Rng::result_type Rng::operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double Rng::uniform_open() {
    return (static_cast<double>((*this)() >> 12) + 0.5) * 0x1.0p-52;
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("below(0)");
    // Lemire-style rejection keeps the result unbiased.
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t r = (*this)();
        if (r >= threshold) return r % n;
    }
}

double Rng::normal() {
    // Marsaglia polar method; the second variate is discarded to keep the
    // engine state a pure function of the number of calls.
    for (;;) {
        const double u = 2.0 * uniform() - 1.0;
        const double v = 2.0 * uniform() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

double Rng::gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be positive");
    if (shape < 1.0) {
        // Gamma(a) = Gamma(a + 1) * U^(1/a)
        const double g = gamma(shape + 1.0);
        return g * std::exp(std::log(uniform_open()) / shape);
    }
    // Marsaglia & Tsang (2000).
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::int64_t Rng::binomial(std::int64_t trials, double p) {
    if (trials < 0) throw std::invalid_argument("binomial trials must be non-negative");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial p outside [0,1]");
    if (trials == 0 || p == 0.0) return 0;
    if (p == 1.0) return trials;

    // Inversion over outcomes ordered outward from the mode: mode, mode+1,
    // mode-1, mode+2, ...  Expected cost is O(sqrt(n p (1-p))).
    const double n = static_cast<double>(trials);
    const double q = 1.0 - p;
    const auto mode = std::min<std::int64_t>(trials, static_cast<std::int64_t>(std::floor((n + 1.0) * p)));
    const double m = static_cast<double>(mode);
    const double log_pmf_mode = special::log_factorial(trials) - special::log_factorial(mode) -
                                special::log_factorial(trials - mode) + m * std::log(p) +
                                (n - m) * std::log(q);
    const double pmf_mode = std::exp(log_pmf_mode);
    const double odds = p / q;

    const double u = uniform();
    double cumulative = pmf_mode;
    if (u < cumulative) return mode;

    std::int64_t up = mode;
    std::int64_t down = mode;
    double pmf_up = pmf_mode;
    double pmf_down = pmf_mode;
    for (;;) {
        const bool can_up = up < trials;
        const bool can_down = down > 0;
        if (!can_up && !can_down) return mode;  // rounding left u past the total mass
        if (can_up) {
            pmf_up *= static_cast<double>(trials - up) / static_cast<double>(up + 1) * odds;
            ++up;
            cumulative += pmf_up;
            if (u < cumulative) return up;
        }
        if (can_down) {
            pmf_down *= static_cast<double>(down) / static_cast<double>(trials - down + 1) / odds;
            --down;
            cumulative += pmf_down;
            if (u < cumulative) return down;
        }
    }
}

}  // namespace wsbayes
