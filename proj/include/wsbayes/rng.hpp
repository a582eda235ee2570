/**
 * @file rng.hpp
 * @brief Reproducible random streams.
 *
 * A stream is fully determined by (seed, stream_id). Streams are derived by
 * hashing the pair through SplitMix64 and seeding a xoshiro256** engine, so
 * any number of replications can draw in parallel without sharing state.
 * Samplers are implemented here rather than taken from <random> because the
 * standard distributions are not bit-identical across library vendors.
 */

#ifndef WSBAYES_RNG_HPP
#define WSBAYES_RNG_HPP

#include <array>
#include <cstdint>
#include <initializer_list>

namespace wsbayes {

struct RngSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    /// Child seed for a sub-task keyed by @p keys; same keys give the same child.
    RngSeed substream(std::initializer_list<std::uint64_t> keys) const;

    friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

std::uint64_t splitmix64(std::uint64_t& state);

class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(RngSeed seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()();

    /// Uniform on [0,1) with 53 random bits.
    double uniform();
    /// Uniform on (0,1).
    double uniform_open();
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    double normal();
    /// Gamma(shape, 1).
    double gamma(double shape);
    /// Binomial(trials, p).
    std::int64_t binomial(std::int64_t trials, double p);

private:
    std::array<std::uint64_t, 4> s_{};
};

}  // namespace wsbayes

#endif  // WSBAYES_RNG_HPP
