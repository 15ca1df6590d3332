#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace mel {

/// splitmix64 finaliser.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Fixed splitting rule (master seed, replication index) -> child seed.
/// Every replication of a seeded experiment is independently recomputable.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master + 0x9E3779B97F4A7C15ULL * (index + 1));
}

/// Seeded PRNG with a splitmix64 core. No standard-library distributions are
/// used anywhere, so the same seed yields the same stream on every platform
/// and reruns stay byte-identical.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    /// Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Standard normal via Box-Muller. Both uniforms are consumed on every
    /// call, so the stream position does not depend on cached spare values.
    double gaussian() {
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Exponential with rate 1 via inversion.
    double exponential() { return -std::log1p(-uniform01()); }

    /// Uniform index in {0, ..., n-1}.
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

private:
    std::uint64_t state_;
};

}  // namespace mel
