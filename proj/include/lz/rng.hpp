#ifndef LZ_RNG_HPP
#define LZ_RNG_HPP

#include <cmath>
#include <cstdint>

namespace lz {

/// SplitMix64 generator. Small, fast, and counter-splittable: every
/// (base seed, stream index) pair yields an independent stream, so
/// Monte Carlo results cannot depend on how work is scheduled across
/// threads.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    /// Independent per-task seed derived from a master seed and a task
    /// index. Pure function of its arguments.
    static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
        SplitMix64 g(base + 0x9E3779B97F4A7C15ULL * (index + 1));
        g.next();
        return g.next();
    }

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Standard normal via Box-Muller. Stateless across calls (the
    /// second Box-Muller value is discarded) so sequences depend only
    /// on the seed and the number of draws.
    double normal() {
        double u1 = uniform01();
        if (u1 < 1e-300) u1 = 1e-300;
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double stddev) {
        return mean + stddev * normal();
    }

private:
    std::uint64_t state_;
};

}  // namespace lz

#endif  // LZ_RNG_HPP
