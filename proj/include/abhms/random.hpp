#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace abhms {

/// Reproducible random source: std::mt19937_64 (bit-exact across standard libraries)
/// with explicit 53-bit uniform and Box-Muller normal maps. The std distributions
/// are implementation-defined, so they are avoided on purpose.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0,1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi].
    int uniform_int(int lo, int hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(engine_() % span);
    }

    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    /// Derived stream for an independent sub-task, so results do not depend on scheduling.
    Rng split(std::uint64_t stream) const {
        std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        Rng r(seed_ ^ (stream * 0x9E3779B97F4A7C15ull));
        r.engine_.seed(seq);
        return r;
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

} // namespace abhms
