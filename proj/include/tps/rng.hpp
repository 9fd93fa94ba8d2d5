#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tps {

/// Deterministic random stream. std::mt19937_64 is fully specified by the
/// standard; the distribution helpers below avoid std::*_distribution, whose
/// algorithms are implementation-defined, so identical seeds give identical
/// streams on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Integer in [0, n).
    std::uint64_t index(std::uint64_t n) { return engine_() % n; }

    /// Standard normal via Box-Muller (no cached spare, for reproducibility).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    /// Random sign.
    double sign() { return (engine_() & 1u) ? 1.0 : -1.0; }

private:
    std::mt19937_64 engine_;
};

}  // namespace tps
