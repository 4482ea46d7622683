#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace crowddiff {

// Deterministic RNG for reproducible runs. mt19937_64 is fully specified by the
// standard, but the std distributions are not, so uniform and gaussian draws are
// done by hand; a given (seed, draw sequence) yields identical streams on every
// platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1): 53 random mantissa bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // Box-Muller; consumes exactly two uniforms per call so the stream layout
    // does not depend on call history.
    double gaussian(double mean, double stddev) {
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        const double u2 = uniform();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * mag * std::cos(2.0 * M_PI * u2);
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace crowddiff
