#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace lowrank {

// splitmix64 finalizer (Stafford's mix13). Used both as a bit mixer for
// seed derivation and to expand a single seed into engine state.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

// Combines one value into a running seed: hash_combine with a splitmix64
// finish. This is the fixed mixing function referenced in the README;
// stream identities (scenario index, experiment cell, ...) are derived
// with it so that parallel runs are independent of scheduling.
inline std::uint64_t mix_seed(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    return splitmix64(h);
}

inline std::uint64_t mix_seed(std::uint64_t h, std::initializer_list<std::uint64_t> vs) {
    for (std::uint64_t v : vs) h = mix_seed(h, v);
    return h;
}

// Deterministic random stream. mt19937_64 has a standard-specified output
// sequence and the transforms below avoid std::*_distribution, whose
// results vary between standard library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; pairs are cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] so the log is finite.
        double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // Centered unit-scale exponential: Exp(1) - 1.
    double exponential_centered() {
        double u = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
        return -std::log(u) - 1.0;
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace lowrank
