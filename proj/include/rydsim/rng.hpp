#pragma once

#include <cstdint>
#include <random>

namespace rydsim {

// Hash-based stream derivation: the RNG state of realization k is a pure
// function of (master_seed, k), so results do not depend on worker scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) ^ splitmix64(stream * 0x9e3779b97f4a7c15ull + 1));
}

// mt19937_64 plus hand-rolled samplers. The standard distributions are
// implementation-defined; these are spelled out so identical seeds give
// bit-identical draws on any platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // uniform in [0, 1) with 53 random bits
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Poisson by sequential inversion; fine for means up to a few hundred.
    long poisson(double mean) {
        const double u = uniform();
        double p = std::exp(-mean);
        double cum = p;
        long k = 0;
        while (u > cum && k < 100000) {
            ++k;
            p *= mean / static_cast<double>(k);
            cum += p;
        }
        return k;
    }

    std::uint64_t raw() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace rydsim
