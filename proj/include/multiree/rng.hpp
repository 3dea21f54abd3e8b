#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace multiree {

// Deterministic random stream. mt19937_64 has a fully specified algorithm,
// and the value derivations below avoid the implementation-defined standard
// distributions, so identical seeds give identical streams on any platform.
class RandomStream {
  public:
    explicit RandomStream(uint64_t seed) : gen_(seed) {}

    uint64_t bits() { return gen_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    uint64_t below(uint64_t n) {  // uniform integer in [0, n)
        // Rejection-free modulo is biased for huge n; our n are tiny.
        return gen_() % n;
    }

    // Standard normal via Box-Muller (deterministic, no cached spare).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    // Derives an independent child stream; used to decouple parallel work items.
    RandomStream child(uint64_t tag) {
        return RandomStream(gen_() ^ (0x9e3779b97f4a7c15ULL * (tag + 1)));
    }

  private:
    std::mt19937_64 gen_;
};

// splitmix64 step; used to derive independent sub-seeds.
inline uint64_t mix_seed(uint64_t seed, uint64_t tag) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace multiree
