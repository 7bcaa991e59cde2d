#pragma once

#include <cstdint>

namespace fusedstrip {

// Counter-based random stream keyed by (seed, chain, step, draw). Stateless
// by construction: the same key always yields the same variate, so chains
// are reproducible and independent across parallel runs.
class RngStream {
  public:
    RngStream(uint64_t seed, uint64_t chain = 0) : seed_(seed), chain_(chain) {}

    uint64_t bits(uint64_t step, uint64_t draw) const {
        uint64_t h = mix(seed_ ^ 0x9E3779B97F4A7C15ull);
        h = mix(h ^ mix(chain_ + 0xD1B54A32D192ED03ull));
        h = mix(h ^ mix(step + 0x8CB92BA72F3D8DD7ull));
        h = mix(h ^ mix(draw + 0x2545F4914F6CDD1Dull));
        return h;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform(uint64_t step, uint64_t draw) const {
        return static_cast<double>(bits(step, draw) >> 11) * 0x1.0p-53;
    }

    uint64_t seed() const { return seed_; }
    uint64_t chain() const { return chain_; }

  private:
    static uint64_t mix(uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    uint64_t seed_;
    uint64_t chain_;
};

}  // namespace fusedstrip
