#pragma once

#include <cstdint>

namespace gert {

// Deterministic splittable generator. Every simulated frame draws from its own
// stream keyed by (master_seed, trial, round), so results do not depend on
// scheduling or evaluation order. The derivation below is the normative
// algorithm; any implementation following it reproduces identical bits.
//
//   mix(z): z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//           z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//           return z ^ (z >> 31)
//
//   state0  = mix(mix(master ^ C1*(trial+1)) ^ C2*(round+1))
//   next()  : state0 += C1; return mix(state0)
//
// with C1 = 0x9E3779B97F4A7C15 and C2 = 0xD1B54A32D192ED03.
struct Rng {
    static constexpr std::uint64_t C1 = 0x9E3779B97F4A7C15ull;
    static constexpr std::uint64_t C2 = 0xD1B54A32D192ED03ull;

    std::uint64_t state = 0;

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    static constexpr Rng stream(std::uint64_t master, std::uint64_t trial, std::uint64_t round) {
        return Rng{mix(mix(master ^ (C1 * (trial + 1))) ^ (C2 * (round + 1)))};
    }

    std::uint64_t next_u64() {
        state += C1;
        return mix(state);
    }

    // uniform in [0, 1), 53 random bits
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [0, n); modulo bias is ~n/2^64, immaterial for frame sizes here
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    bool next_bernoulli(double p) { return next_unit() < p; }
};

}  // namespace gert
