#pragma once

#include <cstdint>
#include <vector>

#include "gert/estimator.hpp"
#include "gert/planner.hpp"
#include "gert/types.hpp"

namespace gert {

struct SimSeed {
    std::uint64_t master = 1;
};

// Stream index reserved for the population probe so it never collides with a
// data round.
inline constexpr std::uint64_t PROBE_ROUND = 0xFFFFFFFFull;

struct ProbeConfig {
    int probe_slots = 32;
    // Scales the probe output. Raising it makes t_m a true upper bound more
    // often, but every round count downstream is sized at t_m, so systematic
    // overshoot directly erodes achieved accuracy at the real population.
    // 1.3 keeps end-to-end reliability well above alpha on the test matrix
    // while still landing t_m at or above t in most probes.
    double safety_multiplier = 1.3;
    double fm_correction = 1.0 / 0.77351;  // Flajolet-Martin bias constant

    void validate() const {
        if (probe_slots < 8) throw DomainError("probe_slots must be >= 8");
        if (!(safety_multiplier >= 1.0)) throw DomainError("safety_multiplier must be >= 1");
        if (!(fm_correction > 0.0)) throw DomainError("fm_correction must be > 0");
    }
};

// One protocol-faithful frame: each of the t tags independently replies with
// probability ch.p and, if it replies, occupies exactly one uniform slot.
FrameObservation simulate_frame(std::int64_t t, const ChannelParams& ch, const SimSeed& seed,
                                std::uint64_t trial, std::uint64_t round);

// Rounds 0..n-1 for one trial.
std::vector<FrameObservation> run_rounds(std::int64_t t, const ChannelParams& ch, int n,
                                         const SimSeed& seed, std::uint64_t trial);
std::vector<FrameObservation> run_rounds(std::int64_t t, const FramePlan& plan,
                                         const SimSeed& seed, std::uint64_t trial);

// z statistics of rounds 0..count-1. The parallel version splits rounds
// across OpenMP threads; per-round streams make the output independent of the
// schedule. The serial twin is the reference the tests compare against.
std::vector<double> collect_z(std::int64_t t, const ChannelParams& ch, int count,
                              const SimSeed& seed, std::uint64_t trial);
std::vector<double> collect_z_serial(std::int64_t t, const ChannelParams& ch, int count,
                                     const SimSeed& seed, std::uint64_t trial);

// Slot index for one probe reply given 64 uniform bits: slot j is chosen with
// probability 2^-j, residual mass landing in the last slot.
int probe_slot_from_bits(std::uint64_t bits, int probe_slots);

// Flajolet-Martin style population probe. All t tags reply once into a
// geometric slot pattern; R is the first empty slot index and
//   t_m = ceil(fm_correction * 2^(R-1) * safety_multiplier), at least 1.
std::int64_t fm_probe(std::int64_t t, const ProbeConfig& cfg, const SimSeed& seed,
                      std::uint64_t trial = 0);

}  // namespace gert
