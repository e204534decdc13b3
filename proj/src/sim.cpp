#include "gert/sim.hpp"

#include <bit>
#include <cmath>
#include <cstddef>

#include "gert/rng.hpp"

namespace gert {

FrameObservation simulate_frame(std::int64_t t, const ChannelParams& ch, const SimSeed& seed,
                                std::uint64_t trial, std::uint64_t round) {
    if (t < 0) throw DomainError("population t must be >= 0");
    ch.validate();

    Rng rng = Rng::stream(seed.master, trial, round);
    FrameObservation obs;
    obs.bits.assign(static_cast<std::size_t>(ch.f), 0);
    for (std::int64_t i = 0; i < t; ++i) {
        if (!rng.next_bernoulli(ch.p)) continue;
        const auto slot = rng.next_below(static_cast<std::uint64_t>(ch.f));
        obs.bits[static_cast<std::size_t>(slot)] = 1;
    }
    for (auto b : obs.bits) obs.n_nonempty += b;
    obs.n_zero = ch.f - obs.n_nonempty;
    obs.z = static_cast<double>(obs.n_nonempty - obs.n_zero) / static_cast<double>(ch.f);
    return obs;
}

std::vector<FrameObservation> run_rounds(std::int64_t t, const ChannelParams& ch, int n,
                                         const SimSeed& seed, std::uint64_t trial) {
    if (n < 1) throw DomainError("round count must be >= 1");
    std::vector<FrameObservation> rounds;
    rounds.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        rounds.push_back(simulate_frame(t, ch, seed, trial, static_cast<std::uint64_t>(j)));
    return rounds;
}

std::vector<FrameObservation> run_rounds(std::int64_t t, const FramePlan& plan,
                                         const SimSeed& seed, std::uint64_t trial) {
    const ChannelParams ch{plan.f, plan.p};
    return run_rounds(t, ch, static_cast<int>(plan.n), seed, trial);
}

std::vector<double> collect_z_serial(std::int64_t t, const ChannelParams& ch, int count,
                                     const SimSeed& seed, std::uint64_t trial) {
    if (count < 0) throw DomainError("count must be >= 0");
    std::vector<double> zs(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j)
        zs[static_cast<std::size_t>(j)] =
            simulate_frame(t, ch, seed, trial, static_cast<std::uint64_t>(j)).z;
    return zs;
}

std::vector<double> collect_z(std::int64_t t, const ChannelParams& ch, int count,
                              const SimSeed& seed, std::uint64_t trial) {
    if (count < 0) throw DomainError("count must be >= 0");
    std::vector<double> zs(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(static)
    for (int j = 0; j < count; ++j)
        zs[static_cast<std::size_t>(j)] =
            simulate_frame(t, ch, seed, trial, static_cast<std::uint64_t>(j)).z;
    return zs;
}

int probe_slot_from_bits(std::uint64_t bits, int probe_slots) {
    // leading zeros of a uniform word are geometric: P[slot j] = 2^-j
    const int j = std::countl_zero(bits) + 1;
    return j > probe_slots ? probe_slots : j;
}

std::int64_t fm_probe(std::int64_t t, const ProbeConfig& cfg, const SimSeed& seed,
                      std::uint64_t trial) {
    if (t < 0) throw DomainError("population t must be >= 0");
    cfg.validate();

    Rng rng = Rng::stream(seed.master, trial, PROBE_ROUND);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(cfg.probe_slots), 0);
    for (std::int64_t i = 0; i < t; ++i) {
        const int slot = probe_slot_from_bits(rng.next_u64(), cfg.probe_slots);
        bits[static_cast<std::size_t>(slot - 1)] = 1;
    }
    int r = cfg.probe_slots + 1;
    for (int j = 0; j < cfg.probe_slots; ++j) {
        if (!bits[static_cast<std::size_t>(j)]) {
            r = j + 1;
            break;
        }
    }
    const double bound =
        std::ceil(cfg.fm_correction * std::ldexp(1.0, r - 1) * cfg.safety_multiplier);
    return bound < 1.0 ? 1 : static_cast<std::int64_t>(bound);
}

}  // namespace gert
