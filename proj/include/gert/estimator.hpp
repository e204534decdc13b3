#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gert/types.hpp"

namespace gert {

// Probability that a given slot stays empty (p0) or is busy (pn) in one frame
// of f slots when t tags each reply with persistence p in one uniform slot.
struct SlotProbs {
    double p0 = 1.0;
    double pn = 0.0;
};

SlotProbs slot_probs(double t, const ChannelParams& ch);

// Expected per-frame statistic z = (busy - empty)/f as a function of the
// population:  g(t) = 1 - 2*(1 - p/f)^t.  Strictly increasing, g(0) = -1,
// approaching 1 as t grows. t is real-valued; accuracy planning evaluates it
// at fractional populations.
double g(double t, const ChannelParams& ch);

// Inverse of g. z_bar = -1 maps to 0; z_bar = 1 throws SaturatedError.
double g_inverse(double z_bar, const ChannelParams& ch);

// Var[z] for one frame under the per-slot independence model:
// (1/f) * (1 - (pn - p0)^2).
double variance_z(double t, const ChannelParams& ch);

// One observed frame: slot bitmap plus its decoded counts.
struct FrameObservation {
    std::vector<std::uint8_t> bits;  // one entry per slot, 1 = busy
    std::int64_t n_zero = 0;
    std::int64_t n_nonempty = 0;
    double z = 0.0;
};

// Validates the counts against the bitmap and returns (n_nonempty - n_zero)/f.
double z_statistic(const FrameObservation& obs);

struct EstimateResult {
    double z_bar = 0.0;
    std::optional<double> t_hat;  // absent when saturated
    int rounds_used = 0;
    bool saturated = false;
};

// Combines rounds sharing one channel into a population estimate. z_bar is
// computed from integer slot totals, so saturation (z_bar = 1) is detected
// exactly.
EstimateResult estimate(const std::vector<FrameObservation>& observations,
                        const ChannelParams& ch);

}  // namespace gert
