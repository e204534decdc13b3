#include "gert/estimator.hpp"

#include <cmath>

namespace gert {

namespace {

// (1 - u)^x evaluated as exp(x * log1p(-u)) for accuracy at small u.
double pow_one_minus(double u, double x) {
    if (u >= 1.0) return x == 0.0 ? 1.0 : 0.0;
    return std::exp(x * std::log1p(-u));
}

}  // namespace

SlotProbs slot_probs(double t, const ChannelParams& ch) {
    ch.validate();
    if (!(t >= 0.0)) throw DomainError("population t must be >= 0");
    const double p0 = pow_one_minus(ch.p / static_cast<double>(ch.f), t);
    return {p0, 1.0 - p0};
}

double g(double t, const ChannelParams& ch) {
    return 1.0 - 2.0 * slot_probs(t, ch).p0;
}

double g_inverse(double z_bar, const ChannelParams& ch) {
    ch.validate();
    if (!(z_bar >= -1.0 && z_bar <= 1.0)) throw DomainError("z_bar must be in [-1, 1]");
    if (z_bar == 1.0) throw SaturatedError("z_bar = 1: population exceeds what the frame resolves");
    const double u = ch.p / static_cast<double>(ch.f);
    if (u >= 1.0) return 0.0;  // degenerate single-slot channel, g is a step
    const double t = std::log((1.0 - z_bar) / 2.0) / std::log1p(-u);
    return t > 0.0 ? t : 0.0;
}

double variance_z(double t, const ChannelParams& ch) {
    const SlotProbs sp = slot_probs(t, ch);
    const double mu = sp.pn - sp.p0;
    return (1.0 - mu * mu) / static_cast<double>(ch.f);
}

double z_statistic(const FrameObservation& obs) {
    const auto f = static_cast<std::int64_t>(obs.bits.size());
    if (f == 0) throw EmptyInput("observation has no slots");
    std::int64_t busy = 0;
    for (auto b : obs.bits) busy += b ? 1 : 0;
    if (obs.n_nonempty != busy || obs.n_zero != f - busy)
        throw InconsistentObservation("slot counts disagree with bitmap");
    return static_cast<double>(obs.n_nonempty - obs.n_zero) / static_cast<double>(f);
}

EstimateResult estimate(const std::vector<FrameObservation>& observations,
                        const ChannelParams& ch) {
    ch.validate();
    if (observations.empty()) throw EmptyInput("no observations");

    std::int64_t total_zero = 0;
    std::int64_t total_busy = 0;
    for (const auto& obs : observations) {
        if (static_cast<std::int64_t>(obs.bits.size()) != ch.f)
            throw MixedFrameSizes("observations must all share the channel frame size");
        z_statistic(obs);  // validates internal consistency
        total_zero += obs.n_zero;
        total_busy += obs.n_nonempty;
    }

    const auto rounds = static_cast<int>(observations.size());
    EstimateResult res;
    res.rounds_used = rounds;
    // integer totals keep the mean exact, so saturation is total_zero == 0
    res.z_bar = static_cast<double>(total_busy - total_zero) /
                (static_cast<double>(rounds) * static_cast<double>(ch.f));
    if (total_zero == 0) {
        res.saturated = true;
        res.z_bar = 1.0;
        return res;
    }
    res.t_hat = g_inverse(res.z_bar, ch);
    return res;
}

}  // namespace gert
