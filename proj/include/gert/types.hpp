#pragma once

#include <cstdint>

#include "gert/errors.hpp"

namespace gert {

// Target accuracy: the estimate should fall within a relative error band of
// half-width beta around the true population with probability at least alpha.
struct AccuracySpec {
    double alpha = 0.95;
    double beta = 0.05;

    void validate() const {
        if (!(alpha >= 0.0 && alpha < 1.0))
            throw DomainError("alpha must be in [0, 1)");
        if (!(beta > 0.0 && beta < 1.0))
            throw DomainError("beta must be in (0, 1)");
    }
};

// One reader frame: f slots, each tag replies in exactly one uniformly chosen
// slot with persistence probability p.
struct ChannelParams {
    std::int64_t f = 1;
    double p = 1.0;

    // p/f may equal 1 only in the degenerate single-slot, always-reply case.
    void validate() const {
        if (f < 1) throw DomainError("frame size f must be >= 1");
        if (!(p > 0.0 && p <= 1.0)) throw DomainError("persistence p must be in (0, 1]");
        if (!(p / static_cast<double>(f) <= 1.0)) throw DomainError("p/f must be <= 1");
    }
};

}  // namespace gert
