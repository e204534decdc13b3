#pragma once

#include <stdexcept>

namespace gert {

// Parameter outside its documented domain (bad alpha, negative t, ...).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Every slot of every observed round was busy: z_bar = 1 has no finite
// preimage under the response curve, so no point estimate exists.
struct SaturatedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No frame size satisfies the accuracy constraints for the given inputs.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct MixedFrameSizes : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A frame observation whose stored counts disagree with its slot bitmap.
struct InconsistentObservation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace gert
