#pragma once

namespace gert {

// Inverse upper-tail of the standard normal: returns z such that
// P[N(0,1) > z] = tail, for tail in (0, 0.5). Implemented with the AS241
// rational approximation (absolute error well below 1e-9).
double inverse_q(double tail);

}  // namespace gert
