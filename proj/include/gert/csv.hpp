#pragma once

#include <cstdint>
#include <string>

namespace gert {

// All emitted floating-point fields use 10 significant digits with '.' as the
// decimal point, independent of locale. NaN renders as "nan".
std::string fmt_double(double v);
std::string fmt_int(std::int64_t v);

}  // namespace gert
