#include "gert/csv.hpp"

#include <cmath>
#include <cstdio>

namespace gert {

std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    std::string s(buf);
    for (char& c : s)
        if (c == ',') c = '.';  // guard against a comma decimal point from the locale
    return s;
}

std::string fmt_int(std::int64_t v) { return std::to_string(v); }

}  // namespace gert
