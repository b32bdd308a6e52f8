#pragma once

#include <cstdio>
#include <string>

namespace eqstab {

// Deterministic shortest-faithful decimal rendering used by every emitter.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace eqstab
