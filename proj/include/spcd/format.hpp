#pragma once

#include <cstdio>
#include <string>

namespace spcd {

// Shortest round-trippable decimal form used by every text emitter.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

}  // namespace spcd
