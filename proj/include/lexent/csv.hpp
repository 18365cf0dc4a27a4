#pragma once

#include <cstdio>
#include <string>

namespace lexent {

// Fixed numeric formatting so identical runs produce byte-identical files.
inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string fmt_u64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace lexent
