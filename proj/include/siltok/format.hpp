#ifndef SILTOK_FORMAT_HPP
#define SILTOK_FORMAT_HPP

#include <cstdio>
#include <string>

namespace siltok {

/// Fixed 17-significant-digit rendering: enough to round-trip any binary64
/// value, and stable across runs so serialized files compare byte-equal.
inline std::string format_real17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace siltok

#endif // SILTOK_FORMAT_HPP
