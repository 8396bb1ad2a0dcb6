#pragma once

#include <charconv>
#include <string>

#include "weaver/numeric.hpp"

namespace weaver {

/// Locale-independent float formatting, 17 significant digits (round-trip).
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::string format_int(const Int& v) { return v.str(); }

/// "num/den" display form.
inline std::string format_rational(const Rational& q) {
    return numerator(q).str() + "/" + denominator(q).str();
}

} // namespace weaver
