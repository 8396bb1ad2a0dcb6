#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "weaver/errors.hpp"
#include "weaver/numeric.hpp"

namespace weaver {

/// One row of the geometric triangle, taken as exponents of the fold factor:
/// entry k of row n is popcount(k), so the masses are p_0 * f^exponents[k].
struct TriangleRow {
    int n;
    std::vector<unsigned> exponents;
    std::uint64_t row_sum; // s_n
};

/// Closed form s_n = n * 2^{n-1}; the rows themselves satisfy
/// s_{n+1} = 2 s_n + 2^n.
inline Int triangle_row_sum(int n) {
    if (n < 0) throw std::domain_error("triangle row sum: n must be >= 0");
    return n == 0 ? Int(0) : Int(n) << (n - 1);
}

inline TriangleRow triangle_row(int n) {
    if (n < 0) throw std::domain_error("triangle row: n must be >= 0, got " + std::to_string(n));
    if (n > kMaxExactVectorN)
        throw resource_error("triangle row has 2^n entries; cap is n <= " +
                             std::to_string(kMaxExactVectorN) + ", got n = " + std::to_string(n));
    const std::uint64_t size = std::uint64_t(1) << n;
    TriangleRow row{n, std::vector<unsigned>(size), 0};
    for (std::uint64_t k = 0; k < size; ++k) {
        const auto e = static_cast<unsigned>(std::popcount(k));
        row.exponents[k] = e;
        row.row_sum += e;
    }
    return row;
}

} // namespace weaver
