#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "weaver/choice_vector.hpp"
#include "weaver/errors.hpp"
#include "weaver/numeric.hpp"

namespace weaver {
namespace oracle {

/// Brute-force ground truth, exact mode only. Nothing here reuses the closed
/// forms it is meant to arbitrate: probabilities come from bit-by-bit
/// products, conditional sums from the sub-sample sizes.

inline constexpr int kMaxEnumerationN = 20;

struct EnumerationRow {
    ChoiceVector bits;
    std::uint64_t conditional_sum; // E(S_n | b), accumulated over sub-samples
    Rational support;              // conditional_sum / (2^n - 1)
    Rational prob;
};

namespace detail {
inline void check_args(int n, const Rational& p) {
    if (n < 1) throw std::domain_error("enumeration: n must be >= 1, got " + std::to_string(n));
    if (n > kMaxEnumerationN)
        throw resource_error("enumeration has 2^n rows; cap is n <= " +
                             std::to_string(kMaxEnumerationN) + ", got n = " + std::to_string(n));
    if (p < 0 || p > 1) throw std::domain_error("enumeration: p must be in [0, 1]");
}
} // namespace detail

/// Streams the 2^n rows in k order without materializing them.
template <class Visitor>
void for_each_enumeration_row(int n, const Rational& p, Visitor&& visit) {
    detail::check_args(n, p);
    const Rational q = Rational(1) - p;
    const Int den = pow2(static_cast<unsigned>(n)) - 1;
    const std::uint64_t size = std::uint64_t(1) << n;
    for (std::uint64_t k = 0; k < size; ++k) {
        const ChoiceVector bits(n, k);
        std::uint64_t conditional_sum = 0;
        Rational prob = 1;
        for (int i = 1; i <= n; ++i) {
            if (bits.selection(i)) {
                conditional_sum += std::uint64_t(1) << (i - 1); // sub-sample i has 2^{i-1} draws
                prob *= p;
            } else {
                prob *= q;
            }
        }
        visit(EnumerationRow{bits, conditional_sum, make_ratio(Int(conditional_sum), den),
                             std::move(prob)});
    }
}

inline std::vector<EnumerationRow> enumerate(int n, const Rational& p) {
    std::vector<EnumerationRow> rows;
    rows.reserve(std::size_t(1) << n);
    for_each_enumeration_row(n, p, [&](EnumerationRow row) { rows.push_back(std::move(row)); });
    return rows;
}

/// E Y_n^j by exhaustive summation.
inline Rational moment_oracle(int n, const Rational& p, int j) {
    if (j < 1) throw std::domain_error("moment order must be >= 1, got " + std::to_string(j));
    Rational total = 0;
    for_each_enumeration_row(n, p, [&](const EnumerationRow& row) {
        total += row.prob * pow_uint(row.support, static_cast<unsigned>(j));
    });
    return total;
}

struct SplitIdentity {
    Int weaving_sum; // sum of 4^i, i = 0..n-1
    Int mixing_sum;  // sum of 2^j (2^n - 1 - 2^j), j = 0..n-1
    bool holds;      // weaving_sum + mixing_sum == (2^n - 1)^2
};

/// Integer identity behind the variance split; literal summation.
inline SplitIdentity variance_split_identity(int n) {
    if (n < 1)
        throw std::domain_error("split identity: n must be >= 1, got " + std::to_string(n));
    const Int full = pow2(static_cast<unsigned>(n)) - 1;
    Int weaving = 0;
    Int mixing = 0;
    for (int i = 0; i < n; ++i) weaving += Int(1) << (2 * i);
    for (int j = 0; j < n; ++j) mixing += (Int(1) << j) * (full - (Int(1) << j));
    return {weaving, mixing, weaving + mixing == full * full};
}

} // namespace oracle
} // namespace weaver
