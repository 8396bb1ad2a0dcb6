#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace weaver {

/// Largest n accepted by point evaluations (single pmf values, CDF at a
/// point, closed-form moments): indices must fit one 64-bit word.
inline constexpr int kMaxPointN = 62;

/// n-bit record of the selection process. Bit i-1 stores the outcome of the
/// i-th selection (1 = H1 chosen), least-significant bit first. With that
/// convention the packed value k equals the conditional sum E(S_n | b),
/// because selection i rules a sub-sample of 2^{i-1} observations.
struct ChoiceVector {
    int n;
    std::uint64_t k;

    ChoiceVector(int n_, std::uint64_t k_) : n(n_), k(k_) {
        if (n < 1 || n > kMaxPointN)
            throw std::domain_error("ChoiceVector: n must be in [1, " +
                                    std::to_string(kMaxPointN) + "], got " + std::to_string(n));
        if (k >> n)
            throw std::domain_error("ChoiceVector: k must be in [0, 2^n - 1] with n = " +
                                    std::to_string(n) + ", got " + std::to_string(k));
    }

    /// Outcome of the i-th selection, i = 1..n.
    bool selection(int i) const { return (k >> (i - 1)) & 1u; }

    int ones() const { return std::popcount(k); }
    int zeros() const { return n - ones(); }

    /// Digits b_{n-1} ... b_0, most significant first.
    std::string bit_string() const {
        std::string s(static_cast<std::size_t>(n), '0');
        for (int i = 0; i < n; ++i)
            if ((k >> i) & 1u) s[static_cast<std::size_t>(n - 1 - i)] = '1';
        return s;
    }

    friend bool operator==(const ChoiceVector&, const ChoiceVector&) = default;
};

} // namespace weaver
