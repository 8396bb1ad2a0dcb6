#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "weaver/distribution.hpp"
#include "weaver/numeric.hpp"

namespace weaver {

/// E Y_n, computed by literally summing p_k * y_k over all 2^n indices (the
/// identity "mean equals p" is a result to verify, not an assumption). Full
/// sweep, so the per-mode vector caps apply.
template <ProbScalar T>
T mean(int n, const T& p) {
    detail::check_vector_n<T>(n);
    detail::check_probability(p);
    auto [pp, qq] = detail::power_tables(p, n);
    const std::uint64_t size = std::uint64_t(1) << n;
    if constexpr (std::same_as<T, Rational>) {
        Rational weighted = 0; // sum of p_k * k; divide by 2^n - 1 once at the end
        for (std::uint64_t k = 0; k < size; ++k) {
            const int ones = std::popcount(k);
            weighted += pp[ones] * qq[n - ones] * Rational(Int(k));
        }
        return weighted / Rational(pow2(static_cast<unsigned>(n)) - 1);
    } else {
        KahanSum weighted;
        for (std::uint64_t k = 0; k < size; ++k) {
            const int ones = std::popcount(k);
            weighted.add(pp[ones] * qq[n - ones] * static_cast<double>(k));
        }
        return weighted.value() / static_cast<double>((std::uint64_t(1) << n) - 1);
    }
}

/// The n terms t_j = C(n-1, j) p^{n-j} (1-p)^j, j = 0..n-1, grouping the mean
/// by the number of zeros in the choice vector. They sum to p; t_0 = p^n.
template <ProbScalar T>
std::vector<T> mean_decomposition(int n, const T& p) {
    detail::check_point_n(n);
    detail::check_probability(p);
    auto [pp, qq] = detail::power_tables(p, n);
    std::vector<T> terms;
    terms.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        terms.push_back(from_rational<T>(Rational(binomial(static_cast<unsigned>(n - 1),
                                                           static_cast<unsigned>(j)))) *
                        pp[n - j] * qq[j]);
    return terms;
}

/// Var(Y_n) / (p(1-p)) = (sum of 4^i, i < n) / (2^n - 1)^2
///                     = (4^n - 1) / (3 (2^n - 1)^2).
/// Strictly decreasing in n with limit 1/3.
inline Rational variance_ratio(int n) {
    if (n < 1) throw std::domain_error("variance ratio: n must be >= 1, got " + std::to_string(n));
    const Int full = pow2(static_cast<unsigned>(n)) - 1;
    return make_ratio(pow2(static_cast<unsigned>(2 * n)) - 1, 3 * full * full);
}

/// Var(Y_n), one independent additive term per selection bit.
template <ProbScalar T>
T variance(int n, const T& p) {
    detail::check_point_n(n);
    detail::check_probability(p);
    return from_rational<T>(variance_ratio(n)) * p * (T(1) - p);
}

/// Contribution of bit i (i = 0..n-1): (2^i / (2^n - 1))^2 p (1-p).
template <ProbScalar T>
T variance_per_bit(int n, const T& p, int i) {
    detail::check_point_n(n);
    detail::check_probability(p);
    if (i < 0 || i >= n)
        throw std::domain_error("variance bit index must be in [0, n), got " + std::to_string(i));
    const Int full = pow2(static_cast<unsigned>(n)) - 1;
    return from_rational<T>(make_ratio(pow2(static_cast<unsigned>(2 * i)), full * full)) * p *
           (T(1) - p);
}

} // namespace weaver
