#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include "weaver/choice_vector.hpp"
#include "weaver/numeric.hpp"
#include "weaver/rng.hpp"

namespace weaver {

/// Limit distribution of Y_n (the binomial multiplicative cascade on [0,1]):
/// represented purely through CDF and interval-mass evaluators — it has no
/// density unless p = 1/2, so nothing here samples a density.

/// k / 2^level in [0, 1], canonical: k odd, or k = 0, or the value 1 stored
/// as 1/2^0.
struct DyadicRational {
    std::uint64_t num;
    int level;

    DyadicRational(std::uint64_t k, int m) : num(k), level(m) {
        if (m < 0 || m > kMaxPointN)
            throw std::domain_error("dyadic level must be in [0, " + std::to_string(kMaxPointN) +
                                    "], got " + std::to_string(m));
        if (num > (std::uint64_t(1) << level))
            throw std::domain_error("dyadic value " + std::to_string(k) + "/2^" +
                                    std::to_string(m) + " lies outside [0, 1]");
        if (num == 0) {
            level = 0;
        } else {
            while (level > 0 && (num & 1u) == 0) {
                num >>= 1;
                --level;
            }
        }
    }

    Rational value() const { return make_ratio(Int(num), pow2(static_cast<unsigned>(level))); }
    bool is_zero() const { return num == 0; }
    bool is_one() const { return num == 1 && level == 0; }

    /// Largest level-m dyadic <= x (x must lie in [0, 1]).
    static DyadicRational floor_of(const Rational& x, int m) {
        if (x < 0 || x > 1) throw std::domain_error("dyadic bracketing requires x in [0, 1]");
        const Int k = numerator(x) * pow2(static_cast<unsigned>(m)) / denominator(x);
        return DyadicRational(k.convert_to<std::uint64_t>(), m);
    }

    /// Smallest level-m dyadic >= x.
    static DyadicRational ceil_of(const Rational& x, int m) {
        if (x < 0 || x > 1) throw std::domain_error("dyadic bracketing requires x in [0, 1]");
        const Int scaled = numerator(x) * pow2(static_cast<unsigned>(m));
        Int k = scaled / denominator(x);
        if (k * denominator(x) != scaled) ++k;
        return DyadicRational(k.convert_to<std::uint64_t>(), m);
    }

    friend bool operator==(const DyadicRational&, const DyadicRational&) = default;
};

/// CDF of the limit distribution at a dyadic point, by the digit cascade:
/// for x = 0.d1 d2 ... dm in binary, every 1-digit contributes the prefix
/// weight times (1-p), where a 0-digit multiplies the prefix by 1-p and a
/// 1-digit by p. Agrees with cdf_eval(n, p, x) for every n >= m.
inline Rational hem_cdf(const Rational& p, const DyadicRational& x) {
    if (p < 0 || p > 1) throw std::domain_error("p must be in [0, 1]");
    if (x.is_zero()) return Rational(0);
    if (x.is_one()) return Rational(1);
    const Rational q = Rational(1) - p;
    Rational mass = 0;
    Rational prefix = 1;
    for (int i = x.level - 1; i >= 0; --i) {
        if ((x.num >> i) & 1u) {
            mass += prefix * q;
            prefix *= p;
        } else {
            prefix *= q;
        }
    }
    return mass;
}

/// Mass of the level-n dyadic interval [k/2^n, (k+1)/2^n]: the product of
/// one factor per digit of k (0 -> 1-p, 1 -> p). Equals the CDF increment
/// across the interval; a level's masses sum to 1.
inline Rational interval_mass(const Rational& p, int level, std::uint64_t k) {
    if (level < 0 || level > kMaxPointN)
        throw std::domain_error("interval level must be in [0, " + std::to_string(kMaxPointN) +
                                "], got " + std::to_string(level));
    if (level < 64 && (k >> level) != 0)
        throw std::domain_error("interval index must be in [0, 2^level - 1], got " +
                                std::to_string(k));
    if (p < 0 || p > 1) throw std::domain_error("p must be in [0, 1]");
    const Rational q = Rational(1) - p;
    Rational mass = 1;
    for (int i = level - 1; i >= 0; --i) mass *= ((k >> i) & 1u) ? p : q;
    return mass;
}

/// Mean p and variance p(1-p)/3 of the limit distribution, exact.
inline std::pair<Rational, Rational> hem_moments(const Rational& p) {
    if (p < 0 || p > 1) throw std::domain_error("p must be in [0, 1]");
    return {p, p * (Rational(1) - p) / 3};
}

/// log of f_n(j) = (2^n - 1) p^j (1-p)^{n-j}, the average density over one
/// support cell. For p = 1/2 this is log(1 - 2^-n) for every j; otherwise the
/// extreme cells diverge to +inf / decay to 0 as n grows, which is the
/// finite-n shadow of the missing limit density.
inline double density_diagnostic(int n, double p, int j) {
    if (n < 1) throw std::domain_error("density diagnostic: n must be >= 1");
    if (j < 0 || j > n)
        throw std::domain_error("density diagnostic: j must be in [0, n], got " +
                                std::to_string(j));
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("density diagnostic requires 0 < p < 1");
    const double log_cells = n * std::log(2.0) + std::log1p(-std::ldexp(1.0, -n));
    return log_cells + j * std::log(p) + (n - j) * std::log1p(-p);
}

/// Brackets F at an arbitrary rational x between the two neighboring level-m
/// dyadic CDF values. The CDF is only pinned down at dyadic points; callers
/// choose how tight a bracket they need.
inline std::pair<Rational, Rational> hem_cdf_bracket(const Rational& p, const Rational& x,
                                                     int level) {
    return {hem_cdf(p, DyadicRational::floor_of(x, level)),
            hem_cdf(p, DyadicRational::ceil_of(x, level))};
}

/// Approximate draw from the limit distribution: m cascade digits (each 1
/// with probability p) select a level-m cell, and the cell midpoint is
/// returned. Truncation error is at most 2^-m in Kolmogorov distance at
/// dyadic points.
inline double hem_sample(double p, int levels, Engine& g) {
    if (levels < 1 || levels > 52)
        throw std::domain_error("hem sample: levels must be in [1, 52]");
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("p must be in [0, 1]");
    std::uint64_t cell = 0;
    for (int i = 0; i < levels; ++i) cell = (cell << 1) | (bernoulli(p, g) ? 1u : 0u);
    return std::ldexp(2.0 * static_cast<double>(cell) + 1.0, -(levels + 1));
}

} // namespace weaver
