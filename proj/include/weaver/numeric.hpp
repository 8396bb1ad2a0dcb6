#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

namespace weaver {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Scalar types the distribution kernels are instantiated with. Rational
/// instantiations are the exact ground truth; double exists for large n.
template <class T>
concept ProbScalar = std::same_as<T, Rational> || std::same_as<T, double>;

/// Caps for operations that materialize or sweep all 2^n entries.
inline constexpr int kMaxExactVectorN = 20;
inline constexpr int kMaxFloatVectorN = 26;

template <ProbScalar T>
constexpr int vector_cap() {
    if constexpr (std::same_as<T, Rational>)
        return kMaxExactVectorN;
    else
        return kMaxFloatVectorN;
}

/// Reduced rational with positive denominator.
inline Rational make_ratio(Int num, Int den) {
    if (den == 0)
        throw std::domain_error("make_ratio: denominator must be nonzero");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    return Rational(std::move(num), std::move(den));
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline constexpr double to_double(double x) { return x; }

template <ProbScalar T>
T from_rational(const Rational& q) {
    if constexpr (std::same_as<T, Rational>)
        return q;
    else
        return to_double(q);
}

/// Plain iterated product base^e. Probability powers go through this so that
/// single-point and full-vector evaluations produce bit-identical doubles.
template <class T>
T pow_iter(const T& base, unsigned e) {
    T acc(1);
    for (unsigned i = 0; i < e; ++i) acc *= base;
    return acc;
}

/// Binary exponentiation, for exact types where evaluation order is free.
template <class T>
T pow_uint(T base, unsigned e) {
    T acc(1);
    while (e != 0) {
        if (e & 1u) acc *= base;
        base *= base;
        e >>= 1u;
    }
    return acc;
}

inline Int pow2(unsigned n) { return Int(1) << n; }

inline Int binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    Int acc = 1;
    for (unsigned i = 1; i <= k; ++i) {
        acc *= n - k + i;
        acc /= i; // exact at every step
    }
    return acc;
}

/// Signed base-10 integer. cpp_int's own string constructor honors 0x/0
/// prefixes, so digits are validated and leading zeros stripped first.
inline Int parse_decimal_int(const std::string& text) {
    std::string digits = text;
    bool negative = false;
    if (!digits.empty() && (digits[0] == '+' || digits[0] == '-')) {
        negative = digits[0] == '-';
        digits.erase(0, 1);
    }
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        throw std::domain_error("not a decimal integer: '" + text + "'");
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
    const Int value(digits);
    return negative ? -value : value;
}

/// Parses "a/b", a plain integer, or a decimal by exact expansion
/// ("0.3" -> 3/10). Anything else is a domain error.
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::domain_error("empty rational");
    if (const auto slash = text.find('/'); slash != std::string::npos)
        return make_ratio(parse_decimal_int(text.substr(0, slash)),
                          parse_decimal_int(text.substr(slash + 1)));
    if (const auto dot = text.find('.'); dot != std::string::npos) {
        std::string head = text.substr(0, dot);
        const std::string frac = text.substr(dot + 1);
        bool negative = false;
        if (!head.empty() && (head[0] == '+' || head[0] == '-')) {
            negative = head[0] == '-';
            head.erase(0, 1);
        }
        if (head.empty() && frac.empty())
            throw std::domain_error("not a rational or decimal: '" + text + "'");
        const Int scale = pow_uint(Int(10), static_cast<unsigned>(frac.size()));
        Int num = (head.empty() ? Int(0) : parse_decimal_int(head)) * scale +
                  (frac.empty() ? Int(0) : parse_decimal_int(frac));
        if (negative) num = -num;
        return make_ratio(std::move(num), scale);
    }
    return Rational(parse_decimal_int(text));
}

inline Rational parse_probability(const std::string& text) {
    const Rational p = parse_rational(text);
    if (p < 0 || p > 1)
        throw std::domain_error("probability must be in [0, 1], got " + text);
    return p;
}

/// Compensated (Kahan) accumulator for streaming float sums.
class KahanSum {
public:
    void add(double x) {
        const double y = x - carry_;
        const double t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

/// Pairwise summation over a fixed array. The reduction tree depends only on
/// the length, so results are independent of how the values were produced.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 32) {
        double s = 0.0;
        for (const double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

} // namespace weaver
