#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "weaver/choice_vector.hpp"
#include "weaver/errors.hpp"
#include "weaver/numeric.hpp"

namespace weaver {

/// How a pmf vector is built. All three are provably equal; keeping them
/// separate lets tests check the equivalence instead of assuming it.
enum class Method { direct, weave, cascade };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::direct: return "direct";
        case Method::weave: return "weave";
        case Method::cascade: return "cascade";
    }
    return "?";
}

inline Method parse_method(const std::string& s) {
    if (s == "direct") return Method::direct;
    if (s == "weave") return Method::weave;
    if (s == "cascade") return Method::cascade;
    throw std::domain_error("unknown method '" + s + "' (expected direct|weave|cascade)");
}

namespace detail {

inline void check_point_n(int n) {
    if (n < 1 || n > kMaxPointN)
        throw std::domain_error("n must be in [1, " + std::to_string(kMaxPointN) +
                                "], got " + std::to_string(n));
}

inline void check_index(int n, std::uint64_t k) {
    if (k >> n)
        throw std::domain_error("k must be in [0, 2^n - 1] with n = " + std::to_string(n) +
                                ", got " + std::to_string(k));
}

template <ProbScalar T>
void check_probability(const T& p) {
    if (!(p >= 0 && p <= 1)) throw std::domain_error("p must be in [0, 1]");
}

template <ProbScalar T>
void check_vector_n(int n) {
    if (n < 1) throw std::domain_error("n must be >= 1, got " + std::to_string(n));
    if (n > vector_cap<T>())
        throw resource_error("2^n-sized operation exceeds the cap n <= " +
                             std::to_string(vector_cap<T>()) + " for this numeric mode, got n = " +
                             std::to_string(n));
}

/// p^0..p^max and (1-p)^0..(1-p)^max by iterated products.
template <ProbScalar T>
std::pair<std::vector<T>, std::vector<T>> power_tables(const T& p, int max_exponent) {
    std::vector<T> pp(static_cast<std::size_t>(max_exponent) + 1, T(1));
    std::vector<T> qq(static_cast<std::size_t>(max_exponent) + 1, T(1));
    const T q = T(1) - p;
    for (int j = 1; j <= max_exponent; ++j) {
        pp[j] = pp[j - 1] * p;
        qq[j] = qq[j - 1] * q;
    }
    return {std::move(pp), std::move(qq)};
}

} // namespace detail

/// Mass at index k: p^{#1} (1-p)^{#0} over the bits of k.
template <ProbScalar T>
T pmf_point(int n, const T& p, std::uint64_t k) {
    detail::check_point_n(n);
    detail::check_index(n, k);
    detail::check_probability(p);
    const int ones = std::popcount(k);
    return pow_iter(p, static_cast<unsigned>(ones)) *
           pow_iter(T(1) - p, static_cast<unsigned>(n - ones));
}

/// Support point y_k = k / (2^n - 1), reduced. Consecutive points differ by
/// exactly 1/(2^n - 1).
inline Rational support_point(int n, std::uint64_t k) {
    detail::check_point_n(n);
    detail::check_index(n, k);
    return make_ratio(Int(k), pow2(static_cast<unsigned>(n)) - 1);
}

/// Adjacency ratio f = p / (1-p). Undefined at p = 1.
template <ProbScalar T>
T fold_factor(const T& p) {
    if (!(p >= 0 && p < 1))
        throw std::domain_error("fold factor p/(1-p) requires 0 <= p < 1");
    return p / (T(1) - p);
}

/// Full pmf of W(n, p) on support y_k = k/(2^n - 1), indexed by the packed
/// choice-vector value k.
template <ProbScalar T>
struct WeaverDistribution {
    int n;
    T p;
    Method method;
    std::vector<T> probs;

    std::uint64_t size() const { return std::uint64_t(1) << n; }
    Rational support(std::uint64_t k) const { return support_point(n, k); }
};

template <ProbScalar T>
WeaverDistribution<T> pmf_vector(int n, const T& p, Method method = Method::direct) {
    detail::check_vector_n<T>(n);
    detail::check_probability(p);
    const std::uint64_t size = std::uint64_t(1) << n;
    const T q = T(1) - p;

    std::vector<T> probs;
    switch (method) {
        case Method::direct: {
            auto [pp, qq] = detail::power_tables(p, n);
            probs.resize(size);
            for (std::uint64_t k = 0; k < size; ++k) {
                const int ones = std::popcount(k);
                probs[k] = pp[ones] * qq[n - ones];
            }
            break;
        }
        case Method::weave: {
            // v -> ((1-p) v, p v), starting from v = (1).
            probs.assign(1, T(1));
            for (int step = 0; step < n; ++step) {
                std::vector<T> next(probs.size() * 2);
                for (std::size_t i = 0; i < probs.size(); ++i) {
                    next[i] = q * probs[i];
                    next[probs.size() + i] = p * probs[i];
                }
                probs = std::move(next);
            }
            break;
        }
        case Method::cascade: {
            // Fork every mass into adjacent (1-p)/p children.
            probs.assign(1, T(1));
            for (int step = 0; step < n; ++step) {
                std::vector<T> next(probs.size() * 2);
                for (std::size_t i = 0; i < probs.size(); ++i) {
                    next[2 * i] = q * probs[i];
                    next[2 * i + 1] = p * probs[i];
                }
                probs = std::move(next);
            }
            break;
        }
    }

    WeaverDistribution<T> dist{n, p, method, std::move(probs)};
    if constexpr (std::same_as<T, Rational>) {
        Rational total = 0;
        for (const auto& w : dist.probs) total += w;
        if (total != 1) throw std::logic_error("pmf does not sum to 1 exactly");
    } else {
        const double total = pairwise_sum(dist.probs);
        if (std::abs(total - 1.0) > std::ldexp(1.0, n - 50))
            throw std::logic_error("pmf sum drifted beyond 2^n * 2^-50");
    }
    return dist;
}

/// Mirror image: returns W(n, 1-p), with probs[2^n-1-k] = input probs[k].
template <ProbScalar T>
WeaverDistribution<T> reflect(const WeaverDistribution<T>& dist) {
    std::vector<T> probs(dist.probs.rbegin(), dist.probs.rend());
    return WeaverDistribution<T>{dist.n, T(1) - dist.p, dist.method, std::move(probs)};
}

/// F_n(x) = sum of probs[k] over y_k <= x (right-continuous staircase).
///
/// Computed in O(n) as the prefix mass of {k <= K}, K = floor(x (2^n - 1)):
/// walking the binary digits of K+1 most-significant first, every 1-digit
/// contributes (prefix weight) * (1-p) and turns the walk onto the p branch.
template <ProbScalar T>
T cdf_eval(int n, const T& p, const Rational& x) {
    detail::check_point_n(n);
    detail::check_probability(p);
    if (x < 0 || x > 1)
        throw std::domain_error("cdf argument x must be in [0, 1]");
    const Int full = pow2(static_cast<unsigned>(n)) - 1;
    const Int bound = numerator(x) * full / denominator(x) + 1; // = K + 1
    if (bound > full) return T(1);
    const std::uint64_t m = bound.convert_to<std::uint64_t>();
    const T q = T(1) - p;
    T mass(0);
    T prefix(1);
    for (int i = n - 1; i >= 0; --i) {
        if ((m >> i) & 1u) {
            mass += prefix * q;
            prefix *= p;
        } else {
            prefix *= q;
        }
    }
    return mass;
}

/// One staircase jump class: a common jump size with its multiplicity.
template <ProbScalar T>
struct JumpBin {
    T size;
    Int count;
};

/// Jump sizes h_j = p^j (1-p)^{n-j} with binomial multiplicities, j = 0..n,
/// coalescing bins whose sizes coincide (all of them when p = 1/2). Counts
/// sum to 2^n and the size-weighted sum is 1.
template <ProbScalar T>
std::vector<JumpBin<T>> jump_histogram(int n, const T& p) {
    detail::check_point_n(n);
    detail::check_probability(p);
    auto [pp, qq] = detail::power_tables(p, n);
    std::vector<JumpBin<T>> bins;
    for (int j = 0; j <= n; ++j) {
        T size = pp[j] * qq[n - j];
        Int count = binomial(static_cast<unsigned>(n), static_cast<unsigned>(j));
        if (!bins.empty() && bins.back().size == size)
            bins.back().count += count;
        else
            bins.push_back({std::move(size), std::move(count)});
    }
    return bins;
}

/// Indices of maximal mass. A single index unless masses tie; for p = 1/2
/// every index ties.
template <ProbScalar T>
std::vector<std::uint64_t> mode_indices(const WeaverDistribution<T>& dist) {
    T best = dist.probs.at(0);
    for (const auto& w : dist.probs)
        if (w > best) best = w;
    std::vector<std::uint64_t> modes;
    for (std::uint64_t k = 0; k < dist.probs.size(); ++k)
        if (dist.probs[k] == best) modes.push_back(k);
    return modes;
}

} // namespace weaver
