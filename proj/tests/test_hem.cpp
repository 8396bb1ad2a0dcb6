#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "weaver/distribution.hpp"
#include "weaver/hem.hpp"
#include "weaver/moments.hpp"

using namespace weaver;

TEST_CASE("dyadic rationals canonicalize") {
    REQUIRE(DyadicRational(4, 4) == DyadicRational(1, 2));
    REQUIRE(DyadicRational(0, 7) == DyadicRational(0, 0));
    REQUIRE(DyadicRational(8, 3) == DyadicRational(1, 0)); // the value 1
    REQUIRE(DyadicRational(5, 3).value() == make_ratio(5, 8));
    REQUIRE_THROWS_AS(DyadicRational(9, 3), std::domain_error);
    REQUIRE_THROWS_AS(DyadicRational(1, -1), std::domain_error);
}

TEST_CASE("limit CDF at dyadic points") {
    SECTION("named values") {
        for (const auto& p : {make_ratio(1, 3), make_ratio(2, 5), make_ratio(9, 10)}) {
            const Rational q = 1 - p;
            REQUIRE(hem_cdf(p, DyadicRational(1, 1)) == q);
            REQUIRE(hem_cdf(p, DyadicRational(1, 2)) == q * q);
            REQUIRE(hem_cdf(p, DyadicRational(3, 2)) == 1 - p * p);
            REQUIRE(hem_cdf(p, DyadicRational(3, 3)) == q * q + p * q * q);
            REQUIRE(hem_cdf(p, DyadicRational(5, 3)) == q + p * q * q);
            REQUIRE(hem_cdf(p, DyadicRational(7, 3)) == 1 - p * p * p);
            REQUIRE(hem_cdf(p, DyadicRational(0, 0)) == 0);
            REQUIRE(hem_cdf(p, DyadicRational(1, 0)) == 1);
        }
    }
    SECTION("p = 1/2 is the identity at every dyadic") {
        const Rational half = make_ratio(1, 2);
        for (int level = 0; level <= 10; ++level)
            for (std::uint64_t k = 0; k <= (std::uint64_t(1) << level); ++k) {
                const DyadicRational x(k, level);
                REQUIRE(hem_cdf(half, x) == x.value());
            }
    }
    SECTION("agrees with every finite staircase of level >= the point's") {
        // Except at 0 itself, where the staircases carry the shrinking atom
        // (1-p)^n and the limit CDF is 0.
        const Rational p = make_ratio(2, 5);
        for (int level = 1; level <= 4; ++level)
            for (std::uint64_t k = 1; k <= (std::uint64_t(1) << level); ++k) {
                const DyadicRational x(k, level);
                const Rational limit = hem_cdf(p, x);
                for (int n = level; n <= level + 6; ++n)
                    REQUIRE(cdf_eval(n, p, x.value()) == limit);
            }
    }
    SECTION("mirror symmetry at dyadics") {
        const Rational p = make_ratio(1, 3);
        for (int level = 0; level <= 6; ++level)
            for (std::uint64_t k = 0; k <= (std::uint64_t(1) << level); ++k) {
                const std::uint64_t mirrored = (std::uint64_t(1) << level) - k;
                REQUIRE(hem_cdf(p, DyadicRational(k, level)) ==
                        1 - hem_cdf(1 - p, DyadicRational(mirrored, level)));
            }
    }
}

TEST_CASE("interval masses") {
    SECTION("named values") {
        for (const auto& p : {make_ratio(1, 3), make_ratio(2, 5)}) {
            REQUIRE(interval_mass(p, 2, 1) == (1 - p) * p);
            REQUIRE(interval_mass(p, 1, 0) == 1 - p);
        }
        REQUIRE(interval_mass(make_ratio(2, 5), 3, 6) == make_ratio(12, 125));
    }
    SECTION("equal to the CDF increment") {
        const Rational p = make_ratio(2, 5);
        for (int level = 1; level <= 6; ++level)
            for (std::uint64_t k = 0; k < (std::uint64_t(1) << level); ++k)
                REQUIRE(interval_mass(p, level, k) ==
                        hem_cdf(p, DyadicRational(k + 1, level)) -
                            hem_cdf(p, DyadicRational(k, level)));
    }
    SECTION("each level sums to 1; children refine their parent") {
        for (const auto& p : {make_ratio(1, 3), make_ratio(2, 5)}) {
            for (int level = 0; level <= 8; ++level) {
                Rational total = 0;
                for (std::uint64_t k = 0; k < (std::uint64_t(1) << level); ++k) {
                    const Rational mass = interval_mass(p, level, k);
                    total += mass;
                    REQUIRE(mass == interval_mass(p, level + 1, 2 * k) +
                                        interval_mass(p, level + 1, 2 * k + 1));
                }
                REQUIRE(total == 1);
            }
        }
    }
    SECTION("p = 1/2 gives the uniform 2^-level everywhere") {
        for (std::uint64_t k = 0; k < 32; ++k)
            REQUIRE(interval_mass(make_ratio(1, 2), 5, k) == make_ratio(1, 32));
    }
    REQUIRE_THROWS_AS(interval_mass(make_ratio(1, 2), 3, 8), std::domain_error);
}

TEST_CASE("interval-mass locality: finite staircases load dyadic cells identically") {
    const Rational p = make_ratio(2, 5);
    for (int level = 1; level <= 3; ++level) {
        for (int m = level; m <= level + 4; ++m) {
            const auto dist = pmf_vector(m, p);
            for (std::uint64_t k = 0; k < (std::uint64_t(1) << level); ++k) {
                const Rational lo = make_ratio(Int(k), pow2(level));
                const Rational hi = make_ratio(Int(k) + 1, pow2(level));
                Rational in_cell = 0; // closed cell: interior dyadics carry no mass
                for (std::uint64_t j = 0; j < dist.size(); ++j) {
                    const Rational y = dist.support(j);
                    if (lo <= y && y <= hi) in_cell += dist.probs[j];
                }
                REQUIRE(in_cell == interval_mass(p, level, k));
            }
        }
    }
}

TEST_CASE("limit moments") {
    REQUIRE(hem_moments(make_ratio(1, 2)) ==
            std::pair<Rational, Rational>{make_ratio(1, 2), make_ratio(1, 12)});
    REQUIRE(hem_moments(make_ratio(0, 1)) == std::pair<Rational, Rational>{0, 0});
    SECTION("finite variances descend to the limit value (p = 2/5)") {
        const Rational p = make_ratio(2, 5);
        const auto [mu, limit_var] = hem_moments(p);
        REQUIRE(mu == p);
        REQUIRE(limit_var == make_ratio(2, 25));
        Rational prev_gap = variance(1, p) - limit_var;
        for (int n = 2; n <= 20; ++n) {
            const Rational gap = variance(n, p) - limit_var;
            REQUIRE(gap > 0);
            REQUIRE(gap < prev_gap);
            prev_gap = gap;
        }
    }
}

TEST_CASE("density diagnostic") {
    SECTION("p = 1/2 pins every cell at log(1 - 2^-n)") {
        for (int n = 1; n <= 20; ++n) {
            const double expected = std::log1p(-std::ldexp(1.0, -n));
            for (int j : {0, n / 2, n})
                REQUIRE_THAT(density_diagnostic(n, 0.5, j),
                             Catch::Matchers::WithinAbs(expected, 1e-12));
        }
    }
    SECTION("p = 0.3: edge cells diverge and decay monotonically") {
        for (int n = 2; n <= 40; ++n) {
            REQUIRE(density_diagnostic(n, 0.3, 0) > density_diagnostic(n - 1, 0.3, 0));
            REQUIRE(density_diagnostic(n, 0.3, n) < density_diagnostic(n - 1, 0.3, n - 1));
        }
    }
    REQUIRE_THROWS_AS(density_diagnostic(5, 0.0, 0), std::domain_error);
    REQUIRE_THROWS_AS(density_diagnostic(5, 1.0, 0), std::domain_error);
    REQUIRE_THROWS_AS(density_diagnostic(5, 0.5, 6), std::domain_error);
}

TEST_CASE("bracketing a non-dyadic point") {
    const Rational p = make_ratio(2, 5);
    const Rational x = make_ratio(1, 3);
    Rational prev_width = 2;
    for (int level = 1; level <= 20; ++level) {
        const auto [lo, hi] = hem_cdf_bracket(p, x, level);
        REQUIRE(lo <= hi);
        const Rational width = hi - lo;
        REQUIRE(width <= prev_width);
        prev_width = width;
    }
    // A dyadic query collapses the bracket.
    const auto [lo, hi] = hem_cdf_bracket(p, make_ratio(3, 8), 3);
    REQUIRE(lo == hi);
    REQUIRE(lo == hem_cdf(p, DyadicRational(3, 3)));
}

TEST_CASE("truncated cascade sampling") {
    Engine g = replication_stream(2024, 0);
    const int levels = 16;
    const int draws = 20000;
    std::vector<double> xs(draws);
    for (auto& x : xs) x = hem_sample(0.3, levels, g);
    for (const double x : xs) {
        REQUIRE(x > 0.0);
        REQUIRE(x < 1.0);
    }
    // Empirical CDF at a few dyadics vs the exact limit CDF; 3-sigma bands
    // plus the 2^-levels truncation slack.
    const Rational p = make_ratio(3, 10);
    for (const auto& [num, level] : std::vector<std::pair<std::uint64_t, int>>{
             {1, 1}, {1, 2}, {3, 2}, {5, 3}}) {
        const double exact = to_double(hem_cdf(p, DyadicRational(num, level)));
        double hits = 0;
        const double cut = std::ldexp(static_cast<double>(num), -level);
        for (const double x : xs)
            if (x < cut) ++hits;
        const double freq = hits / draws;
        const double band = 3.0 * std::sqrt(exact * (1 - exact) / draws) + std::ldexp(1.0, -levels);
        REQUIRE(std::abs(freq - exact) <= band);
    }
}
