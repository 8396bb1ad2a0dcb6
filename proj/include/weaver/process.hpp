#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "weaver/choice_vector.hpp"
#include "weaver/component.hpp"
#include "weaver/errors.hpp"
#include "weaver/moments.hpp"
#include "weaver/numeric.hpp"
#include "weaver/rng.hpp"

namespace weaver {

enum class ProcessKind { path_mean, mixture_draw, conditional_mean };

inline const char* process_name(ProcessKind kind) {
    switch (kind) {
        case ProcessKind::path_mean: return "path_mean";
        case ProcessKind::mixture_draw: return "mixture_draw";
        case ProcessKind::conditional_mean: return "conditional_mean";
    }
    return "?";
}

inline ProcessKind parse_process(const std::string& s) {
    if (s == "pathmean" || s == "path_mean") return ProcessKind::path_mean;
    if (s == "mixdraw" || s == "mixture_draw") return ProcessKind::mixture_draw;
    if (s == "condmean" || s == "conditional_mean") return ProcessKind::conditional_mean;
    throw std::domain_error("unknown process '" + s + "' (expected pathmean|mixdraw|condmean)");
}

/// Cap for materialized paths (2^n - 1 stored observations).
inline constexpr int kMaxPathN = 30;

/// One run of progressive sampling: n selections, sub-sample i holding
/// 2^{i-1} observations from the population picked by selection i.
struct SamplePath {
    int n;
    ChoiceVector choices;
    std::vector<double> observations; // in sub-sample order
    double raw_sum;                   // S_n
    double path_mean;                 // S_n / (2^n - 1)
};

/// Stream layout per replication: for i = 1..n, one uniform for the
/// selection bit, then the sub-sample's component draws (point components
/// consume none). Consumers that need more (the mixture draw) continue on
/// the same stream.
inline SamplePath progressive_sample(int n, double p, const ComponentSpec& h0,
                                     const ComponentSpec& h1, Engine& g) {
    if (n < 1 || n > kMaxPathN)
        throw std::domain_error("progressive sample: n must be in [1, " +
                                std::to_string(kMaxPathN) + "], got " + std::to_string(n));
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("p must be in [0, 1]");
    require_standard_means(h0, h1);

    const std::uint64_t total = (std::uint64_t(1) << n) - 1;
    std::vector<double> observations;
    observations.reserve(total);
    std::uint64_t k = 0;
    KahanSum sum;
    for (int i = 1; i <= n; ++i) {
        const bool pick_h1 = bernoulli(p, g);
        if (pick_h1) k |= std::uint64_t(1) << (i - 1);
        const ComponentSpec& source = pick_h1 ? h1 : h0;
        const std::uint64_t count = std::uint64_t(1) << (i - 1);
        for (std::uint64_t j = 0; j < count; ++j) {
            const double x = source.draw(g);
            observations.push_back(x);
            sum.add(x);
        }
    }
    const double raw = sum.value();
    return SamplePath{n, ChoiceVector(n, k), std::move(observations), raw,
                      raw / static_cast<double>(total)};
}

/// Resample one stratum of a finished path: a fresh Bernoulli with success
/// probability lambda_k = k/(2^n - 1) picks the H1 stratum, and that
/// stratum's sample mean is returned. The picked stratum is never empty
/// (lambda is 0 or 1 exactly when a stratum is).
inline double mixture_draw(const SamplePath& path, Engine& g) {
    KahanSum sums[2];
    std::uint64_t counts[2] = {0, 0};
    std::size_t offset = 0;
    for (int i = 1; i <= path.n; ++i) {
        const int stratum = path.choices.selection(i) ? 1 : 0;
        const std::uint64_t count = std::uint64_t(1) << (i - 1);
        for (std::uint64_t j = 0; j < count; ++j) sums[stratum].add(path.observations[offset++]);
        counts[stratum] += count;
    }
    const double lambda = static_cast<double>(path.choices.k) /
                          static_cast<double>((std::uint64_t(1) << path.n) - 1);
    const int picked = u01(g) < lambda ? 1 : 0;
    return sums[picked].value() / static_cast<double>(counts[picked]);
}

namespace detail {

inline void check_process_args(int n, const double* s0, const double* s1) {
    if (n < 1 || n > kMaxPointN)
        throw std::domain_error("n must be in [1, " + std::to_string(kMaxPointN) + "], got " +
                                std::to_string(n));
    if (s0 && !(*s0 >= 0.0)) throw std::domain_error("variance s0 must be >= 0");
    if (s1 && !(*s1 >= 0.0)) throw std::domain_error("variance s1 must be >= 0");
}

template <ProbScalar T>
void check_sigma(const T& s) {
    if (!(s >= 0)) throw std::domain_error("component variance must be >= 0");
}

} // namespace detail

/// Variance of the mixture-draw process:
/// p(1-p) + (s0 + s1) / (2^n - 1).
template <ProbScalar T>
T theoretical_variance_paper(int n, const T& p, const T& s0, const T& s1) {
    weaver::detail::check_point_n(n);
    weaver::detail::check_probability(p);
    detail::check_sigma(s0);
    detail::check_sigma(s1);
    return p * (T(1) - p) +
           (s0 + s1) * from_rational<T>(make_ratio(1, pow2(static_cast<unsigned>(n)) - 1));
}

/// Variance of the literal path mean, by total variance:
/// Var(Y_n) + ((1-p) s0 + p s1) / (2^n - 1).
template <ProbScalar T>
T theoretical_variance_pathmean(int n, const T& p, const T& s0, const T& s1) {
    weaver::detail::check_point_n(n);
    weaver::detail::check_probability(p);
    detail::check_sigma(s0);
    detail::check_sigma(s1);
    return variance(n, p) + ((T(1) - p) * s0 + p * s1) *
                                from_rational<T>(make_ratio(1, pow2(static_cast<unsigned>(n)) - 1));
}

/// The three-way split of the mixture-draw variance. The first two terms
/// rejoin to p(1-p) exactly; their shares drift toward 1/3 vs 2/3.
template <ProbScalar T>
struct VarianceSplit {
    T between_weaving; // Var(Y_n)
    T mixing;          // E[lambda (1 - lambda)]
    T within;          // (s0 + s1) / (2^n - 1)
};

template <ProbScalar T>
VarianceSplit<T> variance_decomposition(int n, const T& p, const T& s0, const T& s1) {
    weaver::detail::check_point_n(n);
    weaver::detail::check_probability(p);
    detail::check_sigma(s0);
    detail::check_sigma(s1);
    const Int full = pow2(static_cast<unsigned>(n)) - 1;
    Int weaving = 0;
    Int mixing = 0;
    for (int i = 0; i < n; ++i) weaving += Int(1) << (2 * i);
    for (int j = 0; j < n; ++j) mixing += (Int(1) << j) * (full - (Int(1) << j));
    const T pq = p * (T(1) - p);
    return {from_rational<T>(make_ratio(weaving, full * full)) * pq,
            from_rational<T>(make_ratio(mixing, full * full)) * pq,
            (s0 + s1) * from_rational<T>(make_ratio(1, full))};
}

struct SimulateConfig {
    ProcessKind process = ProcessKind::conditional_mean;
    int n = 1;
    double p = 0.5;
    ComponentSpec h0 = ComponentSpec::point(0.0);
    ComponentSpec h1 = ComponentSpec::point(1.0);
    std::uint64_t replications = 10'000;
    std::uint64_t master_seed = 0;
    double epsilon = 0.05;
    unsigned threads = 1;
    std::uint64_t max_observations = std::uint64_t(1) << 32;
};

struct SimulationReport {
    std::string process;
    int n = 0;
    double p = 0.0;
    std::uint64_t replications = 0;
    std::uint64_t master_seed = 0;
    double mean = 0.0;
    double variance = 0.0;
    double se_mean = 0.0;
    double se_variance = 0.0;
    double frac_near_zero = 0.0;
    double frac_near_one = 0.0;
    double epsilon = 0.0;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["process"] = process;
        j["n"] = n;
        j["p"] = p;
        j["reps"] = replications;
        j["seed"] = master_seed;
        j["mean"] = mean;
        j["variance"] = variance;
        j["se_mean"] = se_mean;
        j["se_variance"] = se_variance;
        j["frac_near_zero"] = frac_near_zero;
        j["frac_near_one"] = frac_near_one;
        j["epsilon"] = epsilon;
        return j;
    }
};

namespace detail {

inline double run_replication(const SimulateConfig& c, Engine& g) {
    const double denom = static_cast<double>((std::uint64_t(1) << c.n) - 1);
    std::uint64_t k = 0;
    switch (c.process) {
        case ProcessKind::conditional_mean: {
            for (int i = 1; i <= c.n; ++i)
                if (bernoulli(c.p, g)) k |= std::uint64_t(1) << (i - 1);
            return static_cast<double>(k) / denom;
        }
        case ProcessKind::path_mean: {
            KahanSum sum;
            for (int i = 1; i <= c.n; ++i) {
                const bool pick_h1 = bernoulli(c.p, g);
                if (pick_h1) k |= std::uint64_t(1) << (i - 1);
                const ComponentSpec& source = pick_h1 ? c.h1 : c.h0;
                const std::uint64_t count = std::uint64_t(1) << (i - 1);
                for (std::uint64_t j = 0; j < count; ++j) sum.add(source.draw(g));
            }
            return sum.value() / denom;
        }
        case ProcessKind::mixture_draw: {
            KahanSum sums[2];
            std::uint64_t counts[2] = {0, 0};
            for (int i = 1; i <= c.n; ++i) {
                const bool pick_h1 = bernoulli(c.p, g);
                if (pick_h1) k |= std::uint64_t(1) << (i - 1);
                const int stratum = pick_h1 ? 1 : 0;
                const ComponentSpec& source = pick_h1 ? c.h1 : c.h0;
                const std::uint64_t count = std::uint64_t(1) << (i - 1);
                for (std::uint64_t j = 0; j < count; ++j) sums[stratum].add(source.draw(g));
                counts[stratum] += count;
            }
            const double lambda = static_cast<double>(k) / denom;
            const int picked = u01(g) < lambda ? 1 : 0;
            return sums[picked].value() / static_cast<double>(counts[picked]);
        }
    }
    return 0.0;
}

} // namespace detail

/// Deterministic Monte Carlo over independent replications. Replication r
/// runs on substream (master_seed, r), and all aggregation is fixed-shape
/// pairwise reduction over the replication array, so the report is a pure
/// function of (config, master_seed) no matter how many threads run.
inline SimulationReport simulate(const SimulateConfig& config) {
    if (config.replications < 1)
        throw std::domain_error("simulate: replication count must be >= 1");
    if (config.n < 1 || config.n > kMaxPointN)
        throw std::domain_error("simulate: n must be in [1, " + std::to_string(kMaxPointN) +
                                "], got " + std::to_string(config.n));
    if (!(config.p >= 0.0 && config.p <= 1.0))
        throw std::domain_error("simulate: p must be in [0, 1]");
    if (!(config.epsilon >= 0.0))
        throw std::domain_error("simulate: epsilon must be >= 0");
    require_standard_means(config.h0, config.h1);
    if (config.process != ProcessKind::conditional_mean) {
        const Int budget = Int(config.replications) * (pow2(static_cast<unsigned>(config.n)) - 1);
        if (budget > config.max_observations)
            throw resource_error("simulate: R * (2^n - 1) = " + budget.str() +
                                 " observations exceed the budget of " +
                                 std::to_string(config.max_observations));
    }

    const std::uint64_t reps = config.replications;
    std::vector<double> values(reps);
    const auto worker = [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t r = lo; r < hi; ++r) {
            Engine g = replication_stream(config.master_seed, r);
            values[r] = detail::run_replication(config, g);
        }
    };
    const std::uint64_t nthreads = std::max<std::uint64_t>(1, std::min<std::uint64_t>(config.threads, reps));
    if (nthreads == 1) {
        worker(0, reps);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (std::uint64_t t = 0; t < nthreads; ++t) {
            const std::uint64_t lo = reps * t / nthreads;
            const std::uint64_t hi = reps * (t + 1) / nthreads;
            pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    const double count = static_cast<double>(reps);
    const double mean = pairwise_sum(values) / count;
    std::vector<double> centered_sq(reps);
    std::vector<double> centered_4th(reps);
    for (std::uint64_t r = 0; r < reps; ++r) {
        const double d = values[r] - mean;
        centered_sq[r] = d * d;
        centered_4th[r] = d * d * d * d;
    }
    const double m2 = pairwise_sum(centered_sq) / count;
    const double m4 = pairwise_sum(centered_4th) / count;
    const double sample_var = reps > 1 ? m2 * count / (count - 1.0) : 0.0;
    const double se_mean = std::sqrt(sample_var / count);
    const double var_of_var =
        reps > 1 ? std::max(0.0, m4 - m2 * m2 * (count - 3.0) / (count - 1.0)) / count : 0.0;

    std::uint64_t near_zero = 0;
    std::uint64_t near_one = 0;
    for (const double v : values) {
        if (std::abs(v) <= config.epsilon) ++near_zero;
        if (std::abs(v - 1.0) <= config.epsilon) ++near_one;
    }

    SimulationReport report;
    report.process = process_name(config.process);
    report.n = config.n;
    report.p = config.p;
    report.replications = reps;
    report.master_seed = config.master_seed;
    report.mean = mean;
    report.variance = sample_var;
    report.se_mean = se_mean;
    report.se_variance = std::sqrt(var_of_var);
    report.frac_near_zero = static_cast<double>(near_zero) / count;
    report.frac_near_one = static_cast<double>(near_one) / count;
    report.epsilon = config.epsilon;
    return report;
}

} // namespace weaver
