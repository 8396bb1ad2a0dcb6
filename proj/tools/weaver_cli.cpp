// Command-line front end: exact/float tables for the weaver's distribution,
// geometric-triangle rows, limit-distribution (hem) tables, variance
// decompositions, enumeration dumps, and the Monte Carlo engine. Output is
// deterministic: identical argv (and seed) yields identical bytes.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "weaver/weaver.hpp"

namespace {

using nlohmann::ordered_json;
using namespace weaver;

enum class OutputFormat { csv, json };

struct CommonOptions {
    std::string mode = "exact";
    std::string format;
    std::string output;
};

OutputFormat resolve_format(const CommonOptions& common) {
    std::string choice = common.format;
    if (choice.empty()) {
        if (const char* env = std::getenv("WEAVER_FORMAT")) choice = env;
    }
    if (choice.empty()) choice = "csv";
    if (choice == "csv") return OutputFormat::csv;
    if (choice == "json") return OutputFormat::json;
    throw std::domain_error("--format: expected csv or json, got '" + choice + "'");
}

bool exact_mode(const CommonOptions& common) {
    if (common.mode == "exact") return true;
    if (common.mode == "float") return false;
    throw std::domain_error("--mode: expected exact or float, got '" + common.mode + "'");
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("WEAVER_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw std::domain_error(std::string("WEAVER_SEED: not an integer: '") + env + "'");
        }
    }
    return 0;
}

Rational parse_flag_rational(const std::string& text, const char* flag) {
    try {
        return parse_rational(text);
    } catch (const std::exception& e) {
        throw std::domain_error(std::string(flag) + ": " + e.what());
    }
}

Rational parse_flag_probability(const std::string& text, const char* flag) {
    try {
        return parse_probability(text);
    } catch (const std::exception& e) {
        throw std::domain_error(std::string(flag) + ": " + e.what());
    }
}

void enforce_max_n(int n, int max_n) {
    if (n > max_n)
        throw resource_error("--max-n: n = " + std::to_string(n) + " exceeds the cap " +
                             std::to_string(max_n));
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw std::domain_error("--output: cannot open '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void emit_json(Output& out, const ordered_json& j) { out.stream() << j.dump(2) << "\n"; }

// ---------------------------------------------------------------------------
// pmf

void run_pmf(const CommonOptions& common, int n, const std::string& p_text,
             const std::string& method_text, int max_n) {
    enforce_max_n(n, max_n);
    const Method method = parse_method(method_text);
    const Rational p = parse_flag_probability(p_text, "--p");
    Output out(common.output);
    const OutputFormat format = resolve_format(common);

    if (exact_mode(common)) {
        const auto dist = pmf_vector<Rational>(n, p, method);
        if (format == OutputFormat::csv) {
            out.stream() << "k,bits,y_num,y_den,p_num,p_den\n";
            for (std::uint64_t k = 0; k < dist.size(); ++k) {
                const Rational y = dist.support(k);
                out.stream() << k << "," << ChoiceVector(n, k).bit_string() << ","
                             << numerator(y) << "," << denominator(y) << ","
                             << numerator(dist.probs[k]) << "," << denominator(dist.probs[k])
                             << "\n";
            }
        } else {
            ordered_json j;
            j["n"] = n;
            j["p"] = format_rational(p);
            j["method"] = method_name(method);
            auto& rows = j["rows"] = ordered_json::array();
            for (std::uint64_t k = 0; k < dist.size(); ++k) {
                rows.push_back({{"k", k},
                                {"bits", ChoiceVector(n, k).bit_string()},
                                {"y", format_rational(dist.support(k))},
                                {"p", format_rational(dist.probs[k])}});
            }
            emit_json(out, j);
        }
    } else {
        const auto dist = pmf_vector<double>(n, to_double(p), method);
        if (format == OutputFormat::csv) {
            out.stream() << "k,bits,y,p\n";
            for (std::uint64_t k = 0; k < dist.size(); ++k) {
                out.stream() << k << "," << ChoiceVector(n, k).bit_string() << ","
                             << format_double(to_double(dist.support(k))) << ","
                             << format_double(dist.probs[k]) << "\n";
            }
        } else {
            ordered_json j;
            j["n"] = n;
            j["p"] = to_double(p);
            j["method"] = method_name(method);
            auto& rows = j["rows"] = ordered_json::array();
            for (std::uint64_t k = 0; k < dist.size(); ++k) {
                rows.push_back({{"k", k},
                                {"bits", ChoiceVector(n, k).bit_string()},
                                {"y", to_double(dist.support(k))},
                                {"p", dist.probs[k]}});
            }
            emit_json(out, j);
        }
    }
}

// ---------------------------------------------------------------------------
// cdf

void run_cdf(const CommonOptions& common, int n, const std::string& p_text,
             const std::string& points, int max_n) {
    enforce_max_n(n, max_n);
    const Rational p = parse_flag_probability(p_text, "--p");
    if (points != "dyadic" && points != "support")
        throw std::domain_error("--points: expected dyadic or support, got '" + points + "'");

    std::vector<Rational> xs;
    const std::uint64_t size = std::uint64_t(1) << n;
    if (points == "support") {
        if (n > kMaxExactVectorN)
            throw resource_error("cdf table has 2^n rows; cap is n <= " +
                                 std::to_string(kMaxExactVectorN));
        for (std::uint64_t k = 0; k < size; ++k) xs.push_back(support_point(n, k));
    } else {
        if (n > kMaxExactVectorN)
            throw resource_error("cdf table has 2^n + 1 rows; cap is n <= " +
                                 std::to_string(kMaxExactVectorN));
        for (std::uint64_t j = 0; j <= size; ++j) xs.push_back(make_ratio(Int(j), Int(size)));
    }

    Output out(common.output);
    const OutputFormat format = resolve_format(common);
    if (exact_mode(common)) {
        if (format == OutputFormat::csv) {
            out.stream() << "x_num,x_den,F_num,F_den\n";
            for (const auto& x : xs) {
                const Rational F = cdf_eval(n, p, x);
                out.stream() << numerator(x) << "," << denominator(x) << "," << numerator(F) << ","
                             << denominator(F) << "\n";
            }
        } else {
            ordered_json j;
            j["n"] = n;
            j["p"] = format_rational(p);
            j["points"] = points;
            auto& rows = j["rows"] = ordered_json::array();
            for (const auto& x : xs)
                rows.push_back(
                    {{"x", format_rational(x)}, {"F", format_rational(cdf_eval(n, p, x))}});
            emit_json(out, j);
        }
    } else {
        const double pf = to_double(p);
        if (format == OutputFormat::csv) {
            out.stream() << "x,F\n";
            for (const auto& x : xs)
                out.stream() << format_double(to_double(x)) << ","
                             << format_double(cdf_eval(n, pf, x)) << "\n";
        } else {
            ordered_json j;
            j["n"] = n;
            j["p"] = pf;
            j["points"] = points;
            auto& rows = j["rows"] = ordered_json::array();
            for (const auto& x : xs)
                rows.push_back({{"x", to_double(x)}, {"F", cdf_eval(n, pf, x)}});
            emit_json(out, j);
        }
    }
}

// ---------------------------------------------------------------------------
// moments

void run_moments(const CommonOptions& common, int n, const std::string& p_text, int max_n) {
    enforce_max_n(n, max_n);
    const Rational p = parse_flag_probability(p_text, "--p");
    Output out(common.output);
    const OutputFormat format = resolve_format(common);
    const Rational ratio = variance_ratio(n);

    if (exact_mode(common)) {
        const Rational mu = mean<Rational>(n, p);
        const Rational var = variance<Rational>(n, p);
        if (format == OutputFormat::csv) {
            out.stream() << "quantity,num,den\n";
            out.stream() << "mean," << numerator(mu) << "," << denominator(mu) << "\n";
            out.stream() << "variance," << numerator(var) << "," << denominator(var) << "\n";
            out.stream() << "variance_ratio," << numerator(ratio) << "," << denominator(ratio)
                         << "\n";
            for (int i = 0; i < n; ++i) {
                const Rational term = variance_per_bit<Rational>(n, p, i);
                out.stream() << "variance_bit_" << i << "," << numerator(term) << ","
                             << denominator(term) << "\n";
            }
        } else {
            ordered_json j;
            j["n"] = n;
            j["p"] = format_rational(p);
            j["mean"] = format_rational(mu);
            j["variance"] = format_rational(var);
            j["variance_ratio"] = format_rational(ratio);
            auto& bits = j["variance_per_bit"] = ordered_json::array();
            for (int i = 0; i < n; ++i)
                bits.push_back(format_rational(variance_per_bit<Rational>(n, p, i)));
            emit_json(out, j);
        }
    } else {
        const double pf = to_double(p);
        const double mu = mean<double>(n, pf);
        const double var = variance<double>(n, pf);
        if (format == OutputFormat::csv) {
            out.stream() << "quantity,value\n";
            out.stream() << "mean," << format_double(mu) << "\n";
            out.stream() << "variance," << format_double(var) << "\n";
            out.stream() << "variance_ratio," << format_double(to_double(ratio)) << "\n";
            for (int i = 0; i < n; ++i)
                out.stream() << "variance_bit_" << i << ","
                             << format_double(variance_per_bit<double>(n, pf, i)) << "\n";
        } else {
            ordered_json j;
            j["n"] = n;
            j["p"] = pf;
            j["mean"] = mu;
            j["variance"] = var;
            j["variance_ratio"] = to_double(ratio);
            auto& bits = j["variance_per_bit"] = ordered_json::array();
            for (int i = 0; i < n; ++i) bits.push_back(variance_per_bit<double>(n, pf, i));
            emit_json(out, j);
        }
    }
}

// ---------------------------------------------------------------------------
// triangle

void run_triangle(const CommonOptions& common, int n, int max_n) {
    enforce_max_n(n, max_n);
    const TriangleRow row = triangle_row(n);
    Output out(common.output);
    if (resolve_format(common) == OutputFormat::csv) {
        std::ostringstream joined;
        for (std::size_t i = 0; i < row.exponents.size(); ++i) {
            if (i) joined << ",";
            joined << row.exponents[i];
        }
        out.stream() << "exponents,row_sum\n";
        out.stream() << "\"" << joined.str() << "\"," << row.row_sum << "\n";
    } else {
        ordered_json j;
        j["n"] = n;
        j["exponents"] = row.exponents;
        j["row_sum"] = row.row_sum;
        emit_json(out, j);
    }
}

// ---------------------------------------------------------------------------
// hem

void run_hem(const CommonOptions& common, const std::string& p_text, int level, int max_n) {
    enforce_max_n(level, max_n);
    if (level < 0) throw std::domain_error("--level: must be >= 0");
    if (level > kMaxExactVectorN)
        throw resource_error("hem table has 2^level rows; cap is level <= " +
                             std::to_string(kMaxExactVectorN));
    const Rational p = parse_flag_probability(p_text, "--p");
    const auto [mu, var] = hem_moments(p);
    const std::uint64_t cells = std::uint64_t(1) << level;

    Output out(common.output);
    if (resolve_format(common) == OutputFormat::csv) {
        out.stream() << "mean_num,mean_den,variance_num,variance_den\n";
        out.stream() << numerator(mu) << "," << denominator(mu) << "," << numerator(var) << ","
                     << denominator(var) << "\n";
        out.stream() << "\n";
        out.stream() << "k,x_num,x_den,cdf_num,cdf_den,mass_num,mass_den\n";
        for (std::uint64_t k = 0; k <= cells; ++k) {
            const Rational x = make_ratio(Int(k), Int(cells));
            const Rational F = hem_cdf(p, DyadicRational(k, level));
            out.stream() << k << "," << numerator(x) << "," << denominator(x) << ","
                         << numerator(F) << "," << denominator(F);
            if (k < cells) {
                const Rational m = interval_mass(p, level, k);
                out.stream() << "," << numerator(m) << "," << denominator(m);
            } else {
                out.stream() << ",,";
            }
            out.stream() << "\n";
        }
    } else {
        ordered_json j;
        j["p"] = format_rational(p);
        j["level"] = level;
        j["mean"] = format_rational(mu);
        j["variance"] = format_rational(var);
        auto& rows = j["rows"] = ordered_json::array();
        for (std::uint64_t k = 0; k <= cells; ++k) {
            ordered_json row;
            row["k"] = k;
            row["x"] = format_rational(make_ratio(Int(k), Int(cells)));
            row["cdf"] = format_rational(hem_cdf(p, DyadicRational(k, level)));
            if (k < cells) row["mass"] = format_rational(interval_mass(p, level, k));
            rows.push_back(std::move(row));
        }
        emit_json(out, j);
    }
}

// ---------------------------------------------------------------------------
// decompose

void run_decompose(const CommonOptions& common, int n, const std::string& p_text,
                   const std::string& s0_text, const std::string& s1_text) {
    const Rational p = parse_flag_probability(p_text, "--p");
    const Rational s0 = parse_flag_rational(s0_text, "--s0");
    const Rational s1 = parse_flag_rational(s1_text, "--s1");
    if (s0 < 0) throw std::domain_error("--s0: variance must be >= 0");
    if (s1 < 0) throw std::domain_error("--s1: variance must be >= 0");
    const auto identity = oracle::variance_split_identity(n);
    Output out(common.output);
    const OutputFormat format = resolve_format(common);

    if (exact_mode(common)) {
        const auto split = variance_decomposition<Rational>(n, p, s0, s1);
        const Rational total = split.between_weaving + split.mixing + split.within;
        if (format == OutputFormat::csv) {
            out.stream() << "quantity,num,den\n";
            const auto row = [&](const char* name, const Rational& q) {
                out.stream() << name << "," << numerator(q) << "," << denominator(q) << "\n";
            };
            row("between_weaving", split.between_weaving);
            row("mixing", split.mixing);
            row("within", split.within);
            row("total", total);
            out.stream() << "identity_weaving_sum," << identity.weaving_sum << ",1\n";
            out.stream() << "identity_mixing_sum," << identity.mixing_sum << ",1\n";
            out.stream() << "identity_holds," << (identity.holds ? 1 : 0) << ",1\n";
        } else {
            ordered_json j;
            j["n"] = n;
            j["p"] = format_rational(p);
            j["between_weaving"] = format_rational(split.between_weaving);
            j["mixing"] = format_rational(split.mixing);
            j["within"] = format_rational(split.within);
            j["total"] = format_rational(total);
            j["identity_weaving_sum"] = identity.weaving_sum.str();
            j["identity_mixing_sum"] = identity.mixing_sum.str();
            j["identity_holds"] = identity.holds;
            emit_json(out, j);
        }
    } else {
        const auto split =
            variance_decomposition<double>(n, to_double(p), to_double(s0), to_double(s1));
        const double total = split.between_weaving + split.mixing + split.within;
        if (format == OutputFormat::csv) {
            out.stream() << "quantity,value\n";
            out.stream() << "between_weaving," << format_double(split.between_weaving) << "\n";
            out.stream() << "mixing," << format_double(split.mixing) << "\n";
            out.stream() << "within," << format_double(split.within) << "\n";
            out.stream() << "total," << format_double(total) << "\n";
            out.stream() << "identity_weaving_sum," << identity.weaving_sum << "\n";
            out.stream() << "identity_mixing_sum," << identity.mixing_sum << "\n";
            out.stream() << "identity_holds," << (identity.holds ? 1 : 0) << "\n";
        } else {
            ordered_json j;
            j["n"] = n;
            j["p"] = to_double(p);
            j["between_weaving"] = split.between_weaving;
            j["mixing"] = split.mixing;
            j["within"] = split.within;
            j["total"] = total;
            j["identity_weaving_sum"] = identity.weaving_sum.str();
            j["identity_mixing_sum"] = identity.mixing_sum.str();
            j["identity_holds"] = identity.holds;
            emit_json(out, j);
        }
    }
}

// ---------------------------------------------------------------------------
// simulate

void run_simulate(const CommonOptions& common, const SimulateConfig& config) {
    const SimulationReport report = simulate(config);
    Output out(common.output);
    emit_json(out, report.to_json());
}

// ---------------------------------------------------------------------------
// enumerate

void run_enumerate(const CommonOptions& common, int n, const std::string& p_text, int max_n) {
    enforce_max_n(n, max_n);
    const Rational p = parse_flag_probability(p_text, "--p");
    if (n < 1) throw std::domain_error("--n: must be >= 1");
    if (n > oracle::kMaxEnumerationN)
        throw resource_error("--n: enumeration cap is n <= " +
                             std::to_string(oracle::kMaxEnumerationN) + ", got " +
                             std::to_string(n));
    Output out(common.output);
    if (resolve_format(common) == OutputFormat::csv) {
        out.stream() << "k,bits,support_num,support_den,prob_num,prob_den\n";
        oracle::for_each_enumeration_row(n, p, [&](const oracle::EnumerationRow& row) {
            out.stream() << row.bits.k << "," << row.bits.bit_string() << ","
                         << numerator(row.support) << "," << denominator(row.support) << ","
                         << numerator(row.prob) << "," << denominator(row.prob) << "\n";
        });
    } else {
        ordered_json j;
        j["n"] = n;
        j["p"] = format_rational(p);
        auto& rows = j["rows"] = ordered_json::array();
        oracle::for_each_enumeration_row(n, p, [&](const oracle::EnumerationRow& row) {
            rows.push_back({{"k", row.bits.k},
                            {"bits", row.bits.bit_string()},
                            {"support", format_rational(row.support)},
                            {"prob", format_rational(row.prob)}});
        });
        emit_json(out, j);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"weaver: progressive sampling, the weaver's distribution, and its limit"};
    app.require_subcommand(1);

    CommonOptions common;
    app.add_option("--mode", common.mode, "numeric mode: exact|float")->capture_default_str();
    app.add_option("--format", common.format, "output format: csv|json (default csv, env WEAVER_FORMAT)");
    app.add_option("--output", common.output, "write to file instead of stdout");
    app.fallthrough();

    int n = 1;
    int level = 4;
    std::string p_text = "1/2";
    std::string method_text = "direct";
    std::string points = "support";
    std::string s0_text = "0";
    std::string s1_text = "0";
    int max_n = kMaxPointN;

    auto* pmf = app.add_subcommand("pmf", "full pmf table of W(n, p)");
    pmf->add_option("--n", n, "number of selections")->required();
    pmf->add_option("--p", p_text, "selection probability (a/b or decimal)")->required();
    pmf->add_option("--method", method_text, "construction: direct|weave|cascade")
        ->capture_default_str();
    pmf->add_option("--max-n", max_n, "refuse n above this cap");

    auto* cdf = app.add_subcommand("cdf", "staircase table (x, F(x))");
    cdf->add_option("--n", n, "number of selections")->required();
    cdf->add_option("--p", p_text, "selection probability")->required();
    cdf->add_option("--points", points, "evaluation grid: dyadic|support")->capture_default_str();
    cdf->add_option("--max-n", max_n, "refuse n above this cap");

    auto* moments = app.add_subcommand("moments", "mean, variance, per-bit variance terms");
    moments->add_option("--n", n, "number of selections")->required();
    moments->add_option("--p", p_text, "selection probability")->required();
    moments->add_option("--max-n", max_n, "refuse n above this cap");

    auto* triangle = app.add_subcommand("triangle", "geometric-triangle exponent row and its sum");
    triangle->add_option("--n", n, "row index (row has 2^n entries)")->required();
    triangle->add_option("--max-n", max_n, "refuse n above this cap");

    auto* hem = app.add_subcommand("hem", "limit-distribution CDF and interval masses");
    hem->add_option("--p", p_text, "cascade probability")->required();
    hem->add_option("--level", level, "dyadic refinement level (2^level cells)")
        ->capture_default_str();
    hem->add_option("--max-n", max_n, "refuse levels above this cap");

    auto* decompose = app.add_subcommand("decompose", "three-way variance split + integer identity");
    decompose->add_option("--n", n, "number of selections")->required();
    decompose->add_option("--p", p_text, "selection probability")->required();
    decompose->add_option("--s0", s0_text, "variance of H0")->capture_default_str();
    decompose->add_option("--s1", s1_text, "variance of H1")->capture_default_str();

    SimulateConfig sim;
    std::string process_text = "condmean";
    std::string h0_text = "point:0";
    std::string h1_text = "point:1";
    std::optional<std::uint64_t> seed_flag;
    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo run, JSON report");
    simulate_cmd->add_option("--process", process_text, "pathmean|mixdraw|condmean")->required();
    simulate_cmd->add_option("--n", sim.n, "number of selections")->required();
    simulate_cmd->add_option("--p", p_text, "selection probability")->required();
    simulate_cmd->add_option("--h0", h0_text, "H0 spec (point:c|twopoint:x0,x1,q|uniform:a,b)")
        ->capture_default_str();
    simulate_cmd->add_option("--h1", h1_text, "H1 spec")->capture_default_str();
    simulate_cmd->add_option("--reps", sim.replications, "replication count")
        ->capture_default_str();
    simulate_cmd->add_option("--seed", seed_flag, "master seed (default 0, env WEAVER_SEED)");
    simulate_cmd->add_option("--epsilon", sim.epsilon, "endpoint window half-width")
        ->capture_default_str();
    simulate_cmd->add_option("--threads", sim.threads, "worker threads (report is identical)")
        ->capture_default_str();
    simulate_cmd->add_option("--max-obs", sim.max_observations,
                             "refuse runs drawing more than this many observations");

    auto* enumerate_cmd = app.add_subcommand("enumerate", "exhaustive choice-vector table");
    enumerate_cmd->add_option("--n", n, "number of selections")->required();
    enumerate_cmd->add_option("--p", p_text, "selection probability")->required();
    enumerate_cmd->add_option("--max-n", max_n, "refuse n above this cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (pmf->parsed()) {
            run_pmf(common, n, p_text, method_text, max_n);
        } else if (cdf->parsed()) {
            run_cdf(common, n, p_text, points, max_n);
        } else if (moments->parsed()) {
            run_moments(common, n, p_text, max_n);
        } else if (triangle->parsed()) {
            run_triangle(common, n, max_n);
        } else if (hem->parsed()) {
            run_hem(common, p_text, level, max_n);
        } else if (decompose->parsed()) {
            run_decompose(common, n, p_text, s0_text, s1_text);
        } else if (simulate_cmd->parsed()) {
            sim.process = parse_process(process_text);
            sim.p = to_double(parse_flag_probability(p_text, "--p"));
            sim.h0 = ComponentSpec::parse(h0_text);
            sim.h1 = ComponentSpec::parse(h1_text);
            sim.master_seed = seed_flag.value_or(default_seed());
            run_simulate(common, sim);
        } else if (enumerate_cmd->parsed()) {
            run_enumerate(common, n, p_text, max_n);
        }
    } catch (const resource_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
