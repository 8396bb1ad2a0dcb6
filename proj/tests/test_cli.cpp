#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <string>

#include <sys/wait.h>

namespace {

struct CommandResult {
    int status = -1;
    std::string output;
};

CommandResult run_command(const std::string& args, bool keep_stderr = false) {
    const std::string cmd =
        std::string(WEAVER_CLI_PATH) + " " + args + (keep_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CommandResult result;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        result.output.append(buf.data(), got);
    const int rc = pclose(pipe);
    result.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return result;
}

} // namespace

TEST_CASE("cli: pmf table") {
    const auto res = run_command("pmf --n 2 --p 1/2");
    REQUIRE(res.status == 0);
    REQUIRE(res.output ==
            "k,bits,y_num,y_den,p_num,p_den\n"
            "0,00,0,1,1,4\n"
            "1,01,1,3,1,4\n"
            "2,10,2,3,1,4\n"
            "3,11,1,1,1,4\n");
}

TEST_CASE("cli: float mode pmf") {
    const auto res = run_command("--mode float pmf --n 1 --p 0.25");
    REQUIRE(res.status == 0);
    REQUIRE(res.output == "k,bits,y,p\n0,0,0,0.75\n1,1,1,0.25\n");
}

TEST_CASE("cli: triangle row") {
    const auto res = run_command("triangle --n 3");
    REQUIRE(res.status == 0);
    REQUIRE(res.output == "exponents,row_sum\n\"0,1,1,2,1,2,2,3\",12\n");
}

TEST_CASE("cli: decompose with zero within-variance") {
    const auto res = run_command("decompose --n 3 --p 1/2 --s0 0 --s1 0");
    REQUIRE(res.status == 0);
    // 21/196 and 28/196 in lowest terms, rejoining to 1/4.
    REQUIRE(res.output ==
            "quantity,num,den\n"
            "between_weaving,3,28\n"
            "mixing,1,7\n"
            "within,0,1\n"
            "total,1,4\n"
            "identity_weaving_sum,21,1\n"
            "identity_mixing_sum,28,1\n"
            "identity_holds,1,1\n");
}

TEST_CASE("cli: enumerate columns") {
    const auto res = run_command("enumerate --n 1 --p 2/5");
    REQUIRE(res.status == 0);
    REQUIRE(res.output ==
            "k,bits,support_num,support_den,prob_num,prob_den\n"
            "0,0,0,1,3,5\n"
            "1,1,1,1,2,5\n");
}

TEST_CASE("cli: moments and cdf run") {
    const auto moments = run_command("moments --n 3 --p 2/5");
    REQUIRE(moments.status == 0);
    REQUIRE(moments.output.find("mean,2,5\n") != std::string::npos);
    REQUIRE(moments.output.find("variance_ratio,3,7\n") != std::string::npos);

    const auto cdf = run_command("cdf --n 2 --p 1/3 --points dyadic");
    REQUIRE(cdf.status == 0);
    REQUIRE(cdf.output.find("x_num,x_den,F_num,F_den\n") == 0);
    // F(1/2) = 2/3 and F(1) = 1 appear as rows.
    REQUIRE(cdf.output.find("1,2,2,3\n") != std::string::npos);
    REQUIRE(cdf.output.find("1,1,1,1\n") != std::string::npos);
}

TEST_CASE("cli: hem emits moments then the staircase") {
    const auto res = run_command("hem --p 1/2 --level 1");
    REQUIRE(res.status == 0);
    REQUIRE(res.output ==
            "mean_num,mean_den,variance_num,variance_den\n"
            "1,2,1,12\n"
            "\n"
            "k,x_num,x_den,cdf_num,cdf_den,mass_num,mass_den\n"
            "0,0,1,0,1,1,2\n"
            "1,1,2,1,2,1,2\n"
            "2,1,1,1,1,,\n");
}

TEST_CASE("cli: exit codes") {
    SECTION("missing required flag -> 2") {
        REQUIRE(run_command("pmf --n 2").status == 2);
    }
    SECTION("unknown flag -> 2") {
        REQUIRE(run_command("pmf --n 2 --p 1/2 --bogus 1").status == 2);
    }
    SECTION("invalid probability -> 2 with the flag named") {
        const auto res = run_command("pmf --n 2 --p 3/2", true);
        REQUIRE(res.status == 2);
        REQUIRE(res.output.find("--p") != std::string::npos);
    }
    SECTION("cap violation -> 3") {
        REQUIRE(run_command("pmf --n 25 --p 1/2").status == 3);
        REQUIRE(run_command("pmf --n 10 --p 1/2 --max-n 8").status == 3);
        REQUIRE(run_command(
                    "simulate --process mixdraw --n 20 --p 0.5 --reps 100000000 --max-obs 1000")
                    .status == 3);
    }
    SECTION("bad component spec -> 2") {
        REQUIRE(run_command("simulate --process mixdraw --n 3 --p 0.5 --h0 cauchy:0").status == 2);
    }
}

TEST_CASE("cli: deterministic bytes for identical argv") {
    const std::string argv =
        "simulate --process mixdraw --n 5 --p 0.3 --h0 twopoint:-1,1,0.5 --h1 twopoint:0,2,0.5 "
        "--reps 2000 --seed 7";
    const auto first = run_command(argv);
    const auto second = run_command(argv);
    REQUIRE(first.status == 0);
    REQUIRE(first.output == second.output);
    const auto threaded = run_command(argv + " --threads 4");
    REQUIRE(threaded.output == first.output);
}

TEST_CASE("cli: environment overrides") {
    const auto res = run_command("--format json triangle --n 1");
    REQUIRE(res.status == 0);
    REQUIRE(res.output.find("\"row_sum\": 1") != std::string::npos);
    // Same via WEAVER_FORMAT.
    const std::string cmd = std::string("WEAVER_FORMAT=json ") + WEAVER_CLI_PATH +
                            " triangle --n 1 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 1024> buf{};
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    pclose(pipe);
    REQUIRE(out == res.output);
}
