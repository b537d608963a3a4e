#include "cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace openmax;
namespace fs = std::filesystem;

namespace
{
    struct Result
    {
        int code;
        std::string out;
        std::string err;
    };

    Result invoke(std::vector<std::string> args)
    {
        std::ostringstream out, err;
        const int code = cli::run_cli(args, out, err);
        return {code, out.str(), err.str()};
    }

    fs::path scratch_dir(const std::string &name)
    {
        const fs::path p = fs::temp_directory_path() / ("openmax-test-" + name);
        fs::remove_all(p);
        return p;
    }

    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
}

TEST_CASE("run writes reproducible artifacts")
{
    const fs::path a = scratch_dir("run-a");
    const fs::path b = scratch_dir("run-b");
    const auto r1 = invoke({"run", "--scenario", "fig1a", "--seed", "7", "--out", a.string()});
    const auto r2 = invoke({"run", "--scenario", "fig1a", "--seed", "7", "--out", b.string()});
    REQUIRE(r1.code == 0);
    REQUIRE(r2.code == 0);
    CHECK(r1.out == r2.out);
    for (const char *f : {"trace.csv", "metrics.csv", "summary.json"})
    {
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    CHECK_FALSE(fs::exists(a / "counterexample.json"));
    const auto summary = nlohmann::json::parse(slurp(a / "summary.json"));
    CHECK(summary["seed"] == 7);
    CHECK(summary["tool"]["version"] == "0.1.0");
    CHECK(summary["convergence"]["reference_tick"] == 200);
    // Rows carry the tick their event produced.
    CHECK(slurp(a / "trace.csv").find("\n201,departure,leaver=9;") != std::string::npos);
}

TEST_CASE("run with overrides, JSON traces and seed ranges")
{
    const fs::path d = scratch_dir("run-range");
    const auto r = invoke({"run", "--scenario", "fig1a", "--algorithm", "timeout", "--threshold", "30", "--threshold-growth",
                        "1/100", "--seeds", "1..3", "--horizon", "600", "--stride", "50", "--format", "json", "--out",
                        d.string()});
    REQUIRE(r.code == 0);
    for (int seed = 1; seed <= 3; ++seed)
    {
        const fs::path sub = d / ("seed-" + std::to_string(seed));
        REQUIRE(fs::exists(sub / "trace.json"));
        const auto summary = nlohmann::json::parse(slurp(sub / "summary.json"));
        CHECK(summary["protocol"] == "timeout");
        CHECK(summary["scenario_config"]["threshold"]["base"] == 30);
        CHECK(summary["scenario_config"]["threshold"]["growth"]["every"] == 100);
        CHECK(summary["horizon"] == 600);
        CHECK(summary["spurious_resets"].is_object());
    }
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 3);
}

TEST_CASE("run from a config file")
{
    const fs::path d = scratch_dir("run-file");
    fs::create_directories(d);
    std::ofstream(d / "s.yaml") << "name: tiny\nprotocol: counter\nhorizon: 40\ninitial: {values: [1, 2, 3]}\n";
    const auto r = invoke({"run", "--scenario", (d / "s.yaml").string(), "--out", (d / "out").string()});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(slurp(d / "out" / "summary.json"))["scenario"] == "tiny");
}

TEST_CASE("usage errors exit with code 2")
{
    CHECK(invoke({}).code == cli::kUsage);
    CHECK(invoke({"run"}).code == cli::kUsage);
    CHECK(invoke({"run", "--scenario", "nope"}).code == cli::kUsage);
    CHECK(invoke({"run", "--scenario", "fig1a", "--threshold", "5"}).code == cli::kUsage);
    CHECK(invoke({"run", "--scenario", "fig1a", "--algorithm", "flood"}).code == cli::kUsage);
    CHECK(invoke({"run", "--scenario", "fig1a", "--seed", "1", "--seeds", "1..2"}).code == cli::kUsage);
    CHECK(invoke({"run", "--scenario", "fig1a", "--seeds", "5..1"}).code == cli::kUsage);
    CHECK(invoke({"run", "--scenario", "fig1a", "--horizon", "100"}).code == cli::kUsage);
    CHECK(invoke({"run", "--scenario", "fig1b", "--threshold-growth", "3"}).code == cli::kUsage);
    CHECK(invoke({"bounds", "--n-bar", "25", "--epsilon", "0"}).code == cli::kUsage);
    CHECK(invoke({"bounds", "--n-bar", "1"}).code == cli::kUsage);
    CHECK(invoke({"compare", "--sizes", "1"}).code == cli::kUsage);
    CHECK(invoke({"frobnicate"}).code == cli::kUsage);
}

TEST_CASE("help and version exit cleanly")
{
    const auto h = invoke({"--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("compare") != std::string::npos);
    const auto rh = invoke({"run", "--help"});
    CHECK(rh.code == 0);
    CHECK(rh.out.find("--threshold-growth") != std::string::npos);
    CHECK(invoke({"--version"}).out.find("0.1.0") != std::string::npos);
}

TEST_CASE("bounds prints both bounds")
{
    const auto r = invoke({"bounds", "--n-bar", "25"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("expected_1phase   90.62299627") != std::string::npos);
    CHECK(r.out.find("expected_2phase   181.2459925") != std::string::npos);
    CHECK(r.out.find("high_prob_1phase  1260.617913") != std::string::npos);
    const auto two = invoke({"bounds", "--n-bar", "2"});
    CHECK(two.out.find("expected_1phase   1\n") != std::string::npos);
}

TEST_CASE("compare, scenarios and validate")
{
    const fs::path d = scratch_dir("compare");
    const auto c = invoke({"compare", "--sizes", "2,5", "--seeds", "1..4", "--out", d.string()});
    REQUIRE(c.code == 0);
    CHECK(c.out.find("    5     6 |") != std::string::npos);
    CHECK(fs::exists(d / "compare.csv"));
    CHECK(nlohmann::json::parse(slurp(d / "compare.json"))["rows"].size() == 2);
    CHECK(invoke({"compare", "--sizes", "3", "--seeds", "1..2", "--format", "csv"}).out.rfind("n,t_star", 0) == 0);

    const auto s = invoke({"scenarios"});
    CHECK(s.out.find("fig1c") != std::string::npos);
    CHECK(s.out.find("table1-100-timeout") != std::string::npos);

    CHECK(invoke({"validate", "fig1b"}).out == "ok fig1b: timeout, 25 initial agents, horizon 5000\n");
    const fs::path bad = d / "bad.yaml";
    std::ofstream(bad) << "protocol: counter\nhorizon: 10\ninitial: {count: 2}\nchurn: {kind: stochastic, p_arrival: "
                          "0.7, p_departure: 0.5}\n";
    const auto v = invoke({"validate", bad.string()});
    CHECK(v.code == cli::kUsage);
    CHECK(v.err.find("churn") != std::string::npos);
    CHECK(invoke({"validate", "fig1a", "--normalize"}).out.find("protocol: counter") != std::string::npos);
}
