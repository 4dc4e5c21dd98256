#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rbsn/cli.hpp"
#include "rbsn/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Result
{
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = rbsn::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch()
{
    const auto dir = fs::temp_directory_path() / "rbsn_test_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string p(const fs::path& path) { return path.string(); }

}  // namespace

TEST_CASE("predict reproduces the classic limit")
{
    const auto r = run({"predict", "--mode", "ps", "--alpha", "0", "--gamma", "0"});
    CHECK(r.code == 0);
    CHECK(r.out.find("nu=0.333333 E/E0=0.666667") != std::string::npos);
}

TEST_CASE("missing input exits with an I/O error and writes nothing")
{
    const auto dir = scratch();
    const auto r = run({"simulate", "--in", p(dir / "missing.json"), "--alpha", "1", "--out", p(dir / "out.json")});
    CHECK(r.code == rbsn::cli::io_error);
    CHECK(fs::is_empty(dir));
}

TEST_CASE("invalid configuration exits with code 1")
{
    const auto dir = scratch();
    CHECK(run({"predict", "--mode", "xy"}).code == rbsn::cli::config_error);
    CHECK(run({"generate", "--kind", "voronoi"}).code == rbsn::cli::config_error);
    CHECK(run({"frobnicate"}).code == rbsn::cli::config_error);
    {
        std::ofstream(dir / "c.json") << R"({"kind": "voronoi", "colour": "red"})";
    }
    const auto r = run({"generate", "--config", p(dir / "c.json"), "--out", p(dir / "t.json")});
    CHECK(r.code == rbsn::cli::config_error);
    CHECK(r.err.find("colour") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "t.json"));
}

TEST_CASE("unwritable outputs fail before any work")
{
    const auto dir = scratch();
    const auto r = run({"generate", "--kind", "voronoi", "--size", "5", "5", "--out", p(dir / "nope" / "t.json")});
    CHECK(r.code == rbsn::cli::io_error);
    run({"generate", "--kind", "voronoi", "--size", "5", "5", "--out", p(dir / "t.json"), "--quiet"});
    CHECK(run({"generate", "--kind", "voronoi", "--size", "5", "5", "--out", p(dir / "t.json"), "--no-clobber"}).code
          == rbsn::cli::io_error);
}

TEST_CASE("config values apply and flags override them")
{
    const auto dir = scratch();
    {
        std::ofstream(dir / "c.json") << R"({"kind": "random", "size": [6, 6], "seed": 4, "quiet": true})";
    }
    CHECK(run({"generate", "--config", p(dir / "c.json"), "--out", p(dir / "a.json")}).code == 0);
    CHECK(run({"generate", "--kind", "random", "--size", "6", "6", "--seed", "4", "--out", p(dir / "b.json")}).code
          == 0);
    CHECK(rbsn::read_file(dir / "a.json") == rbsn::read_file(dir / "b.json"));
    CHECK(run({"generate", "--config", p(dir / "c.json"), "--seed", "5", "--out", p(dir / "c5.json")}).code == 0);
    CHECK(rbsn::read_file(dir / "a.json") != rbsn::read_file(dir / "c5.json"));
}

TEST_CASE("pipeline outputs are reproducible")
{
    const auto dir = scratch();
    const auto tess = p(dir / "t.json");
    REQUIRE(run({"generate", "--kind", "rand-voronoi", "--size", "12", "12", "--seed", "3", "--out", tess}).code == 0);
    for (int pass = 0; pass < 2; ++pass) {
        const std::string tag = std::to_string(pass);
        CHECK(run({"stats", "--in", tess, "--csv", p(dir / ("h" + tag + ".csv")), "--svg", p(dir / ("h" + tag + ".svg"))})
                  .code
              == 0);
        CHECK(run({"simulate", "--in", tess, "--alpha", "0.4", "--out", p(dir / ("s" + tag + ".json")), "--states"}).code
              == 0);
        CHECK(run({"sweep", "--in", tess, "--alphas", "0.2,1", "--csv", p(dir / ("w" + tag + ".csv")), "--svg",
                   p(dir / ("w" + tag + ".svg")), "--threads", tag == "0" ? "1" : "2", "--quiet"})
                  .code
              == 0);
        CHECK(run({"curves", "--figure", "3", "--svg", p(dir / ("f" + tag + ".svg")), "--csv",
                   p(dir / ("f" + tag + ".csv")), "--quiet"})
                  .code
              == 0);
    }
    for (const char* stem : {"h", "s", "w", "f"})
        for (const char* ext : {".csv", ".svg", ".json"}) {
            const auto a = dir / (std::string(stem) + "0" + ext), b = dir / (std::string(stem) + "1" + ext);
            if (fs::exists(a))
                CHECK(rbsn::read_file(a) == rbsn::read_file(b));
        }
    const auto sweep = rbsn::read_file(dir / "w0.csv");
    CHECK(sweep.rfind("kind,seed,alpha,nu_num,E_num,nu_pred,E_pred,I1,I2\n", 0) == 0);
}

TEST_CASE("verify-expectations reports one row per angle")
{
    const auto dir = scratch();
    const auto r = run({"verify-expectations", "--dim", "2", "--gamma-grid", "0.5:2.5:3", "--samples", "400000",
                        "--sigma", "5", "--csv", p(dir / "v.csv")});
    CHECK(r.code == 0);
    const auto csv = rbsn::read_file(dir / "v.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK(csv.find("FAIL") == std::string::npos);
    CHECK(run({"verify-expectations", "--gamma-grid", "1:2"}).code == rbsn::cli::config_error);
}

TEST_CASE("every subcommand documents units in its help")
{
    for (const char* sub : {"generate", "stats", "predict", "curves", "simulate", "sweep", "verify-expectations"}) {
        const auto r = run({sub, "--help"});
        CAPTURE(sub);
        CHECK(r.code == 0);
        CHECK(r.out.find("--seed") != std::string::npos);
        CHECK(r.out.find("[-]") != std::string::npos);
    }
}
